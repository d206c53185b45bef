""" K-fold cross-validation of the covariate-weight tuning constant ``nu``
"""
import logging

import numpy as np
from sklearn.model_selection import KFold

from ..errors import CvExhaustedError, InsufficientDataError, J2RError
from .robust_fit import fit_weighted_robust
from .weights import (CovariateWeighting, WeightMode, drop_intercept,
                      mahalanobis_weights)

logger = logging.getLogger('robj2r')

DEFAULT_GRID = (5.0, 8.0, 10.0, 15.0, 20.0, 30.0)


def covariate_weights(H, nu, mode=WeightMode.NORMALIZED):
    """ Mahalanobis weights of the rows of ``H`` (intercept first)

    Returns:
        tuple: (weights, CovariateWeighting or None when ``H`` holds only
            the intercept)

    """
    rows = drop_intercept(H)
    if rows.shape[1] == 0:
        return np.ones(H.shape[0]), None
    cw = CovariateWeighting.from_rows(rows, nu, mode)
    return mahalanobis_weights(rows, cw), cw


def fold_indices(n, K, seed):
    """ Seeded (train, test) index pairs; depend only on ``(seed, n, K)`` """
    kf = KFold(n_splits=K, shuffle=True, random_state=seed)
    return list(kf.split(np.arange(n)))


def cv_sse(y, H, spec, nu, folds, mode=WeightMode.NORMALIZED):
    """ Held-out sum of squared prediction errors at one ``nu`` """
    sse = 0.0
    for train, test in folds:
        w, _ = covariate_weights(H[train], nu, mode)
        fit = fit_weighted_robust(y[train], H[train], w, spec)
        sse += float(np.sum((y[test] - fit.predict(H[test])) ** 2))
    return sse


def cross_validate_nu(y, H, spec, grid=DEFAULT_GRID, K=5, seed=0,
                      mode=WeightMode.NORMALIZED, return_scores=False):
    """ Choose ``nu`` minimizing the K-fold CV sum of squared errors

    Ties go to the larger ``nu``. A ``nu`` whose inner fits fail is dropped.

    Args:
        y (np.ndarray): responses
        H (np.ndarray): regressors, intercept first
        spec (LossSpec): fitting loss
        grid (sequence): candidate ``nu`` values
        K (int): number of folds
        seed (int): fold-assignment seed
        mode (WeightMode): covariate weight form
        return_scores (bool): also return ``{nu: CV-SSE}``

    Returns:
        float or tuple: chosen ``nu`` (and the score table)

    Raises:
        ValueError: ``K < 2`` or empty grid
        InsufficientDataError: fewer rows than folds
        CvExhaustedError: every ``nu`` failed

    """
    y = np.asarray(y, dtype=float)
    H = np.asarray(H, dtype=float)
    grid = [float(nu) for nu in grid]
    if K < 2:
        raise ValueError('Cross-validation needs K >= 2 (got %i)' % K)
    if not grid:
        raise ValueError('Cross-validation grid is empty')
    if y.size < K:
        raise InsufficientDataError('%i rows cannot form %i folds'
                                    % (y.size, K))

    folds = fold_indices(y.size, K, seed)
    scores = {}
    for nu in grid:
        try:
            scores[nu] = cv_sse(y, H, spec, nu, folds, mode)
        except J2RError as exc:
            logger.warning('Dropping nu=%g from cross-validation: %s: %s',
                           nu, type(exc).__name__, exc)
    if not scores:
        raise CvExhaustedError('Every nu in %s failed during '
                               'cross-validation' % grid)

    chosen = None
    for nu in sorted(scores, reverse=True):
        if chosen is None or scores[nu] < scores[chosen]:
            chosen = nu
    logger.debug('Cross-validated nu=%g (CV-SSE %.6g)', chosen,
                 scores[chosen])
    return (chosen, scores) if return_scores else chosen
