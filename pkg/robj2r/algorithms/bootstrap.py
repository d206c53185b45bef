""" Stratified nonparametric bootstrap of any ATE estimator

An estimator is any object with a ``point_estimate(d) -> float`` method.
Each replicate resamples whole subject trajectories with replacement within
each arm. Replicate ``b`` draws from its own seed ``(seed, b)``, so results
do not depend on the number of workers.
"""
from functools import partial
import logging

import numpy as np

from ..errors import BootstrapInstabilityError, J2RError
from ..utils import parallel_map, rng_for

logger = logging.getLogger('robj2r')

MAX_ATTEMPTS = 10
MAX_FAILURE_RATE = 0.05


def stratified_resample(d, rng):
    """ Resample subjects with replacement within each arm

    Subjects are ordered by id within their arm before drawing, so the
    resample does not depend on the input row order.
    """
    ids = np.asarray(d.ids)
    rows = []
    for arm in (0, 1):
        idx = d.arm_rows(arm)
        if not idx.size:
            continue
        idx = idx[np.argsort(ids[idx], kind='stable')]
        rows.append(idx[rng.integers(0, idx.size, size=idx.size)])
    return d.subset(np.concatenate(rows))


def _replicate(b, d, estimator, seed):
    rng = rng_for(seed, b)
    for attempt in range(MAX_ATTEMPTS):
        try:
            return estimator.point_estimate(stratified_resample(d, rng))
        except J2RError as exc:
            logger.debug('Bootstrap replicate %i attempt %i failed: %s',
                         b, attempt + 1, exc)
    logger.warning('Bootstrap replicate %i failed %i times', b,
                   MAX_ATTEMPTS)
    return np.nan


def bootstrap_replicates(d, estimator, B=200, seed=0, n_jobs=1):
    """ ``B`` replicate point estimates (NaN for failed replicates) """
    if B < 2:
        raise ValueError('Bootstrap needs B >= 2 (got %i)' % B)
    func = partial(_replicate, d=d, estimator=estimator, seed=seed)
    return np.asarray(parallel_map(func, range(B), n_jobs=n_jobs),
                      dtype=float)


def bootstrap_variance(d, estimator, B=200, seed=0, n_jobs=1):
    """ Sample variance of ``B`` bootstrap replicate estimates

    Args:
        d (TrialDataset): trial data
        estimator: object with ``point_estimate(d)``, e.g.
            :class:`~robj2r.algorithms.ate_analysis.PipelineConfig` or
            :class:`~robj2r.algorithms.mi_baseline.MiConfig`
        B (int): number of replicates, at least 2
        seed (int): root seed
        n_jobs (int): joblib workers

    Returns:
        float: bootstrap variance

    Raises:
        BootstrapInstabilityError: more than 5% of replicates failed

    """
    taus = bootstrap_replicates(d, estimator, B=B, seed=seed, n_jobs=n_jobs)
    failed = int(np.sum(np.isnan(taus)))
    if failed > MAX_FAILURE_RATE * B or B - failed < 2:
        raise BootstrapInstabilityError(
            '%i of %i bootstrap replicates failed' % (failed, B),
            failed=failed, total=B)
    if failed:
        logger.warning('Excluded %i of %i failed bootstrap replicates',
                       failed, B)
    return float(np.var(taus[~np.isnan(taus)], ddof=1))
