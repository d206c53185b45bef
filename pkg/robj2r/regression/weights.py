""" Robust Mahalanobis covariate weights

Observations with outlying regressors are down-weighted by a trisquared
redescending function of their robust Mahalanobis distance. Callers pass
regressors without the intercept column; a constant column would make the
scatter singular.
"""
from dataclasses import dataclass
import enum
import logging

import numpy as np
import scipy.linalg
import scipy.stats

from ..errors import (DegenerateScaleError, InsufficientDataError,
                      SingularScatterError)

logger = logging.getLogger('robj2r')

#: Consistency factor turning a MAD into a normal standard deviation
MAD_NORMAL = 1.4826


class WeightMode(str, enum.Enum):
    #: ``{1 - (u/nu)^2}^3 1(u <= nu)``: 1 at the center
    NORMALIZED = 'normalized'
    #: ``u {1 - (u/nu)^2}^3 1(u <= nu)``: 0 at the center
    LITERAL = 'literal'


def drop_intercept(H):
    """ Regressor columns used for distances (all but the first) """
    return np.asarray(H, dtype=float)[:, 1:]


def _column_scale(x):
    med = np.median(x)
    s = MAD_NORMAL * np.median(np.abs(x - med))
    if s > 0:
        return s
    if np.all(x == x[0]):
        return 0.0
    # Mostly tied columns, e.g. binary covariates
    return np.sqrt(np.pi / 2) * np.mean(np.abs(x - med))


def robust_center_scatter(rows):
    """ Coordinate-wise median and a rank-based robust scatter matrix

    The scatter is ``D R D`` with ``D`` the normalized MADs and ``R`` the
    Spearman correlation mapped through ``2 sin(pi r / 6)``, symmetrized and
    ridge-repaired to positive definite if needed.

    Args:
        rows (np.ndarray): ``(n, d)`` observations

    Returns:
        tuple: (center ``(d,)``, scatter ``(d, d)``)

    Raises:
        InsufficientDataError: fewer than 2 rows
        DegenerateScaleError: a column is constant

    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows[:, None]
    n, d = rows.shape
    if n < 2:
        raise InsufficientDataError('Robust scatter needs at least 2 rows '
                                    '(got %i)' % n)
    center = np.median(rows, axis=0)
    scales = np.array([_column_scale(rows[:, j]) for j in range(d)])
    if np.any(scales <= 0):
        raise DegenerateScaleError('Zero robust scale in column(s) %s'
                                   % np.flatnonzero(scales <= 0).tolist())
    if d == 1:
        return center, np.array([[scales[0] ** 2]])

    r_s = scipy.stats.spearmanr(rows).statistic
    if np.ndim(r_s) == 0:
        # two columns give a scalar
        r_s = np.array([[1.0, r_s], [r_s, 1.0]])
    corr = 2 * np.sin(np.pi * r_s / 6)
    np.fill_diagonal(corr, 1.0)
    scatter = corr * np.outer(scales, scales)
    scatter = 0.5 * (scatter + scatter.T)

    eig = np.linalg.eigvalsh(scatter)
    floor = 1e-8 * max(eig[-1], np.finfo(float).tiny)
    if eig[0] < floor:
        logger.debug('Ridge-repairing robust scatter (min eigenvalue %.3g)',
                     eig[0])
        scatter = scatter + (floor - eig[0]) * np.eye(d)
    return center, scatter


@dataclass(frozen=True)
class CovariateWeighting(object):
    """ Tuning constant and robust location / scatter for covariate weights
    """
    nu: float
    center: np.ndarray
    scatter: np.ndarray
    mode: WeightMode = WeightMode.NORMALIZED

    def __post_init__(self):
        object.__setattr__(self, 'mode', WeightMode(self.mode))
        if not self.nu > 0:
            raise ValueError('nu must be positive (got %r)' % self.nu)

    @classmethod
    def from_rows(cls, rows, nu, mode=WeightMode.NORMALIZED):
        center, scatter = robust_center_scatter(rows)
        return cls(float(nu), center, scatter, mode)

    def to_dict(self):
        return {'nu': self.nu, 'mode': self.mode.value,
                'center': self.center.tolist(),
                'scatter': self.scatter.tolist()}


def mahalanobis_distance(rows, center, scatter):
    """ Squared distances ``(x - mu)' V^-1 (x - mu)`` per row

    Raises:
        SingularScatterError: ``scatter`` is not positive definite
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows[:, None]
    diff = rows - center
    try:
        factor = scipy.linalg.cho_factor(scatter)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularScatterError('Robust scatter is not invertible: %s'
                                   % exc)
    return np.einsum('ij,ij->i', diff,
                     scipy.linalg.cho_solve(factor, diff.T).T)


def trisquare(u, nu, mode=WeightMode.NORMALIZED):
    """ Trisquared redescending weight of scaled distances ``u`` """
    u = np.asarray(u, dtype=float)
    w = (1 - (u / nu) ** 2) ** 3 * (u < nu)
    if WeightMode(mode) is WeightMode.LITERAL:
        w = u * w
    return w


def mahalanobis_weights(rows, cw):
    """ Observation weights from robust Mahalanobis distances

    Args:
        rows (np.ndarray): ``(n, d)`` regressors without intercept
        cw (CovariateWeighting): tuning and robust location / scatter

    Returns:
        np.ndarray: weights; within [0, 1] in normalized mode

    Raises:
        ValueError: no rows
        SingularScatterError: scatter not invertible

    """
    rows = np.asarray(rows, dtype=float)
    if rows.shape[0] == 0:
        raise ValueError('Cannot weight an empty set of rows')
    d = mahalanobis_distance(rows, cw.center, cw.scatter)
    u = np.sqrt(np.maximum(d, 0) / cw.nu)
    return trisquare(u, cw.nu, cw.mode)
