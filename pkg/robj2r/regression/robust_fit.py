"""
Weighted robust regression by iteratively re-weighted least squares (IRLS)

Minimizes ``sum_i w_i rho(y_i - H_i' alpha)`` for the losses in
:mod:`robj2r.regression.robust_loss`. The Huber scale is the normalized MAD
of the current residuals, refreshed every iteration until its relative
change drops below ``SCALE_TOL`` and then frozen. Once frozen, Huber fits
also try a Newton step on the estimating equations and keep it only if it
lowers the objective further than the plain IRLS update.

Reference:
    http://statsmodels.sourceforge.net/stable/rlm.html
"""
from dataclasses import dataclass, field
import logging

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, RegressorMixin
from statsmodels.robust.scale import mad as _sm_mad

from ..errors import NonConvergenceError, RankError
from .robust_loss import LossKind, LossSpec, psi, psi_prime, rho

logger = logging.getLogger('robj2r')
logger_algo = logging.getLogger('robj2r_algo')

MAXITER = 200
TOL = 1e-10
SCALE_TOL = 1e-6
#: Smoothing of ``|r|`` in the absolute / eps-insensitive IRLS weights,
#: relative to the residual scale
SMOOTHING = 1e-8


def mad(resid):
    """ Normalized median absolute deviation of residuals about zero

    Falls back to the normal-consistent mean absolute deviation when more
    than half of the residuals are exactly zero.

    Args:
        resid (np.ndarray): residuals

    Returns:
        float: robust scale (0 only if every residual is 0)

    """
    scale = float(_sm_mad(resid, center=0.0))
    if scale <= 0:
        scale = float(np.sqrt(np.pi / 2) * np.mean(np.abs(resid)))
    return scale


def ee_tolerance(y):
    """ Tolerance for the estimating-equation norm of a converged fit """
    return 1e-8 * (1.0 + np.linalg.norm(y))


def _irls_weights(spec, resid, scale):
    """ ``psi(r) / r`` with smoothing where that ratio is undefined """
    ar = np.abs(resid)
    if spec.kind is LossKind.HUBER:
        k = spec.threshold(scale)
        v = np.ones_like(ar)
        out = ar > k
        v[out] = k / ar[out]
        return v
    floor = SMOOTHING * scale if scale > 0 else SMOOTHING
    v = 1.0 / np.maximum(ar, floor)
    if spec.kind is LossKind.EPS:
        # Rows inside the margin carry (almost) no weight
        v = np.where(ar > spec.eps, v,
                     SMOOTHING / max(spec.eps, floor))
    return v


@dataclass
class FitResult(object):
    """ Result of :func:`fit_weighted_robust`

    Attributes:
        coefficients (np.ndarray): estimated ``alpha``
        scale (float): final robust residual scale
        weights (np.ndarray): covariate (observation) weights used
        irls_weights (np.ndarray): final IRLS weights (0 for rows with zero
            observation weight)
        iterations (int): IRLS iterations performed
        converged (bool): estimating-equation criterion met
        estimating_norm (float): norm of ``sum w psi(r) H`` at the solution
        objective_trace (list): ``(before, after)`` weighted objective for
            each IRLS update, both at the scale used for that update
    """
    coefficients: np.ndarray
    scale: float
    weights: np.ndarray
    irls_weights: np.ndarray
    iterations: int
    converged: bool
    estimating_norm: float
    objective_trace: list = field(default_factory=list)

    def predict(self, H):
        return np.asarray(H, dtype=float).dot(self.coefficients)

    def residuals(self, y, H):
        return np.asarray(y, dtype=float) - self.predict(H)

    def summary(self):
        return {'scale': float(self.scale),
                'iterations': int(self.iterations),
                'converged': bool(self.converged),
                'estimating_norm': float(self.estimating_norm)}


class RLM(BaseEstimator, RegressorMixin):
    """ Robust Linear Model using Iterative Reweighted Least Squares

    Follows the scikit-learn ``fit`` / ``predict`` paradigm. ``fit`` expects
    rows with strictly positive ``sample_weight``; see
    :func:`fit_weighted_robust` for the validated entry point.

    Args:
        loss (LossSpec): loss to minimize
        maxiter (int): maximum number of IRLS iterations
        tol (float): relative coefficient change regarded as converged for
            the absolute and eps-insensitive losses

    Attributes:
        coef_ (np.ndarray): 1D array of model coefficients
        scale_ (float): final robust residual scale
        weights_ (np.ndarray): final IRLS weights
        n_iter_ (int): iterations performed
        converged_ (bool): whether the convergence criterion was met
        estimating_norm_ (float): estimating-equation norm at ``coef_``
        objective_trace_ (list): per-update objective pairs

    """

    def __init__(self, loss=None, maxiter=MAXITER, tol=TOL):
        self.loss = loss
        self.maxiter = maxiter
        self.tol = tol

    def _objective(self, X, y, w, coef, scale):
        return float(np.sum(w * rho(self.loss, y - X.dot(coef), scale)))

    def _ls_step(self, X, y, w, v):
        """ Least-squares update under covariate weights ``w`` times IRLS
        weights ``v``; returns coefficients and residuals
        """
        root = np.sqrt(w * v)
        coef = scipy.linalg.lstsq(X * root[:, None], y * root,
                                  check_finite=False)[0]
        return coef, y - X.dot(coef)

    def _estimating_norm(self, X, resid, w, scale):
        return float(np.linalg.norm(X.T.dot(w * psi(self.loss, resid,
                                                     scale))))

    def _newton(self, X, y, w, coef, resid, scale):
        """ Newton step on the Huber estimating equations, or None """
        d = w * psi_prime(self.loss, resid, scale)
        J = X.T.dot(X * d[:, None])
        g = X.T.dot(w * psi(self.loss, resid, scale))
        try:
            step = np.linalg.solve(J, g)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        return coef + step

    def fit(self, X, y, sample_weight=None):
        """ Fit a model predicting y from X design matrix

        Args:
            X (np.ndarray): 2D (n_obs x n_features) design matrix
            y (np.ndarray): 1D dependent variable
            sample_weight (np.ndarray, optional): positive observation
                weights

        Returns:
            object: return `self` with model results stored for method
                chaining

        """
        loss = self.loss or LossSpec()
        self.loss = loss
        w = (np.ones_like(y) if sample_weight is None
             else np.asarray(sample_weight, dtype=float))

        coef, resid = self._ls_step(X, y, w, np.ones_like(w))
        scale = mad(resid)
        ee_tol = ee_tolerance(y)
        exact = 1e-12 * (1.0 + np.max(np.abs(y)))
        trace = []
        v = np.ones_like(w)

        iteration = 0
        converged = False
        if loss.kind is LossKind.LS or scale <= exact:
            # Closed form, or the LS start already interpolates the data
            converged = True
        frozen = False
        while not converged and iteration < self.maxiter:
            iteration += 1
            v = _irls_weights(loss, resid, scale)
            before = self._objective(X, y, w, coef, scale)
            new_coef, new_resid = self._ls_step(X, y, w, v)
            after = self._objective(X, y, w, new_coef, scale)

            if loss.kind is LossKind.HUBER and frozen:
                candidate = self._newton(X, y, w, coef, resid, scale)
                if candidate is not None:
                    obj = self._objective(X, y, w, candidate, scale)
                    if obj <= after:
                        new_coef, new_resid, after = \
                            candidate, y - X.dot(candidate), obj
            trace.append((before, after))

            change = (np.linalg.norm(new_coef - coef) /
                      max(np.linalg.norm(new_coef), np.finfo(float).tiny))
            coef, resid = new_coef, new_resid

            if not frozen:
                new_scale = mad(resid)
                frozen = abs(new_scale - scale) <= SCALE_TOL * scale
                scale = new_scale
                if scale <= exact:
                    converged = True
                    break

            ee = self._estimating_norm(X, resid, w, scale)
            logger_algo.debug('IRLS iteration %i: objective %.12g, '
                              'ee norm %.3g, scale %.6g', iteration, after,
                              ee, scale)
            if loss.kind is LossKind.HUBER:
                converged = frozen and ee <= ee_tol
            else:
                stalled = abs(before - after) <= self.tol * max(before, 1e-300)
                converged = frozen and (change < self.tol or stalled)

        self.coef_ = coef
        self.scale_ = scale
        self.weights_ = v if loss.kind is not LossKind.LS else np.ones_like(w)
        self.n_iter_ = iteration
        self.converged_ = converged
        self.estimating_norm_ = self._estimating_norm(X, resid, w, scale)
        self.objective_trace_ = trace
        return self

    def predict(self, X):
        """ Predict yhat using model

        Args:
            X (np.ndarray): 2D (n_obs x n_features) design matrix

        Returns:
            np.ndarray: 1D yhat prediction

        """
        return np.dot(X, self.coef_)


def fit_weighted_robust(y, H, w=None, spec=None, maxiter=MAXITER, tol=TOL):
    """ Minimize ``sum_i w_i rho(y_i - H_i' alpha)``

    Rows with zero weight are removed before fitting and never influence the
    result.

    Args:
        y (np.ndarray): response vector
        H (np.ndarray): regressor matrix
        w (np.ndarray, optional): nonnegative observation weights (default 1)
        spec (LossSpec, optional): loss (default Huber with ``l = 1.345``)
        maxiter (int): IRLS iteration limit
        tol (float): coefficient relative-change tolerance

    Returns:
        FitResult: fitted coefficients and diagnostics

    Raises:
        ValueError: shapes disagree or weights are negative / undefined
        RankError: the positively weighted design is rank deficient
        NonConvergenceError: ``maxiter`` reached; carries the last iterate

    """
    y = np.asarray(y, dtype=float)
    H = np.asarray(H, dtype=float)
    if H.ndim == 1:
        H = H[:, None]
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    spec = spec or LossSpec()
    if not (H.shape[0] == y.size == w.size):
        raise ValueError('y, H and w must have the same number of rows '
                         '(%i, %i, %i)' % (y.size, H.shape[0], w.size))
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError('Weights must be finite and nonnegative')

    keep = w > 0
    Hk, yk, wk = H[keep], y[keep], w[keep]
    q = H.shape[1]
    if not (np.all(np.isfinite(Hk)) and np.all(np.isfinite(yk))):
        raise ValueError('Positively weighted rows contain undefined values')
    if Hk.shape[0] < q or \
            np.linalg.matrix_rank(Hk * np.sqrt(wk)[:, None]) < q:
        raise RankError('Weighted design with %i rows is rank deficient for '
                        '%i regressors' % (Hk.shape[0], q))

    model = RLM(loss=spec, maxiter=maxiter, tol=tol).fit(Hk, yk, wk)

    irls = np.zeros_like(w)
    irls[keep] = model.weights_
    result = FitResult(coefficients=model.coef_, scale=model.scale_,
                       weights=w.copy(), irls_weights=irls,
                       iterations=model.n_iter_, converged=model.converged_,
                       estimating_norm=model.estimating_norm_,
                       objective_trace=model.objective_trace_)
    if not result.converged:
        raise NonConvergenceError(
            '%s fit did not converge in %i iterations (ee norm %.3g)'
            % (spec.kind.value, maxiter, result.estimating_norm), result)
    logger.debug('%s fit converged in %i iterations (scale %.4g)',
                 spec.kind.value, result.iterations, result.scale)
    return result
