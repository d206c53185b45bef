""" Conventional multiple imputation under jump-to-reference

1. Fit sequential least-squares regressions on the control arm.
2. For each imputation, draw the regression parameters from their
   flat-prior posterior (or reuse the estimates when ``proper`` is off) and
   impute every missing outcome as conditional mean plus normal noise,
   visit by visit with completed histories.
3. Fit the least-squares working model on each imputed dataset.
4. Combine with Rubin's rule.
"""
from dataclasses import dataclass
from functools import partial
import logging

import numpy as np
import scipy.linalg
import scipy.stats

from ..errors import (DegenerateNoiseError, InsufficientDataError, RankError,
                      SchemaError)
from ..regression.robust_loss import LossSpec
from ..trial_data import CompletedDataset
from ..utils import parallel_map, rng_for
from .ate_analysis import (ModelForm, analysis_influence, ate, fit_analysis,
                           influence_variance)

logger = logging.getLogger('robj2r')


@dataclass(frozen=True)
class MiConfig(object):
    """ Multiple-imputation settings

    Attributes:
        M (int): number of imputations, at least 2
        seed (int): root seed; imputation ``m`` draws from ``(seed, m)``
        proper (bool): draw parameters from their posterior
        form (ModelForm): working-model form
        n_jobs (int): joblib workers over imputations
    """
    M: int = 10
    seed: int = 0
    proper: bool = True
    form: ModelForm = ModelForm.INTERACTION
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'form', ModelForm(self.form))
        if self.M < 2:
            raise ValueError('Multiple imputation needs M >= 2 (got %i)'
                             % self.M)

    def point_estimate(self, d):
        return run_mi(d, self).tau_mi

    def to_dict(self):
        return {'M': self.M, 'seed': self.seed, 'proper': self.proper,
                'form': self.form.value}


@dataclass
class MiResult(object):
    """ Rubin-combined multiple-imputation estimate """
    tau_mi: float
    rubin_variance: float
    within_variance: float
    between_variance: float
    taus: np.ndarray
    within: np.ndarray

    @property
    def M(self):
        return self.taus.size

    def to_dict(self):
        return {'tau_mi': self.tau_mi, 'rubin_variance': self.rubin_variance,
                'within_variance': self.within_variance,
                'between_variance': self.between_variance,
                'taus': self.taus.tolist()}


@dataclass
class _LsVisit(object):
    visit: int
    alpha: np.ndarray
    rss: float
    dof: int
    cov_chol: np.ndarray

    @property
    def sigma2(self):
        return self.rss / self.dof


def fit_ls_sequence(d):
    """ Sequential least-squares fits of ``Y_s`` on ``H_{s-1}`` (control)
    """
    visits = []
    for s in range(1, d.t + 1):
        rows = np.flatnonzero((d.treatment == 0) & d.observed[:, s - 1])
        H = d.history_matrix(s - 1, rows)
        y = d.outcomes[rows, s - 1]
        q = H.shape[1]
        if rows.size <= q:
            raise InsufficientDataError(
                'Visit %i has %i observed control subjects; more than %i '
                'are needed for a residual variance' % (s, rows.size, q),
                visit=s)
        if np.linalg.matrix_rank(H) < q:
            raise RankError('Control regressors at visit %i are rank '
                            'deficient' % s)
        alpha, _, _, _ = np.linalg.lstsq(H, y, rcond=None)
        rss = float(np.sum((y - H.dot(alpha)) ** 2))
        xtx_inv = scipy.linalg.inv(H.T.dot(H))
        chol = scipy.linalg.cholesky(xtx_inv, lower=True)
        visits.append(_LsVisit(s, alpha, rss, rows.size - q, chol))
    return visits


def _impute_once(m, d, visits, cfg):
    """ One stochastic imputation followed by the LS analysis """
    rng = rng_for(cfg.seed, m)
    Y = np.array(d.outcomes, copy=True)
    for v in visits:
        s = v.visit
        if cfg.proper:
            sigma2 = v.rss / scipy.stats.chi2.rvs(v.dof, random_state=rng)
            alpha = v.alpha + np.sqrt(sigma2) * v.cov_chol.dot(
                rng.standard_normal(v.alpha.size))
        else:
            sigma2, alpha = v.sigma2, v.alpha
        missing = ~d.observed[:, s - 1]
        if not missing.any():
            continue
        if not v.rss > 0:
            raise DegenerateNoiseError('Zero residual variance in the '
                                       'visit %i imputation model' % s)
        H = np.hstack((d.baseline, Y[:, :s - 1]))[missing]
        Y[missing, s - 1] = (H.dot(alpha) + np.sqrt(sigma2) *
                             rng.standard_normal(int(missing.sum())))

    c = CompletedDataset(d, Y)
    wm = fit_analysis(c, cfg.form, LossSpec.least_squares())
    within = influence_variance(analysis_influence(
        wm, Y[:, -1], d.treatment, d.baseline))
    return ate(wm, c), within


def run_mi(d, cfg=None):
    """ Multiple imputation with Rubin's rule

    Args:
        d (TrialDataset): trial data with both arms
        cfg (MiConfig, optional): settings

    Returns:
        MiResult: combined estimate

    Raises:
        SchemaError: an arm is empty
        InsufficientDataError: a control regression is not estimable
        DegenerateNoiseError: zero residual variance where imputation is
            needed

    """
    cfg = cfg or MiConfig()
    if not d.has_both_arms():
        raise SchemaError('Multiple imputation of a treatment effect needs '
                          'subjects in both arms')
    visits = fit_ls_sequence(d)
    func = partial(_impute_once, d=d, visits=visits, cfg=cfg)
    results = parallel_map(func, range(cfg.M), n_jobs=cfg.n_jobs)
    taus = np.array([r[0] for r in results])
    within = np.array([r[1] for r in results])

    between = float(np.var(taus, ddof=1))
    mean_within = float(np.mean(within))
    rubin = mean_within + (1.0 + 1.0 / cfg.M) * between
    logger.debug('MI: tau=%.5g, within=%.4g, between=%.4g', taus.mean(),
                 mean_within, between)
    return MiResult(float(np.mean(taus)), rubin, mean_within, between,
                    taus, within)
