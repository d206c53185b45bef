""" Sequential weighted robust regressions and jump-to-reference imputation

At each visit ``s`` a weighted robust regression of ``Y_s`` on the history
``H_{s-1}`` is fitted on control subjects observed at ``s``. Every missing
outcome, in either arm, is then replaced by its control-arm conditional
mean given the progressively completed history.
"""
from dataclasses import dataclass, field
import enum
import logging

import numpy as np

from ..errors import ImputationFitError, InsufficientDataError, J2RError
from ..regression.cross_validation import (DEFAULT_GRID, covariate_weights,
                                           cross_validate_nu)
from ..regression.robust_fit import FitResult, fit_weighted_robust
from ..regression.robust_loss import LossSpec
from ..regression.weights import CovariateWeighting, WeightMode
from ..trial_data import CompletedDataset
from ..utils import int_seed

logger = logging.getLogger('robj2r')

DEFAULT_NU = 10.0


class ImputationStrategy(str, enum.Enum):
    #: every missing outcome imputed from the control-arm model
    J2R = 'j2r'
    #: each arm imputed from a model fitted on its own arm
    MAR = 'mar'


@dataclass(frozen=True)
class NuPolicy(object):
    """ How the covariate-weight tuning constant is chosen at each visit

    Attributes:
        kind (str): ``'fixed'`` or ``'cv'``
        value (float): ``nu`` used when fixed
        grid (tuple): candidates when cross-validated
        folds (int): number of CV folds
        seed (int): root seed of the fold assignment
    """
    kind: str = 'fixed'
    value: float = DEFAULT_NU
    grid: tuple = DEFAULT_GRID
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ('fixed', 'cv'):
            raise ValueError('nu policy must be "fixed" or "cv" (got %r)'
                             % self.kind)
        if not self.value > 0:
            raise ValueError('Fixed nu must be positive (got %r)'
                             % self.value)
        object.__setattr__(self, 'grid', tuple(float(g) for g in self.grid))

    @classmethod
    def fixed(cls, value=DEFAULT_NU):
        return cls('fixed', value=float(value))

    @classmethod
    def cv(cls, grid=DEFAULT_GRID, folds=5, seed=0):
        return cls('cv', grid=tuple(grid), folds=folds, seed=seed)

    @classmethod
    def parse(cls, text, folds=5, seed=0):
        """ Parse ``fixed:<v>`` or ``cv`` """
        text = str(text).strip().lower()
        if text == 'cv':
            return cls.cv(folds=folds, seed=seed)
        if text.startswith('fixed:'):
            try:
                return cls.fixed(float(text.split(':', 1)[1]))
            except ValueError:
                pass
        raise ValueError('nu policy must be "fixed:<value>" or "cv" '
                         '(got "%s")' % text)

    def choose(self, y, H, spec, visit, mode=WeightMode.NORMALIZED):
        if self.kind == 'fixed':
            return self.value
        return cross_validate_nu(y, H, spec, grid=self.grid, K=self.folds,
                                 seed=int_seed(self.seed, visit), mode=mode)

    def to_dict(self):
        if self.kind == 'fixed':
            return {'kind': 'fixed', 'value': self.value}
        return {'kind': 'cv', 'grid': list(self.grid), 'folds': self.folds,
                'seed': self.seed}


@dataclass
class VisitFit(object):
    """ Fitted imputation regression for one visit

    Attributes:
        visit (int): visit ``s`` (1-indexed) whose outcome is the response
        rows (np.ndarray): subject rows used (arm subjects observed at ``s``)
        weights (np.ndarray): covariate weights of those rows
        nu (float): tuning constant used
        weighting (CovariateWeighting): None when ``H_{s-1}`` is only the
            intercept
        fit (FitResult): regression result; ``alpha_{s-1}`` is
            ``fit.coefficients``
    """
    visit: int
    rows: np.ndarray
    weights: np.ndarray
    nu: float
    weighting: CovariateWeighting
    fit: FitResult

    @property
    def alpha(self):
        return self.fit.coefficients

    def summary(self):
        out = {'visit': self.visit, 'n_fit': int(self.rows.size),
               'nu': self.nu, 'min_weight': float(self.weights.min()),
               'coefficients': self.alpha.tolist()}
        out.update(self.fit.summary())
        return out


@dataclass
class ImputationModel(object):
    """ Sequential regression coefficients and derived pattern coefficients

    ``alpha(s)`` is the coefficient vector of length ``p + s - 1`` predicting
    ``Y_s`` from ``H_{s-1}``; ``beta(s)`` predicts ``Y_t`` from ``H_{s-1}``
    for a subject whose first missed visit is ``s``.
    """
    p: int
    t: int
    loss: LossSpec
    visits: list
    arm: int = 0
    weight_mode: WeightMode = WeightMode.NORMALIZED
    betas: list = field(default_factory=list)

    def alpha(self, s):
        return self.visits[s - 1].alpha

    @property
    def alphas(self):
        return [v.alpha for v in self.visits]

    def beta(self, s):
        return self.betas[s - 1]

    def summary(self):
        return {'arm': self.arm, 'loss': self.loss.to_dict(),
                'weight_mode': self.weight_mode.value,
                'visits': [v.summary() for v in self.visits]}


def fit_sequential(d, spec=None, nu_policy=None, arm=0,
                   mode=WeightMode.NORMALIZED):
    """ Fit the weighted robust imputation regression at every visit

    Args:
        d (TrialDataset): trial data
        spec (LossSpec, optional): imputation loss (default Huber)
        nu_policy (NuPolicy, optional): tuning constant policy (default
            fixed ``nu = 10``)
        arm (int): arm whose observed data are fitted (0 for J2R)
        mode (WeightMode): covariate weight form

    Returns:
        ImputationModel: fitted model with ``beta`` populated

    Raises:
        InsufficientDataError: too few ``arm`` subjects observed at a visit
        ImputationFitError: a visit's fit failed

    """
    spec = spec or LossSpec()
    nu_policy = nu_policy or NuPolicy.fixed()
    mode = WeightMode(mode)
    visits = []
    for s in range(1, d.t + 1):
        rows = np.flatnonzero((d.treatment == arm) & d.observed[:, s - 1])
        q = d.p + s - 1
        if rows.size < q:
            raise InsufficientDataError(
                'Visit %i has %i observed subjects in arm %i; at least %i '
                'are needed' % (s, rows.size, arm, q), visit=s)
        H = d.history_matrix(s - 1, rows)
        y = d.outcomes[rows, s - 1]
        try:
            nu = nu_policy.choose(y, H, spec, s, mode)
            w, cw = covariate_weights(H, nu, mode)
            fit = fit_weighted_robust(y, H, w, spec)
        except InsufficientDataError as exc:
            raise InsufficientDataError('Visit %i: %s' % (s, exc), visit=s)
        except J2RError as exc:
            raise ImputationFitError(s, exc) from exc
        logger.debug('Visit %i: fitted %i subjects, nu=%g, scale=%.4g',
                     s, rows.size, nu, fit.scale)
        visits.append(VisitFit(s, rows, w, float(nu), cw, fit))

    model = ImputationModel(d.p, d.t, spec, visits, arm=arm,
                            weight_mode=mode)
    model.betas = [compose_beta(model, s) for s in range(1, d.t + 1)]
    return model


def compose_beta(model, s):
    """ Coefficients predicting ``Y_t`` from ``H_{s-1}``

    ``beta_{t,s-1} = (I, alpha_{s-1}) (I, alpha_s) ... (I, alpha_{t-2})
    alpha_{t-1}``, where ``(I, a)`` appends ``a`` as the last column of an
    identity matrix.

    Args:
        model (ImputationModel): fitted sequential model
        s (int): first missed visit, ``1 <= s <= t``

    Returns:
        np.ndarray: vector of length ``p + s - 1``

    """
    if not 1 <= s <= model.t:
        raise ValueError('Dropout visit must be within [1, %i] (got %i)'
                         % (model.t, s))
    beta = np.array(model.alpha(model.t), copy=True)
    for k in range(model.t - 1, s - 1, -1):
        # (I, alpha_{k-1}) beta == beta[:-1] + alpha_{k-1} * beta[-1]
        beta = beta[:-1] + model.alpha(k) * beta[-1]
    return beta


def impute(d, model, strategy=ImputationStrategy.J2R, arm_models=None):
    """ Replace every missing outcome by its conditional mean

    Imputation is sequential: ``Y*_s = H*_{s-1}' alpha_{s-1}`` uses the
    already completed history. Observed entries are copied unchanged.

    Args:
        d (TrialDataset): trial data
        model (ImputationModel): control-arm model (J2R)
        strategy (ImputationStrategy): J2R or MAR
        arm_models (dict, optional): ``{arm: ImputationModel}`` for MAR

    Returns:
        CompletedDataset: completed data

    """
    strategy = ImputationStrategy(strategy)
    if strategy is ImputationStrategy.MAR:
        if not arm_models or set(arm_models) != {0, 1}:
            raise ValueError('MAR imputation needs a model for each arm')
        models = arm_models
    else:
        models = {0: model, 1: model}
    for m in models.values():
        if (m.p, m.t) != (d.p, d.t):
            raise ValueError('Model shape (p=%i, t=%i) does not match the '
                             'data (p=%i, t=%i)' % (m.p, m.t, d.p, d.t))

    Y = np.array(d.outcomes, copy=True)
    for s in range(1, d.t + 1):
        missing = ~d.observed[:, s - 1]
        if not missing.any():
            continue
        H = np.hstack((d.baseline, Y[:, :s - 1]))
        for arm, m in models.items():
            rows = missing & (d.treatment == arm) \
                if strategy is ImputationStrategy.MAR else missing
            Y[rows, s - 1] = H[rows].dot(m.alpha(s))
            if strategy is ImputationStrategy.J2R:
                break
    return CompletedDataset(d, Y)


def impute_final(d, model):
    """ ``Y*_t`` of every subject in closed form ``H_{s-1}' beta_{t,s-1}``

    Equal (up to rounding) to the last column of :func:`impute` under J2R.
    """
    out = np.array(d.outcomes[:, -1], copy=True)
    for s in range(1, d.t + 1):
        drop = ~d.observed[:, s - 1]
        if s > 1:
            drop &= d.observed[:, s - 2]
        if drop.any():
            out[drop] = d.history_matrix(s - 1, drop).dot(model.beta(s))
    return out
