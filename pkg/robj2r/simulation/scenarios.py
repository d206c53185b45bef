""" Simulation scenarios: data generation, dropout and outlier injection

Two arms, two baseline covariates (``X1 ~ N(0, 1)``, ``X2 ~ Bernoulli(0.3)``)
and five visits generated sequentially from arm-specific linear
regressions on the history. From visit 2 on, a subject still in the study
drops out with probability ``expit(phi1_a + phi2_a Y_{s-1})``.
"""
from dataclasses import dataclass, replace
import enum
import logging

import numpy as np
from scipy.special import expit

from ..errors import InsufficientCompletersError
from ..trial_data import TrialDataset

logger = logging.getLogger('robj2r')

# Regression coefficients of Y_s on (1, X1, X2, Y_1, ..., Y_{s-1})
CONTROL_COEFS = (
    (0.5, 1.0, -0.2),
    (0.4, 0.14, 0.52, 0.01),
    (0.77, 0.02, 0.06, 0.71, 0.84),
    (1.44, -0.45, -0.24, -0.50, -0.39, 0.53),
    (4.37, -0.84, -0.31, 0.01, 0.35, -0.32, 0.81),
)
TREATMENT_COEFS = (
    (0.5, 1.0, -0.2),
    (1.79, 0.35, -0.05, 0.33),
    (2.52, 1.16, -0.51, -1.53, 0.46),
    (2.72, -0.46, -0.06, 0.91, 0.19, 0.70),
    (4.21, -0.02, -1.26, 0.24, -0.18, 0.65, 0.13),
)
SIGMA = (2.0, 1.8, 2.0, 2.1, 2.2)
X2_PROB = 0.3
T_DOF = 5

#: (phi1 control, phi1 treatment, phi2 control, phi2 treatment)
PHI_H1 = (-3.5, -3.6, 0.2, 0.2)
PHI_H0 = (-3.5, -3.5, 0.2, 0.2)

OUTLIER_TOP = 30
OUTLIER_PICK = 10
OUTLIER_FACTOR = 3.0


class ErrorFamily(str, enum.Enum):
    NORMAL = 'normal'
    #: Student t with 5 degrees of freedom rescaled to standard deviation
    #: ``sigma_k``
    T5 = 't5'


class Hypothesis(str, enum.Enum):
    #: both arms share the control coefficients
    H0 = 'H0'
    H1 = 'H1'


class OutlierMode(str, enum.Enum):
    NONE = 'none'
    BOTH = 'both'
    CONTROL = 'control'
    TREATMENT = 'treatment'

    @property
    def arms(self):
        return {'none': (), 'both': (0, 1), 'control': (0,),
                'treatment': (1,)}[self.value]


#: Reference values of the treatment effect under J2R
CAPTION_TRUTH = {
    (ErrorFamily.NORMAL, Hypothesis.H1): 0.7118,
    (ErrorFamily.T5, Hypothesis.H1): 0.6809,
    (ErrorFamily.NORMAL, Hypothesis.H0): 0.0,
    (ErrorFamily.T5, Hypothesis.H0): 0.0,
}


@dataclass(frozen=True)
class Scenario(object):
    """ One data-generating configuration

    Attributes:
        name (str): label used in reports
        errors (ErrorFamily): error distribution
        hypothesis (Hypothesis): H1 arm-specific or H0 shared coefficients
        outliers (OutlierMode): arms receiving injected outliers
        n_per_arm (int): subjects per arm
        phi (tuple): dropout parameters, see ``PHI_H1``
        sigma (tuple): error standard deviation per visit
        truth (float): true treatment effect used for bias and coverage
    """
    name: str = 'normal-h1'
    errors: ErrorFamily = ErrorFamily.NORMAL
    hypothesis: Hypothesis = Hypothesis.H1
    outliers: OutlierMode = OutlierMode.NONE
    n_per_arm: int = 500
    phi: tuple = None
    sigma: tuple = SIGMA
    truth: float = None

    def __post_init__(self):
        object.__setattr__(self, 'errors', ErrorFamily(self.errors))
        hypothesis = getattr(self.hypothesis, 'value', self.hypothesis)
        object.__setattr__(self, 'hypothesis',
                           Hypothesis(str(hypothesis).upper()))
        object.__setattr__(self, 'outliers', OutlierMode(self.outliers))
        if self.phi is None:
            object.__setattr__(self, 'phi',
                               PHI_H0 if self.hypothesis is Hypothesis.H0
                               else PHI_H1)
        object.__setattr__(self, 'phi', tuple(float(v) for v in self.phi))
        object.__setattr__(self, 'sigma',
                           tuple(float(v) for v in self.sigma))
        if self.truth is None:
            object.__setattr__(self, 'truth',
                               CAPTION_TRUTH[(self.errors, self.hypothesis)])
        if len(self.phi) != 4:
            raise ValueError('phi needs 4 values (got %i)' % len(self.phi))
        if len(self.sigma) != len(CONTROL_COEFS):
            raise ValueError('sigma needs %i values (got %i)'
                             % (len(CONTROL_COEFS), len(self.sigma)))
        if any(s <= 0 for s in self.sigma):
            raise ValueError('sigma values must be positive')
        if self.n_per_arm < 1:
            raise ValueError('n_per_arm must be positive')

    def coefficients(self, arm):
        """ Generating coefficients per visit for ``arm`` """
        table = (TREATMENT_COEFS if arm == 1 and
                 self.hypothesis is Hypothesis.H1 else CONTROL_COEFS)
        return [np.asarray(c) for c in table]

    def dropout_parameters(self, arm):
        return self.phi[arm], self.phi[2 + arm]

    def with_outliers(self, mode, name=None):
        return replace(self, outliers=OutlierMode(mode),
                       name=name or self.name)

    def to_dict(self):
        return {'name': self.name, 'errors': self.errors.value,
                'hypothesis': self.hypothesis.value,
                'outliers': self.outliers.value,
                'n_per_arm': self.n_per_arm, 'phi': list(self.phi),
                'sigma': list(self.sigma), 'truth': self.truth}


BUILTIN_SCENARIOS = {
    sc.name: sc for sc in (
        Scenario('normal-h1'),
        Scenario('normal-h1-outliers', outliers='both'),
        Scenario('normal-h1-outliers-control', outliers='control'),
        Scenario('normal-h1-outliers-treatment', outliers='treatment'),
        Scenario('t5-h1', errors='t5'),
        Scenario('normal-h0', hypothesis='H0'),
        Scenario('normal-h0-outliers', hypothesis='H0', outliers='both'),
        Scenario('t5-h0', errors='t5', hypothesis='H0'),
    )
}


def get_scenario(name):
    """ Built-in scenario by name

    Raises:
        KeyError: unknown name
    """
    try:
        return BUILTIN_SCENARIOS[name]
    except KeyError:
        raise KeyError('Unknown scenario "%s" (available: %s)'
                       % (name, ', '.join(sorted(BUILTIN_SCENARIOS))))


# GENERATION
def _draw_errors(sc, rng, n, k):
    if sc.errors is ErrorFamily.NORMAL:
        return rng.normal(0.0, sc.sigma[k], size=n)
    scale = np.sqrt((T_DOF - 2.0) / T_DOF) * sc.sigma[k]
    return scale * rng.standard_t(T_DOF, size=n)


def simulate_arm(sc, arm, n, rng, jump_to_reference=False):
    """ Simulate one arm's covariates, full outcomes and observation flags

    Args:
        sc (Scenario): scenario
        arm (int): 0 control, 1 treatment
        n (int): subjects
        rng (np.random.Generator): random stream
        jump_to_reference (bool): after dropout, continue the trajectory
            with the control-arm regressions

    Returns:
        tuple: (covariates ``(n, 2)``, outcomes ``(n, t)``, observed
        ``(n, t)``); outcomes are generated at every visit

    """
    X = np.column_stack((np.ones(n), rng.standard_normal(n),
                         rng.binomial(1, X2_PROB, size=n)))
    coefs = sc.coefficients(arm)
    reference = sc.coefficients(0)
    phi1, phi2 = sc.dropout_parameters(arm)
    t = len(coefs)
    Y = np.empty((n, t))
    R = np.ones((n, t), dtype=bool)
    for k in range(t):
        if k > 0:
            drop = rng.random(n) < expit(phi1 + phi2 * Y[:, k - 1])
            R[:, k] = R[:, k - 1] & ~drop
        H = np.hstack((X, Y[:, :k]))
        mean = H.dot(coefs[k])
        if jump_to_reference:
            mean = np.where(R[:, k], mean, H.dot(reference[k]))
        Y[:, k] = mean + _draw_errors(sc, rng, n, k)
    return X[:, 1:], Y, R


def generate(sc, seed):
    """ Simulate a trial for scenario ``sc`` (outliers not injected)

    Args:
        sc (Scenario): scenario
        seed (int or np.random.SeedSequence): random seed

    Returns:
        TrialDataset: control subjects first, then treatment subjects

    """
    rng = np.random.default_rng(seed)
    parts = [simulate_arm(sc, arm, sc.n_per_arm, rng) for arm in (0, 1)]
    X = np.vstack([p[0] for p in parts])
    Y = np.vstack([p[1] for p in parts])
    R = np.vstack([p[2] for p in parts])
    A = np.repeat([0, 1], sc.n_per_arm)
    return TrialDataset.from_arrays(A, X, Y, observed=R,
                                    covariate_names=('x1', 'x2'))


def control_mean(sc):
    """ Exact ``E(Y_t | A = 0)`` by propagating means through the linear
    control regressions
    """
    mean = np.array([1.0, 0.0, X2_PROB])
    for c in sc.coefficients(0):
        mean = np.append(mean, mean.dot(c))
    return float(mean[-1])


def true_ate(sc, n_per_arm=200000, seed=0):
    """ Monte Carlo value of the J2R treatment effect

    Treatment trajectories follow their own arm while observed and the
    control regressions after dropout; the control mean is exact. Under H0
    both arms share the control regressions and the effect is exactly 0.

    Returns:
        float: ``E(Y_t | A = 1) - E(Y_t | A = 0)`` under J2R

    """
    if sc.hypothesis is Hypothesis.H0:
        return 0.0
    rng = np.random.default_rng(seed)
    _, Y, _ = simulate_arm(sc, 1, n_per_arm, rng, jump_to_reference=True)
    return float(Y[:, -1].mean()) - control_mean(sc)


def inject_outliers(d, mode, seed, top=OUTLIER_TOP, pick=OUTLIER_PICK,
                    factor=OUTLIER_FACTOR):
    """ Inflate the outcomes of randomly chosen top completers

    Per targeted arm, ``pick`` subjects drawn without replacement from the
    ``top`` completers with the largest last-visit outcome get all their
    outcomes multiplied by ``factor``.

    Args:
        d (TrialDataset): trial data
        mode (OutlierMode): targeted arms
        seed (int or np.random.SeedSequence): random seed

    Returns:
        TrialDataset: modified copy (``d`` itself for mode ``none``)

    Raises:
        InsufficientCompletersError: a targeted arm has fewer than ``top``
            completers

    """
    mode = OutlierMode(mode)
    if mode is OutlierMode.NONE:
        return d
    rng = np.random.default_rng(seed)
    Y = np.array(d.outcomes, copy=True)
    completers = d.observed.all(axis=1)
    for arm in mode.arms:
        rows = np.flatnonzero((d.treatment == arm) & completers)
        if rows.size < top:
            raise InsufficientCompletersError(
                'Arm %i has %i completers; outlier injection needs %i'
                % (arm, rows.size, top))
        ranked = rows[np.argsort(-Y[rows, -1], kind='stable')][:top]
        chosen = rng.choice(ranked, size=pick, replace=False)
        Y[chosen] *= factor
    return d.with_outcomes(Y)
