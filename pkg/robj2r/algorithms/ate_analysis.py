""" Working analysis model, ATE point estimate and its variance

The working model ``mu(A, X) = g(X; gamma0) A + X' gamma1`` is fitted by
minimizing ``sum_i rho(Y*_it - mu_i)`` on the completed data (no covariate
weights). The treatment effect is ``tau = mean_i g(X_i; gamma0)``.

The linearization variance follows the influence-function expansion of
``tau_hat``: the analysis estimating function plus, for every dropout
pattern, the effect of the estimated imputation coefficients propagated
through the ``beta`` recursion.
"""
from dataclasses import dataclass, field
import enum
import logging

import numpy as np

from ..errors import SchemaError, SingularJacobianError, UnsupportedDerivative
from ..regression.robust_fit import FitResult, fit_weighted_robust
from ..regression.robust_loss import LossSpec, psi, psi_prime
from ..regression.weights import WeightMode
from ..trial_data import dropout_patterns
from .bootstrap import bootstrap_variance
from .j2r_imputer import NuPolicy, fit_sequential, impute

logger = logging.getLogger('robj2r')

#: Normal quantile of the reported Wald interval
Z_95 = 1.96


class ModelForm(str, enum.Enum):
    #: ``mu = gamma0 A + X' gamma1``
    MAIN = 'main'
    #: ``mu = A X' gamma0 + X' gamma1``
    INTERACTION = 'interaction'


class VarianceMethod(str, enum.Enum):
    LINEARIZED = 'linearized'
    BOOTSTRAP = 'bootstrap'
    BOTH = 'both'


def design_matrix(form, treatment, baseline):
    """ ``d mu / d gamma`` for every subject, ``(n, d0 + d1)`` """
    A = np.asarray(treatment, dtype=float)
    X = np.asarray(baseline, dtype=float)
    if ModelForm(form) is ModelForm.MAIN:
        return np.column_stack((A, X))
    return np.column_stack((A[:, None] * X, X))


@dataclass
class WorkingModel(object):
    """ Fitted working analysis model

    Attributes:
        form (ModelForm): main effects or treatment-by-covariate interaction
        gamma (np.ndarray): ``(gamma0, gamma1)``
        d0 (int): length of ``gamma0`` (1 or ``p``)
        d1 (int): length of ``gamma1`` (``p``)
        loss (LossSpec): analysis loss
        fit (FitResult): underlying regression fit
    """
    form: ModelForm
    gamma: np.ndarray
    d0: int
    d1: int
    loss: LossSpec
    fit: FitResult = field(repr=False)

    @property
    def gamma0(self):
        return self.gamma[:self.d0]

    @property
    def gamma1(self):
        return self.gamma[self.d0:]

    def summary(self):
        out = {'form': self.form.value, 'loss': self.loss.to_dict(),
               'gamma0': self.gamma0.tolist(),
               'gamma1': self.gamma1.tolist()}
        out.update(self.fit.summary())
        return out


def fit_analysis(c, form=ModelForm.INTERACTION, spec=None):
    """ Fit the working model to the last-visit completed outcomes

    Args:
        c (CompletedDataset): completed data
        form (ModelForm): working-model form
        spec (LossSpec, optional): analysis loss (default Huber)

    Returns:
        WorkingModel: fitted model

    Raises:
        RankError: design not of full rank (e.g. an empty arm)
        NonConvergenceError: IRLS did not converge

    """
    form = ModelForm(form)
    spec = spec or LossSpec()
    D = design_matrix(form, c.treatment, c.baseline)
    fit = fit_weighted_robust(c.outcomes[:, -1], D, None, spec)
    d0 = 1 if form is ModelForm.MAIN else c.p
    return WorkingModel(form, fit.coefficients, d0, c.p, spec, fit)


def ate(wm, c):
    """ ``tau_hat = n^-1 sum_i g(X_i; gamma0_hat)`` """
    if wm.form is ModelForm.MAIN:
        return float(wm.gamma0[0])
    return float(c.baseline.mean(axis=0).dot(wm.gamma0))


# INFLUENCE FUNCTIONS
@dataclass
class InfluenceDecomposition(object):
    """ Per-subject influence values and the intermediates producing them

    Attributes:
        v_tau (np.ndarray): ``(n,)`` influence values of ``tau_hat``
        v_gamma (np.ndarray): ``(n, d0 + d1)`` influence values of
            ``gamma_hat``
        q (list): per visit ``s``, ``(n, p + s - 1)`` influence of
            ``alpha_{s-1}`` (zero outside its fitting rows)
        u (list): per visit ``s``, ``(n, p + s - 1)`` influence of
            ``beta_{t,s-1}``
        correction (list): per visit ``s``, ``(d0 + d1, p + s - 1)`` matrix
            multiplying ``u`` (subjects first missing at ``s``)
        d_phi (np.ndarray): analysis Jacobian ``n^-1 sum psi'(e) D D'``
        psi (np.ndarray): ``psi(e_i)`` of the analysis residuals
        psi_prime (np.ndarray): ``psi'(e_i)``
        patterns (np.ndarray): ``(n, t)`` indicators ``R_{s-1} (1 - R_s)``
        mu_x (np.ndarray): overall covariate mean (interaction model)
    """
    v_tau: np.ndarray
    v_gamma: np.ndarray
    q: list
    u: list
    correction: list
    d_phi: np.ndarray
    psi: np.ndarray
    psi_prime: np.ndarray
    patterns: np.ndarray
    mu_x: np.ndarray

    @property
    def variance(self):
        return influence_variance(self.v_tau)


def _require_linearizable(*specs):
    for spec in specs:
        if not spec.supports_linearization:
            raise UnsupportedDerivative(
                'Linearized variance needs least-squares or Huber losses '
                '(got %s); use the bootstrap' % spec.kind.value)


def _solve(J, B, what):
    """ ``J^-1 B`` raising SingularJacobianError for singular ``J`` """
    if not np.all(np.isfinite(J)) or \
            np.linalg.cond(J) > 1.0 / np.finfo(float).eps:
        raise SingularJacobianError('%s Jacobian is singular' % what)
    try:
        return np.linalg.solve(J, B)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobianError('%s Jacobian is singular: %s'
                                    % (what, exc))


def _analysis_terms(wm, y, treatment, baseline, spec):
    D = design_matrix(wm.form, treatment, baseline)
    e = y - D.dot(wm.gamma)
    ps = psi(spec, e, wm.fit.scale)
    pp = psi_prime(spec, e, wm.fit.scale)
    d_phi = (D * pp[:, None]).T.dot(D) / y.size
    return D, ps, pp, d_phi


def _project(wm, v_gamma, baseline):
    if wm.form is ModelForm.MAIN:
        return v_gamma[:, 0], baseline.mean(axis=0)
    mu_x = baseline.mean(axis=0)
    v_tau = (baseline - mu_x).dot(wm.gamma0) + v_gamma[:, :wm.d0].dot(mu_x)
    return v_tau, mu_x


def analysis_influence(wm, y, treatment, baseline, spec=None):
    """ Influence values of ``tau_hat`` treating ``y`` as fully observed

    Args:
        wm (WorkingModel): fitted working model
        y (np.ndarray): last-visit outcomes the model was fitted to
        treatment (np.ndarray): treatment indicators
        baseline (np.ndarray): baseline covariates with intercept

    Returns:
        np.ndarray: ``(n,)`` influence values; their empirical variance
        divided by ``n`` is the sandwich variance of ``tau_hat``

    """
    spec = spec or wm.loss
    _require_linearizable(spec)
    D, ps, _, d_phi = _analysis_terms(wm, np.asarray(y, dtype=float),
                                      treatment, baseline, spec)
    v_gamma = _solve(d_phi, (D * ps[:, None]).T, 'Analysis').T
    return _project(wm, v_gamma, np.asarray(baseline, dtype=float))[0]


def influence_variance(v_tau):
    """ ``n^-2 sum (V_i - V_bar)^2`` """
    v_tau = np.asarray(v_tau, dtype=float)
    return float(np.sum((v_tau - v_tau.mean()) ** 2) / v_tau.size ** 2)


def linearized_variance(d, model, wm, spec=None, completed=None):
    """ Plug-in linearization variance of ``tau_hat``

    Args:
        d (TrialDataset): trial data
        model (ImputationModel): fitted control-arm imputation model
        wm (WorkingModel): working model fitted to ``impute(d, model)``
        spec (LossSpec, optional): analysis loss (default ``wm.loss``)
        completed (CompletedDataset, optional): ``impute(d, model)`` if
            already available

    Returns:
        tuple: (variance, InfluenceDecomposition)

    Raises:
        UnsupportedDerivative: a loss without ``psi'``
        SingularJacobianError: an estimating-equation Jacobian is singular

    """
    spec = spec or wm.loss
    _require_linearizable(model.loss, spec)
    c = completed if completed is not None else impute(d, model)
    n, t = d.n, d.t

    D, ps, pp, d_phi = _analysis_terms(wm, c.outcomes[:, -1], d.treatment,
                                       d.baseline, spec)

    # Influence of each alpha_{s-1}: J^-1 w psi(r) H on its fitting rows
    q = []
    for k, vf in enumerate(model.visits):
        H = d.history_matrix(k, vf.rows)
        r = d.outcomes[vf.rows, k] - H.dot(vf.alpha)
        wps = vf.weights * psi(model.loss, r, vf.fit.scale)
        wpp = vf.weights * psi_prime(model.loss, r, vf.fit.scale)
        J = (H * wpp[:, None]).T.dot(H) / n
        qk = np.zeros((n, H.shape[1]))
        qk[vf.rows] = _solve(J, (H * wps[:, None]).T,
                             'Imputation (visit %i)' % vf.visit).T
        q.append(qk)

    # Influence of beta_{t,k}, from U_{t,t-1} = q_{t-1} downward
    u = [None] * t
    u[t - 1] = q[t - 1]
    for k in range(t - 2, -1, -1):
        nxt = u[k + 1]
        u[k] = (nxt[:, :-1] + np.outer(nxt[:, -1], model.visits[k].alpha) +
                model.betas[k + 1][-1] * q[k])

    # Subjects first missing at visit k + 1 borrow H_k' beta_{t,k}
    prev = np.column_stack((np.ones(n, dtype=bool), d.observed[:, :-1]))
    patterns = prev & ~d.observed
    correction = []
    total = D * ps[:, None]
    for k in range(t):
        rows = patterns[:, k]
        Hk = d.history_matrix(k, rows)
        Ck = (D[rows] * pp[rows, None]).T.dot(Hk) / n
        correction.append(Ck)
        if rows.any():
            total = total + u[k].dot(Ck.T)

    v_gamma = _solve(d_phi, total.T, 'Analysis').T
    v_tau, mu_x = _project(wm, v_gamma, d.baseline)

    decomposition = InfluenceDecomposition(
        v_tau=v_tau, v_gamma=v_gamma, q=q, u=u, correction=correction,
        d_phi=d_phi, psi=ps, psi_prime=pp, patterns=patterns, mu_x=mu_x)
    return decomposition.variance, decomposition


# PIPELINE
@dataclass(frozen=True)
class PipelineConfig(object):
    """ One configuration of the impute-then-analyze estimator

    Attributes:
        imputation_loss (LossSpec): loss of the sequential regressions
        analysis_loss (LossSpec): loss of the working model
        form (ModelForm): working-model form
        nu_policy (NuPolicy): covariate-weight tuning
        weight_mode (WeightMode): covariate weight form
    """
    imputation_loss: LossSpec = field(default_factory=LossSpec)
    analysis_loss: LossSpec = field(default_factory=LossSpec)
    form: ModelForm = ModelForm.INTERACTION
    nu_policy: NuPolicy = field(default_factory=NuPolicy)
    weight_mode: WeightMode = WeightMode.NORMALIZED

    def __post_init__(self):
        object.__setattr__(self, 'form', ModelForm(self.form))
        object.__setattr__(self, 'weight_mode', WeightMode(self.weight_mode))

    @classmethod
    def robust(cls, **kwargs):
        """ Weighted Huber imputation, Huber analysis """
        return cls(LossSpec.huber(), LossSpec.huber(), **kwargs)

    @classmethod
    def lse(cls, **kwargs):
        """ Weighted Huber imputation, least-squares analysis """
        return cls(LossSpec.huber(), LossSpec.least_squares(), **kwargs)

    def fit(self, d):
        """ Run imputation and analysis

        Returns:
            tuple: (ImputationModel, CompletedDataset, WorkingModel)

        """
        model = fit_sequential(d, self.imputation_loss, self.nu_policy,
                               mode=self.weight_mode)
        c = impute(d, model)
        wm = fit_analysis(c, self.form, self.analysis_loss)
        return model, c, wm

    def point_estimate(self, d):
        _, c, wm = self.fit(d)
        return ate(wm, c)

    def to_dict(self):
        return {'imputation_loss': self.imputation_loss.to_dict(),
                'analysis_loss': self.analysis_loss.to_dict(),
                'form': self.form.value,
                'nu_policy': self.nu_policy.to_dict(),
                'weight_mode': self.weight_mode.value}


@dataclass
class AteEstimate(object):
    """ ATE point estimate with variance(s) and Wald interval

    ``ci95`` uses the linearized variance when available, the bootstrap
    variance otherwise.
    """
    tau_hat: float
    var_linearized: float = None
    var_bootstrap: float = None
    ci95: tuple = (float('nan'), float('nan'))
    loss: LossSpec = None
    form: ModelForm = ModelForm.INTERACTION
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ('var_linearized', 'var_bootstrap'):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError('%s must be nonnegative (got %r)'
                                 % (name, v))
        v = self.variance
        if v is not None:
            half = Z_95 * np.sqrt(v)
            self.ci95 = (self.tau_hat - half, self.tau_hat + half)

    @property
    def variance_method(self):
        if self.var_linearized is not None:
            return VarianceMethod.LINEARIZED
        if self.var_bootstrap is not None:
            return VarianceMethod.BOOTSTRAP
        return None

    @property
    def variance(self):
        if self.var_linearized is not None:
            return self.var_linearized
        return self.var_bootstrap

    def to_dict(self):
        method = self.variance_method
        return {'tau_hat': self.tau_hat,
                'var_linearized': self.var_linearized,
                'var_bootstrap': self.var_bootstrap,
                'ci95': list(self.ci95),
                'ci_variance': None if method is None else method.value,
                'loss': None if self.loss is None else self.loss.to_dict(),
                'form': ModelForm(self.form).value,
                'diagnostics': self.diagnostics}


def estimate_ate(d, config=None, variance=VarianceMethod.LINEARIZED, B=200,
                 seed=0, n_jobs=1):
    """ Impute, analyze and compute the requested variance(s)

    Args:
        d (TrialDataset): trial data with both arms present
        config (PipelineConfig, optional): estimator (default Robust)
        variance (VarianceMethod): which variance(s) to compute
        B (int): bootstrap replicates
        seed (int): bootstrap seed
        n_jobs (int): bootstrap workers

    Returns:
        AteEstimate: estimate with diagnostics

    """
    config = config or PipelineConfig.robust()
    variance = VarianceMethod(variance)
    if not d.has_both_arms():
        raise SchemaError('Estimating a treatment effect needs subjects in '
                          'both arms')
    logger.info('Estimating ATE on %i subjects (%i visits) with %s '
                'imputation and %s analysis', d.n, d.t,
                config.imputation_loss.kind.value,
                config.analysis_loss.kind.value)
    model, c, wm = config.fit(d)
    tau = ate(wm, c)

    var_lin = var_boot = None
    diagnostics = {
        'n_per_arm': {str(a): int(np.sum(d.treatment == a)) for a in (0, 1)},
        'arm_means': {str(a): m for a, m in c.arm_means().items()},
        'dropout_patterns': {str(s): int(k) for s, k in zip(
            *np.unique(dropout_patterns(d), return_counts=True))},
        'imputation': model.summary(),
        'analysis': wm.summary(),
    }
    if variance in (VarianceMethod.LINEARIZED, VarianceMethod.BOTH):
        var_lin, infl = linearized_variance(d, model, wm, completed=c)
        diagnostics['influence_mean'] = float(infl.v_tau.mean())
    if variance in (VarianceMethod.BOOTSTRAP, VarianceMethod.BOTH):
        var_boot = bootstrap_variance(d, config, B=B, seed=seed,
                                      n_jobs=n_jobs)
    return AteEstimate(tau, var_linearized=var_lin, var_bootstrap=var_boot,
                       loss=config.analysis_loss, form=config.form,
                       diagnostics=diagnostics)
