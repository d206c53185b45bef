""" Monte Carlo comparison of the MI, LSE and Robust estimators

Each replicate generates a trial, injects outliers, then runs every method
on the same data. Replicate ``r`` draws from seeds derived from
``(seed, r, stream)`` so results do not depend on the number of workers.
"""
from dataclasses import dataclass, field
import enum
from functools import partial
import logging

import numpy as np
import pandas as pd

from ..algorithms.ate_analysis import (ModelForm, PipelineConfig,
                                       VarianceMethod, Z_95, estimate_ate)
from ..algorithms.bootstrap import bootstrap_variance
from ..algorithms.j2r_imputer import DEFAULT_NU, NuPolicy
from ..algorithms.mi_baseline import MiConfig, run_mi
from ..errors import J2RError, McInstabilityError
from ..utils import int_seed, parallel_map, seed_sequence
from .scenarios import generate, inject_outliers, true_ate

logger = logging.getLogger('robj2r')

MAX_FAILURE_RATE = 0.02

# Seed streams within a replicate
_DATA, _OUTLIERS, _MI, _BOOTSTRAP = range(4)


class Method(str, enum.Enum):
    #: LS imputation models, proper MI, LS analysis, Rubin variance
    MI = 'MI'
    #: weighted Huber imputation, LS analysis, linearized variance
    LSE = 'LSE'
    #: weighted Huber imputation, Huber analysis, linearized variance
    ROBUST = 'Robust'

    @classmethod
    def parse(cls, text):
        for m in cls:
            if m.value.lower() == str(text).strip().lower():
                return m
        raise ValueError('Unknown method "%s" (choose from %s)'
                         % (text, ', '.join(m.value for m in cls)))


DEFAULT_METHODS = (Method.MI, Method.LSE, Method.ROBUST)


def method_estimator(method, M=10, seed=0, form=ModelForm.INTERACTION,
                     nu=DEFAULT_NU):
    """ Estimator object (with ``point_estimate``) for ``method`` """
    method = Method(method)
    if method is Method.MI:
        return MiConfig(M=M, seed=seed, form=form)
    preset = (PipelineConfig.lse if method is Method.LSE
              else PipelineConfig.robust)
    return preset(form=form, nu_policy=NuPolicy.fixed(nu))


def _run_method(d, method, r, M, seed):
    estimator = method_estimator(method, M=M, seed=int_seed(seed, r, _MI))
    if method is Method.MI:
        result = run_mi(d, estimator)
        return estimator, result.tau_mi, result.rubin_variance
    est = estimate_ate(d, estimator, variance=VarianceMethod.LINEARIZED)
    return estimator, est.tau_hat, est.var_linearized


def run_replicate(r, sc, methods=DEFAULT_METHODS, B=0, M=10, seed=0):
    """ Records of every method on replicate ``r``

    A failed bootstrap keeps the point estimate and its analytic variance;
    only ``var_bootstrap`` is missing and ``bootstrap_error`` is set.

    Returns:
        list: one dict per method with ``tau_hat``, ``var_estimate``,
        ``var_bootstrap``, ``error`` and ``bootstrap_error`` (exception
        class names or None)

    """
    records = []
    try:
        d = generate(sc, seed_sequence(seed, r, _DATA))
        d = inject_outliers(d, sc.outliers, seed_sequence(seed, r, _OUTLIERS))
    except J2RError as exc:
        logger.warning('Replicate %i: data generation failed: %s', r, exc)
        return [_record(r, m, error=exc) for m in methods]

    for method in methods:
        method = Method(method)
        try:
            estimator, tau, var = _run_method(d, method, r, M, seed)
        except J2RError as exc:
            logger.warning('Replicate %i: %s failed: %s', r, method.value,
                           exc)
            records.append(_record(r, method, error=exc))
            continue

        var_boot, boot_error = None, None
        if B:
            try:
                var_boot = bootstrap_variance(
                    d, estimator, B=B, seed=int_seed(seed, r, _BOOTSTRAP))
            except J2RError as exc:
                logger.warning('Replicate %i: %s bootstrap failed: %s', r,
                               method.value, exc)
                boot_error = exc
        records.append(_record(r, method, tau, var, var_boot,
                               bootstrap_error=boot_error))
    return records


def _record(r, method, tau=np.nan, var=np.nan, var_boot=None, error=None,
            bootstrap_error=None):
    return {'replicate': r, 'method': Method(method).value,
            'tau_hat': float(tau), 'var_estimate': float(var),
            'var_bootstrap': np.nan if var_boot is None else float(var_boot),
            'error': None if error is None else type(error).__name__,
            'bootstrap_error': (None if bootstrap_error is None
                                else type(bootstrap_error).__name__)}


# SUMMARIES
@dataclass
class MethodSummary(object):
    """ Monte Carlo metrics of one method

    ``mc_variance`` is the population variance (``ddof=0``) of the point
    estimates, so ``rmse ** 2 == bias ** 2 + mc_variance`` holds exactly.
    Rejection is ``|tau_hat| > 1.96 sd``: type-1 error under H0 and power
    under H1. Bootstrap metrics use the replicates whose bootstrap
    succeeded; ``bootstrap_failures`` counts the others.
    """
    method: str
    n_ok: int
    failures: int
    mean_tau: float
    bias: float
    mc_variance: float
    rmse: float
    mean_var_estimate: float
    rel_bias_var: float
    coverage: float
    rejection: float
    mean_var_bootstrap: float = float('nan')
    rel_bias_bootstrap: float = float('nan')
    coverage_bootstrap: float = float('nan')
    rejection_bootstrap: float = float('nan')
    bootstrap_failures: int = 0

    def to_dict(self):
        return dict(self.__dict__)


def _interval_metrics(tau, var, truth):
    sd = np.sqrt(var)
    return (float(np.mean(np.abs(tau - truth) <= Z_95 * sd)),
            float(np.mean(np.abs(tau) > Z_95 * sd)))


def summarize_method(records, method, truth):
    """ Aggregate successful replicate records of ``method`` """
    frame = records[records['method'] == Method(method).value]
    ok = frame[frame['error'].isna()]
    tau = ok['tau_hat'].to_numpy()
    var = ok['var_estimate'].to_numpy()
    n_ok = tau.size
    failures = int(len(frame) - n_ok)
    if n_ok == 0:
        nan = float('nan')
        return MethodSummary(Method(method).value, 0, failures, nan, nan,
                             nan, nan, nan, nan, nan, nan)

    mean_tau = float(tau.mean())
    mc_var = float(np.var(tau, ddof=0))
    rmse = float(np.sqrt(np.mean((tau - truth) ** 2)))
    mean_var = float(var.mean())
    coverage, rejection = _interval_metrics(tau, var, truth)
    summary = MethodSummary(
        Method(method).value, n_ok, failures, mean_tau, mean_tau - truth,
        mc_var, rmse, mean_var, _relative(mean_var, mc_var), coverage,
        rejection)

    if 'bootstrap_error' in ok:
        summary.bootstrap_failures = int(ok['bootstrap_error'].notna().sum())
    var_boot = ok['var_bootstrap'].to_numpy()
    boot_ok = np.isfinite(var_boot)
    if boot_ok.any():
        summary.mean_var_bootstrap = float(var_boot[boot_ok].mean())
        summary.rel_bias_bootstrap = _relative(summary.mean_var_bootstrap,
                                               mc_var)
        summary.coverage_bootstrap, summary.rejection_bootstrap = \
            _interval_metrics(tau[boot_ok], var_boot[boot_ok], truth)
    return summary


def _relative(estimate, target):
    return (estimate - target) / target if target > 0 else float('nan')


@dataclass
class McReport(object):
    """ Monte Carlo results of one scenario

    Metrics are scored against ``truth``: the oracle J2R effect when it was
    computed, the scenario's reference value otherwise.

    Attributes:
        scenario (Scenario): simulated scenario
        reps (int): replicates run
        seed (int): root seed
        B (int): bootstrap replicates per estimate (0 for none)
        M (int): imputations of the MI method
        summaries (dict): ``{method name: MethodSummary}``
        records (pd.DataFrame): one row per replicate and method
        oracle_truth (float): Monte Carlo J2R truth, when computed
    """
    scenario: object
    reps: int
    seed: int
    B: int
    M: int
    summaries: dict
    records: pd.DataFrame = field(repr=False)
    oracle_truth: float = None

    @property
    def truth(self):
        if self.oracle_truth is None:
            return self.scenario.truth
        return self.oracle_truth

    @property
    def reference_truth(self):
        return self.scenario.truth

    @property
    def failures(self):
        return {name: s.failures for name, s in self.summaries.items()}

    @property
    def bootstrap_failures(self):
        return {name: s.bootstrap_failures
                for name, s in self.summaries.items()}

    def __getitem__(self, method):
        return self.summaries[Method(method).value]

    def to_frame(self):
        """ Per-replicate records """
        return self.records.copy()

    def write_records_csv(self, path):
        self.records.to_csv(path, index=False, na_rep='',
                            float_format='%.17g')
        logger.info('Wrote %i replicate records to %s', len(self.records),
                    path)

    def to_dict(self):
        return {'scenario': self.scenario.to_dict(), 'reps': self.reps,
                'seed': self.seed, 'B': self.B, 'M': self.M,
                'truth': self.truth, 'oracle_truth': self.oracle_truth,
                'reference_truth': self.reference_truth,
                'failures': self.failures,
                'bootstrap_failures': self.bootstrap_failures,
                'methods': {k: v.to_dict()
                            for k, v in self.summaries.items()}}


def run_mc(sc, methods=DEFAULT_METHODS, reps=1000, B=0, M=10, seed=0,
           n_jobs=1, oracle_n=0):
    """ Run a Monte Carlo study of ``methods`` on scenario ``sc``

    Args:
        sc (Scenario): scenario
        methods (iterable): methods to compare
        reps (int): number of replicates, at least 2
        B (int): bootstrap replicates per estimate, 0 to skip
        M (int): imputations for MI
        seed (int): root seed
        n_jobs (int): joblib workers over replicates
        oracle_n (int): subjects for the Monte Carlo truth, 0 to score
            against ``sc.truth``

    Returns:
        McReport: aggregated metrics and per-replicate records

    Raises:
        McInstabilityError: more than 2% of replicates failed for a method

    """
    if reps < 2:
        raise ValueError('Monte Carlo needs reps >= 2 (got %i)' % reps)
    if B and B < 2:
        raise ValueError('Bootstrap needs B >= 2 (got %i)' % B)
    methods = [Method(m) for m in methods]
    logger.info('Running %i replicates of scenario %s (%s)', reps, sc.name,
                ', '.join(m.value for m in methods))

    oracle = None
    if oracle_n:
        oracle = true_ate(sc, n_per_arm=oracle_n, seed=seed)
        logger.info('Oracle truth %.4f (reference %.4f)', oracle, sc.truth)
    truth = sc.truth if oracle is None else oracle

    func = partial(run_replicate, sc=sc, methods=methods, B=B, M=M,
                   seed=seed)
    rows = [rec for recs in parallel_map(func, range(reps), n_jobs=n_jobs)
            for rec in recs]
    records = pd.DataFrame.from_records(
        rows, columns=['replicate', 'method', 'tau_hat', 'var_estimate',
                       'var_bootstrap', 'error', 'bootstrap_error'])
    for column in ('error', 'bootstrap_error'):
        records[column] = records[column].astype(object)

    summaries = {m.value: summarize_method(records, m, truth)
                 for m in methods}
    failures = {name: s.failures for name, s in summaries.items()}
    if any(f > MAX_FAILURE_RATE * reps for f in failures.values()):
        raise McInstabilityError(
            'Too many failed replicates in scenario %s: %s' % (sc.name,
                                                               failures),
            failures=failures, total=reps)
    if any(failures.values()):
        logger.warning('Excluded failed replicates: %s', failures)
    boot_failures = {name: s.bootstrap_failures
                     for name, s in summaries.items()}
    if any(boot_failures.values()):
        logger.warning('Replicates without a bootstrap variance: %s',
                       boot_failures)
    return McReport(sc, reps, seed, B, M, summaries, records, oracle)
