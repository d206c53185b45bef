""" Re-run the simulation tables and compare against published values

Every table lists its scenarios and a set of checks. A check computes one
number from the Monte Carlo reports, in the published units (point
estimates and variances in units of 10^-2, rates and relative biases in
percent), and passes when it lies inside its tolerance band. Deviations
from the truth use the oracle J2R effect of the simulated generator, so the
published column holds the published deviation from the published truth.
"""
from dataclasses import dataclass, replace
import logging
import math

from .montecarlo import DEFAULT_METHODS, run_mc
from .scenarios import get_scenario

logger = logging.getLogger('robj2r')

INF = float('inf')
#: Subjects per arm for the oracle truth of each scenario
ORACLE_N = 200000


@dataclass(frozen=True)
class Check(object):
    """ One reproducible cell (or relation between cells)

    Attributes:
        label (str): description
        scenario (str): scenario name the metric is read from
        compute (callable): ``compute(report) -> float``
        published (float): published value in the same units
        band (tuple): inclusive ``(low, high)`` tolerance band
    """
    label: str
    scenario: str
    compute: object
    published: float
    band: tuple

    def evaluate(self, reports):
        value = float(self.compute(reports[self.scenario]))
        low, high = self.band
        passed = (not math.isnan(value)) and low <= value <= high
        return {'check': self.label, 'scenario': self.scenario,
                'published': self.published, 'reproduced': value,
                'tolerance': [None if math.isinf(low) else low,
                              None if math.isinf(high) else high],
                'verdict': 'pass' if passed else 'fail'}


@dataclass(frozen=True)
class TableSpec(object):
    table_id: str
    title: str
    scenarios: tuple
    default_reps: int
    checks: tuple


# METRIC HELPERS
def _metric(method, name, scale=100.0):
    return lambda report: scale * getattr(report[method], name)


def _deviation(method):
    return lambda report: 100.0 * (report[method].mean_tau - report.truth)


def _abs_deviation(method):
    return lambda report: abs(_deviation(method)(report))


def _bias_ratio(num, den):
    return lambda report: (abs(report[num].bias) /
                           max(abs(report[den].bias), 1e-12))


def _gap(larger, larger_metric, smaller, smaller_metric):
    return lambda report: 100.0 * (getattr(report[larger], larger_metric) -
                                   getattr(report[smaller], smaller_metric))


TABLES = {
    '1b': TableSpec(
        '1b', 'Normal errors with and without outliers in both arms',
        ('normal-h1', 'normal-h1-outliers'), 1000, (
            Check('Robust |point estimate - truth|', 'normal-h1',
                  _abs_deviation('Robust'), abs(70.09 - 71.18), (0.0, 2.0)),
            Check('Robust linearized variance relative bias (%)',
                  'normal-h1', _metric('Robust', 'rel_bias_var'), 4.75,
                  (-10.0, 20.0)),
            Check('Robust coverage (%)', 'normal-h1',
                  _metric('Robust', 'coverage'), 95.0, (93.0, 97.0)),
            Check('MI Rubin variance / MC variance', 'normal-h1',
                  lambda r: r['MI'].mean_var_estimate / r['MI'].mc_variance,
                  1.77, (1.4, INF)),
            Check('LSE |point estimate - truth|', 'normal-h1',
                  _abs_deviation('LSE'), abs(70.93 - 71.18), (0.0, 2.0)),
            Check('|Robust bias| / |MI bias| with outliers',
                  'normal-h1-outliers', _bias_ratio('Robust', 'MI'),
                  1.16 / 6.24, (-INF, 1.0 / 3.0)),
            Check('MI Rubin variance relative bias with outliers (%)',
                  'normal-h1-outliers', _metric('MI', 'rel_bias_var'),
                  216.0, (100.0, INF)),
            Check('Robust coverage with outliers (%)', 'normal-h1-outliers',
                  _metric('Robust', 'coverage'), 95.0, (92.5, 97.0)),
            Check('MI point estimate - truth with outliers',
                  'normal-h1-outliers', _deviation('MI'), 77.42 - 71.18,
                  (0.0, INF)),
            Check('Robust |point estimate - truth| with outliers',
                  'normal-h1-outliers', _abs_deviation('Robust'),
                  abs(72.34 - 71.18), (0.0, 1.5)),
        )),
    '1c': TableSpec(
        '1c', 't5 errors', ('t5-h1',), 1000, (
            Check('Robust |point estimate - truth|', 't5-h1',
                  _abs_deviation('Robust'), abs(69.81 - 68.09), (0.0, 2.0)),
            Check('LSE MC variance - Robust MC variance', 't5-h1',
                  _gap('LSE', 'mc_variance', 'Robust', 'mc_variance'),
                  2.90 - 2.72, (0.0, INF)),
            Check('MI Rubin variance - LSE MC variance', 't5-h1',
                  _gap('MI', 'mean_var_estimate', 'LSE', 'mc_variance'),
                  5.35 - 2.90, (0.0, INF)),
        )),
    'S1': TableSpec(
        'S1', 'Outliers in one arm only',
        ('normal-h1-outliers-control', 'normal-h1-outliers-treatment'), 500,
        (
            Check('Robust |point estimate - truth|, control outliers',
                  'normal-h1-outliers-control', _abs_deviation('Robust'),
                  abs(74.86 - 71.18), (0.0, 5.0)),
            Check('MI |point estimate - truth|, control outliers',
                  'normal-h1-outliers-control', _abs_deviation('MI'),
                  abs(43.07 - 71.18), (15.0, INF)),
            Check('Robust |point estimate - truth|, treatment outliers',
                  'normal-h1-outliers-treatment', _abs_deviation('Robust'),
                  abs(67.71 - 71.18), (0.0, 5.0)),
            Check('MI |point estimate - truth|, treatment outliers',
                  'normal-h1-outliers-treatment', _abs_deviation('MI'),
                  abs(116.55 - 71.18), (15.0, INF)),
        )),
    'S2': TableSpec(
        'S2', 'Normal errors under H0', ('normal-h0', 'normal-h0-outliers'),
        2000, (
            Check('Robust type-1 error (%)', 'normal-h0',
                  _metric('Robust', 'rejection'), 4.96, (3.5, 6.5)),
            Check('MI Rubin type-1 error (%)', 'normal-h0',
                  _metric('MI', 'rejection'), 2.12, (-INF, 3.5)),
            Check('LSE type-1 error (%)', 'normal-h0',
                  _metric('LSE', 'rejection'), 4.86, (3.5, 6.5)),
            Check('Robust type-1 error with outliers (%)',
                  'normal-h0-outliers', _metric('Robust', 'rejection'),
                  5.26, (3.5, 7.0)),
            Check('MI Rubin type-1 error with outliers (%)',
                  'normal-h0-outliers', _metric('MI', 'rejection'), 0.07,
                  (-INF, 1.0)),
        )),
    'S3': TableSpec(
        'S3', 't5 errors under H0', ('t5-h0',), 2000, (
            Check('Robust type-1 error (%)', 't5-h0',
                  _metric('Robust', 'rejection'), 5.38, (3.5, 7.0)),
            Check('MI Rubin type-1 error (%)', 't5-h0',
                  _metric('MI', 'rejection'), 2.33, (-INF, 3.5)),
            Check('LSE type-1 error (%)', 't5-h0',
                  _metric('LSE', 'rejection'), 5.09, (3.5, 7.0)),
            Check('Robust MC variance < LSE MC variance', 't5-h0',
                  _gap('LSE', 'mc_variance', 'Robust', 'mc_variance'),
                  2.76 - 2.46, (0.0, INF)),
        )),
}


def get_table(table_id):
    try:
        return TABLES[table_id]
    except KeyError:
        raise KeyError('Unknown table "%s" (available: %s)'
                       % (table_id, ', '.join(TABLES)))


def reproduce(table_id, reps=None, seed=0, B=0, M=10, n_jobs=1,
              n_per_arm=None, oracle_n=ORACLE_N):
    """ Run a table's scenarios and evaluate its checks

    Bias, coverage and deviation checks are scored against the oracle J2R
    effect of each scenario; the published reference value is reported
    next to it.

    Args:
        table_id (str): one of ``TABLES``
        reps (int, optional): replicates per scenario (table default)
        seed (int): root seed shared by all scenarios
        B (int): bootstrap replicates per estimate, 0 to skip
        M (int): MI imputations
        n_jobs (int): joblib workers
        n_per_arm (int, optional): override the scenario sample size
        oracle_n (int): subjects per arm for the oracle truth, 0 to score
            against the published reference values

    Returns:
        dict: ``{'table', 'title', 'reps', 'seed', 'truths', 'reports',
        'verdicts', 'passed'}``

    Raises:
        McInstabilityError: a scenario had too many failed replicates

    """
    table = get_table(table_id)
    reps = reps or table.default_reps
    reports = {}
    for name in table.scenarios:
        sc = get_scenario(name)
        if n_per_arm:
            sc = replace(sc, n_per_arm=n_per_arm)
        reports[name] = run_mc(sc, DEFAULT_METHODS, reps=reps, B=B, M=M,
                               seed=seed, n_jobs=n_jobs, oracle_n=oracle_n)
    truths = {name: {'reference': r.reference_truth,
                     'oracle': r.oracle_truth}
              for name, r in reports.items()}
    for name, truth in truths.items():
        logger.info('%s: oracle truth %s, published reference %.4f', name,
                    'n/a' if truth['oracle'] is None
                    else '%.4f' % truth['oracle'], truth['reference'])

    verdicts = [check.evaluate(reports) for check in table.checks]
    passed = all(v['verdict'] == 'pass' for v in verdicts)
    for v in verdicts:
        logger.info('%-55s published %8.3f reproduced %8.3f %s', v['check'],
                    v['published'], v['reproduced'], v['verdict'].upper())
    return {'table': table.table_id, 'title': table.title, 'reps': reps,
            'seed': seed, 'truths': truths, 'reports': reports,
            'verdicts': verdicts, 'passed': passed}
