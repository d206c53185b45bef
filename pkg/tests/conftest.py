from functools import partial

import numpy as np
import pytest

from robj2r.simulation.scenarios import Scenario, generate
from robj2r.trial_data import TrialDataset


# SLOW MONTE CARLO TESTS
def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='Run slow Monte Carlo acceptance tests')


def pytest_configure(config):
    config.addinivalue_line('markers',
                            'slow: Monte Carlo test, needs --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


# EXAMPLE DATASETS
@pytest.fixture(scope='session')
def small_scenario(request):
    return Scenario('small', n_per_arm=150)


@pytest.fixture(scope='session')
def small_trial(request, small_scenario):
    """ Simulated two-arm trial with dropout, 150 subjects per arm """
    return generate(small_scenario, 1)


@pytest.fixture(scope='session')
def complete_trial(request):
    """ Simulated trial without any dropout """
    sc = Scenario('complete', n_per_arm=120, phi=(-60, -60, 0, 0))
    return generate(sc, 2)


@pytest.fixture(scope='session')
def noiseless_control(request):
    """ One-visit control-arm data generated exactly as ``H_0' alpha`` """
    rng = np.random.default_rng(3)
    n = 40
    X = rng.standard_normal((n, 2))
    alpha = np.array([0.5, 1.0, -0.3])
    Y = np.column_stack((np.ones(n), X)).dot(alpha)
    d = TrialDataset.from_arrays(np.zeros(n, dtype=int), X, Y[:, None])
    return d, alpha


@pytest.fixture(scope='function')
def write_csv_text(request, tmp_path):
    """ Write CSV text to a temporary file and return its path """
    def _write(text, name='trial.csv'):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return _write


@pytest.fixture(scope='function')
def rng(request):
    return np.random.default_rng(12345)


def make_trial(n_per_arm, t=3, p=2, seed=0, dropout=0.1, shift=0.5):
    """ Quick simulated trial for tests needing custom shapes """
    rng = np.random.default_rng(seed)
    n = 2 * n_per_arm
    A = np.repeat([0, 1], n_per_arm)
    X = rng.standard_normal((n, p - 1))
    Y = np.empty((n, t))
    for k in range(t):
        Y[:, k] = (1.0 + X.sum(axis=1) + 0.5 * Y[:, :k].sum(axis=1) +
                   shift * A + rng.standard_normal(n))
    R = np.ones((n, t), dtype=bool)
    for k in range(1, t):
        R[:, k] = R[:, k - 1] & (rng.random(n) > dropout)
    return TrialDataset.from_arrays(A, X, Y, observed=R)


@pytest.fixture(scope='session')
def trial_factory(request):
    return partial(make_trial)
