""" Tests for robj2r.regression.weights and cross_validation
"""
import numpy as np
import pytest

from robj2r.errors import (DegenerateScaleError, InsufficientDataError,
                           SingularScatterError)
from robj2r.regression.cross_validation import (covariate_weights,
                                                cross_validate_nu, cv_sse,
                                                fold_indices)
from robj2r.regression.robust_fit import fit_weighted_robust
from robj2r.regression.robust_loss import LossSpec
from robj2r.regression.weights import (CovariateWeighting, WeightMode,
                                       mahalanobis_distance,
                                       mahalanobis_weights,
                                       robust_center_scatter, trisquare)


# TRISQUARE
def test_trisquare_values():
    np.testing.assert_allclose(trisquare(1.0, 10.0), 0.970299)
    assert trisquare(0.0, 10.0) == 1.0
    assert trisquare(10.0, 10.0) == 0.0
    assert trisquare(12.0, 10.0) == 0.0


def test_trisquare_literal():
    assert trisquare(0.0, 10.0, WeightMode.LITERAL) == 0.0
    np.testing.assert_allclose(trisquare(2.0, 10.0, 'literal'),
                               2.0 * 0.96 ** 3)


def test_trisquare_monotone():
    u = np.linspace(0, 10, 101)
    w = trisquare(u, 10.0)
    assert np.all(np.diff(w) <= 0)
    assert np.all((w >= 0) & (w <= 1))


# SCATTER
def test_center_is_median(rng):
    rows = rng.standard_normal((101, 3))
    center, scatter = robust_center_scatter(rows)
    np.testing.assert_allclose(center, np.median(rows, axis=0))
    np.testing.assert_allclose(scatter, scatter.T)
    assert np.all(np.linalg.eigvalsh(scatter) > 0)


def test_one_column_scatter():
    rows = np.array([1.0, 2.0, 3.0, 4.0, 100.0])
    center, scatter = robust_center_scatter(rows)
    assert center[0] == 3.0
    np.testing.assert_allclose(scatter, [[1.4826 ** 2]])


def test_binary_column_has_scale():
    rows = np.column_stack(([0, 0, 0, 0, 1, 1.0],
                            [0.3, -1.2, 0.8, 1.9, -0.4, 0.1]))
    _, scatter = robust_center_scatter(rows)
    assert scatter[0, 0] > 0


def test_constant_column():
    rows = np.column_stack((np.ones(10), np.arange(10.0)))
    with pytest.raises(DegenerateScaleError):
        robust_center_scatter(rows)


def test_too_few_rows():
    with pytest.raises(InsufficientDataError):
        robust_center_scatter(np.array([[1.0, 2.0]]))


def test_singular_scatter():
    with pytest.raises(SingularScatterError):
        mahalanobis_distance(np.ones((3, 2)), np.zeros(2), np.zeros((2, 2)))


def test_distance_identity_scatter():
    rows = np.array([[3.0, 4.0], [0.0, 0.0]])
    d = mahalanobis_distance(rows, np.zeros(2), np.eye(2))
    np.testing.assert_allclose(d, [25.0, 0.0])


def test_outlier_downweighted(rng):
    rows = rng.standard_normal((200, 2))
    rows[0] = [40.0, -40.0]
    cw = CovariateWeighting.from_rows(rows, 10.0)
    w = mahalanobis_weights(rows, cw)
    assert w[0] < np.median(w)
    assert np.all((w >= 0) & (w <= 1))


def test_nu_must_be_positive():
    with pytest.raises(ValueError):
        CovariateWeighting(0.0, np.zeros(1), np.eye(1))


def test_intercept_only_unweighted():
    w, cw = covariate_weights(np.ones((5, 1)), 10.0)
    np.testing.assert_array_equal(w, np.ones(5))
    assert cw is None


# CROSS-VALIDATION
@pytest.fixture(scope='module')
def cv_data(request):
    rng = np.random.default_rng(7)
    n = 120
    H = np.column_stack((np.ones(n), rng.standard_normal((n, 2))))
    y = H.dot([1.0, 0.5, -1.0]) + rng.standard_normal(n)
    return y, H


def test_fold_indices_partition():
    folds = fold_indices(23, 5, seed=3)
    test = np.sort(np.concatenate([t for _, t in folds]))
    np.testing.assert_array_equal(test, np.arange(23))
    again = fold_indices(23, 5, seed=3)
    for (_, a), (_, b) in zip(folds, again):
        np.testing.assert_array_equal(a, b)


def test_singleton_grid(cv_data):
    y, H = cv_data
    assert cross_validate_nu(y, H, LossSpec.huber(), grid=[7.0]) == 7.0


def test_cv_is_grid_argmin(cv_data):
    y, H = cv_data
    spec = LossSpec.huber()
    grid = (5.0, 10.0, 20.0)
    nu, scores = cross_validate_nu(y, H, spec, grid=grid, K=4, seed=1,
                                   return_scores=True)
    folds = fold_indices(y.size, 4, 1)
    brute = {g: cv_sse(y, H, spec, g, folds) for g in grid}
    np.testing.assert_allclose([scores[g] for g in grid],
                               [brute[g] for g in grid])
    best = min(brute.values())
    assert nu == max(g for g in grid if brute[g] == best)


def test_cv_with_covariate_outlier(cv_data):
    y, H = (np.array(a, copy=True) for a in cv_data)
    H[0, 1] = 40.0
    y[0] = -30.0
    spec = LossSpec.huber()
    # nu = 1e4 leaves every weight within 1e-8 of one
    grid = (5.0, 10.0, 1e4)
    nu, scores = cross_validate_nu(y, H, spec, grid=grid, K=5, seed=0,
                                   return_scores=True)
    unweighted = 0.0
    for train, test in fold_indices(y.size, 5, 0):
        fit = fit_weighted_robust(y[train], H[train], None, spec)
        unweighted += np.sum((y[test] - fit.predict(H[test])) ** 2)
    assert scores[1e4] == pytest.approx(unweighted, rel=1e-6)
    assert scores[nu] <= unweighted * (1 + 1e-6)


def test_cv_reproducible(cv_data):
    y, H = cv_data
    spec = LossSpec.least_squares()
    assert (cross_validate_nu(y, H, spec, seed=5) ==
            cross_validate_nu(y, H, spec, seed=5))


@pytest.mark.parametrize('kwargs', [{'K': 1}, {'grid': []}])
def test_cv_bad_arguments(cv_data, kwargs):
    y, H = cv_data
    with pytest.raises(ValueError):
        cross_validate_nu(y, H, LossSpec.huber(), **kwargs)


def test_cv_fewer_rows_than_folds(cv_data):
    y, H = cv_data
    with pytest.raises(InsufficientDataError):
        cross_validate_nu(y[:3], H[:3], LossSpec.huber(), K=5)
