""" Tests for robj2r.algorithms.j2r_imputer
"""
from types import SimpleNamespace

import numpy as np
import pytest

from robj2r.errors import InsufficientDataError
from robj2r.algorithms.j2r_imputer import (ImputationModel,
                                           ImputationStrategy, NuPolicy,
                                           compose_beta, fit_sequential,
                                           impute, impute_final)
from robj2r.regression.robust_loss import LossSpec
from robj2r.trial_data import TrialDataset


def _fake_model(alphas, p):
    visits = [SimpleNamespace(alpha=np.asarray(a, dtype=float))
              for a in alphas]
    model = ImputationModel(p, len(alphas), LossSpec(), visits)
    model.betas = [compose_beta(model, s) for s in range(1, model.t + 1)]
    return model


def test_noiseless_recovery(noiseless_control):
    d, alpha = noiseless_control
    model = fit_sequential(d, LossSpec.huber())
    np.testing.assert_allclose(model.alpha(1), alpha, atol=1e-8)
    np.testing.assert_allclose(model.beta(1), alpha, atol=1e-8)


def test_compose_beta_two_visits():
    a1 = [1.0, 2.0]
    a2 = [0.5, -1.0, 3.0]
    model = _fake_model([a1, a2], p=2)
    np.testing.assert_allclose(model.beta(2), a2)
    np.testing.assert_allclose(model.beta(1), [0.5 + 3.0 * 1.0,
                                               -1.0 + 3.0 * 2.0])


def test_compose_beta_out_of_range():
    model = _fake_model([[1.0], [0.0, 1.0]], p=1)
    with pytest.raises(ValueError):
        compose_beta(model, 0)
    with pytest.raises(ValueError):
        compose_beta(model, 3)


def test_beta_lengths(small_trial):
    model = fit_sequential(small_trial)
    for s in range(1, small_trial.t + 1):
        assert model.alpha(s).size == small_trial.p + s - 1
        assert model.beta(s).size == small_trial.p + s - 1


def test_impute_keeps_observed(small_trial):
    model = fit_sequential(small_trial)
    c = impute(small_trial, model)
    R = small_trial.observed
    np.testing.assert_array_equal(c.outcomes[R], small_trial.outcomes[R])
    assert np.all(np.isfinite(c.outcomes))


def test_impute_is_idempotent(small_trial):
    model = fit_sequential(small_trial)
    c = impute(small_trial, model)
    completed = small_trial.with_outcomes(c.outcomes,
                                          np.ones_like(small_trial.observed))
    again = impute(completed, model)
    np.testing.assert_array_equal(again.outcomes, c.outcomes)


def test_impute_final_matches_sequential(small_trial):
    model = fit_sequential(small_trial)
    c = impute(small_trial, model)
    np.testing.assert_allclose(impute_final(small_trial, model),
                               c.outcomes[:, -1], rtol=1e-10, atol=1e-10)


def test_treatment_arm_ignored_when_fitting(small_trial):
    model = fit_sequential(small_trial)
    Y = np.array(small_trial.outcomes, copy=True)
    treated = small_trial.treatment == 1
    Y[treated] = Y[treated] * 5.0 + 100.0
    changed = small_trial.with_outcomes(Y)
    model2 = fit_sequential(changed)
    for s in range(1, small_trial.t + 1):
        np.testing.assert_allclose(model2.alpha(s), model.alpha(s))


def test_arm_blind_imputation():
    # twin subjects in different arms, both dropping out after visit 1
    X = np.array([0.3, 0.3, -1.0, 0.5, 1.2, -0.4, 0.9, -0.1])
    A = np.array([0, 1, 0, 0, 0, 0, 0, 1])
    rng = np.random.default_rng(11)
    Y = np.column_stack((X + rng.standard_normal(8),
                         np.zeros(8)))
    Y[:, 1] = 0.5 * Y[:, 0] + X + rng.standard_normal(8)
    Y[1, 0] = Y[0, 0]
    R = np.ones_like(Y, dtype=bool)
    R[:2, 1] = False
    d = TrialDataset.from_arrays(A, X, np.where(R, Y, np.nan), observed=R)
    model = fit_sequential(d, LossSpec.least_squares())
    c = impute(d, model)
    np.testing.assert_allclose(c.outcomes[0, 1], c.outcomes[1, 1])


def test_control_only_dataset(trial_factory):
    d = trial_factory(60, seed=4)
    control = d.subset(d.arm_rows(0))
    model = fit_sequential(control)
    assert len(model.visits) == d.t


def test_treatment_only_dataset(trial_factory):
    d = trial_factory(60, seed=4)
    treated = d.subset(d.arm_rows(1))
    with pytest.raises(InsufficientDataError) as exc:
        fit_sequential(treated)
    assert exc.value.visit == 1


def test_mar_needs_both_models(small_trial):
    model = fit_sequential(small_trial)
    with pytest.raises(ValueError):
        impute(small_trial, model, ImputationStrategy.MAR, {0: model})


def test_mar_uses_own_arm(small_trial):
    control = fit_sequential(small_trial, arm=0)
    treated = fit_sequential(small_trial, arm=1)
    c = impute(small_trial, control, ImputationStrategy.MAR,
               {0: control, 1: treated})
    j2r = impute(small_trial, control)
    rows = (small_trial.treatment == 0) & ~small_trial.observed[:, -1]
    np.testing.assert_allclose(c.outcomes[rows, -1], j2r.outcomes[rows, -1])


@pytest.mark.parametrize(('text', 'kind'), [('fixed:7.5', 'fixed'),
                                            ('cv', 'cv')])
def test_nu_policy_parse(text, kind):
    policy = NuPolicy.parse(text)
    assert policy.kind == kind
    if kind == 'fixed':
        assert policy.value == 7.5


@pytest.mark.parametrize('text', ['fixed', 'fixed:abc', 'auto'])
def test_nu_policy_parse_bad(text):
    with pytest.raises(ValueError):
        NuPolicy.parse(text)


def test_cv_policy_fits(small_trial):
    policy = NuPolicy.cv(grid=(5.0, 20.0), folds=3, seed=2)
    model = fit_sequential(small_trial, nu_policy=policy)
    assert all(v.nu in (5.0, 20.0) for v in model.visits)
