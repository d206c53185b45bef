""" Tests for robj2r.algorithms.mi_baseline
"""
import numpy as np
import pytest

from robj2r.errors import SchemaError
from robj2r.algorithms.ate_analysis import (ModelForm, PipelineConfig,
                                            analysis_influence, ate,
                                            fit_analysis,
                                            influence_variance)
from robj2r.algorithms.j2r_imputer import DEFAULT_NU, NuPolicy
from robj2r.algorithms.mi_baseline import MiConfig, fit_ls_sequence, run_mi
from robj2r.regression.robust_loss import LossSpec
from robj2r.simulation.scenarios import Scenario, generate, inject_outliers
from robj2r.trial_data import CompletedDataset


def test_no_missing_data(complete_trial):
    d = complete_trial
    result = run_mi(d, MiConfig(M=5, seed=1))
    c = CompletedDataset(d, d.outcomes)
    wm = fit_analysis(c, ModelForm.INTERACTION, LossSpec.least_squares())
    tau = ate(wm, c)
    within = influence_variance(analysis_influence(
        wm, d.outcomes[:, -1], d.treatment, d.baseline))
    np.testing.assert_allclose(result.taus, tau)
    assert result.between_variance == pytest.approx(0.0, abs=1e-20)
    assert result.rubin_variance == pytest.approx(within)


def test_rubin_rule(small_trial):
    result = run_mi(small_trial, MiConfig(M=6, seed=3))
    expected = (np.mean(result.within) +
                (1 + 1.0 / 6) * np.var(result.taus, ddof=1))
    assert result.M == 6
    assert result.tau_mi == pytest.approx(np.mean(result.taus))
    assert result.rubin_variance == pytest.approx(expected)
    assert result.between_variance > 0


def test_deterministic(small_trial):
    a = run_mi(small_trial, MiConfig(M=4, seed=7))
    b = run_mi(small_trial, MiConfig(M=4, seed=7, n_jobs=2))
    np.testing.assert_array_equal(a.taus, b.taus)
    c = run_mi(small_trial, MiConfig(M=4, seed=8))
    assert not np.allclose(a.taus, c.taus)


def test_improper_imputation(small_trial):
    result = run_mi(small_trial, MiConfig(M=4, seed=7, proper=False))
    assert np.isfinite(result.tau_mi)


@pytest.mark.parametrize('M', [0, 1])
def test_m_too_small(M):
    with pytest.raises(ValueError):
        MiConfig(M=M)


def test_single_arm(trial_factory):
    d = trial_factory(40, seed=3)
    with pytest.raises(SchemaError):
        run_mi(d.subset(d.arm_rows(1)))


def test_ls_sequence_matches_lstsq(small_trial):
    visits = fit_ls_sequence(small_trial)
    d = small_trial
    rows = np.flatnonzero((d.treatment == 0) & d.observed[:, 1])
    H = d.history_matrix(1, rows)
    expected = np.linalg.lstsq(H, d.outcomes[rows, 1], rcond=None)[0]
    np.testing.assert_allclose(visits[1].alpha, expected)
    assert visits[1].dof == rows.size - H.shape[1]


def test_estimate_settles_as_m_grows(trial_factory):
    d = trial_factory(40, t=3, seed=2, dropout=0.2)
    small = run_mi(d, MiConfig(M=100, seed=4))
    large = run_mi(d, MiConfig(M=200, seed=4))
    # the first 100 imputations are shared
    np.testing.assert_array_equal(large.taus[:100], small.taus)
    assert abs(large.tau_mi - small.tau_mi) <= \
        2.0 * np.sqrt(large.between_variance / 100)


def test_outliers_pull_mi_not_robust():
    d = generate(Scenario('outliers', n_per_arm=400), 12)
    contaminated = inject_outliers(d, 'treatment', seed=5)
    mi = MiConfig(M=5, seed=1)
    robust = PipelineConfig.robust(nu_policy=NuPolicy.fixed(DEFAULT_NU))
    mi_shift = mi.point_estimate(contaminated) - mi.point_estimate(d)
    robust_shift = (robust.point_estimate(contaminated) -
                    robust.point_estimate(d))
    assert mi_shift > 0.3
    assert abs(robust_shift) < 0.5 * mi_shift
