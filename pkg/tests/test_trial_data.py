""" Tests for robj2r.trial_data
"""
import numpy as np
import pytest

from robj2r.errors import MonotonicityError, RankError, SchemaError
from robj2r.trial_data import (CompletedDataset, CsvSchema, TrialDataset,
                               dropout_pattern, dropout_patterns,
                               force_monotone, load_csv, write_csv)


# LOADING
def test_load_csv_one_subject(write_csv_text):
    path = write_csv_text('id,trt,x1,y1,y2\ns1,1,0.5,1.0,\n')
    d = load_csv(path)
    assert (d.n, d.t, d.p) == (1, 2, 2)
    np.testing.assert_array_equal(d.observed, [[True, False]])
    np.testing.assert_array_equal(d.baseline, [[1.0, 0.5]])
    assert d.outcomes[0, 0] == 1.0
    assert np.isnan(d.outcomes[0, 1])
    assert d.treatment[0] == 1
    assert d.ids == ('s1',)


def test_load_csv_na_token(write_csv_text):
    path = write_csv_text('id,trt,x1,y1,y2\na,0,0.1,2.0,NA\n'
                          'b,1,0.7,1.0,3.0\n')
    d = load_csv(path)
    np.testing.assert_array_equal(d.observed, [[True, False], [True, True]])


def test_load_csv_non_monotone(write_csv_text):
    path = write_csv_text('id,trt,x1,y1,y2\na,0,0.1,,2.0\nb,1,0.3,1.0,1.0\n')
    with pytest.raises(MonotonicityError) as exc:
        load_csv(path)
    assert exc.value.subject == 'a'
    assert exc.value.pattern == [0, 1]


def test_load_csv_force_monotone(write_csv_text):
    path = write_csv_text('id,trt,x1,y1,y2,y3\na,0,0.1,1.0,,2.0\n'
                          'b,1,0.3,1.0,1.0,1.0\n')
    d = load_csv(path, monotone='force')
    np.testing.assert_array_equal(d.observed[0], [True, False, False])
    assert np.isnan(d.outcomes[0, 2])


def test_load_csv_rank_deficient(write_csv_text):
    path = write_csv_text('id,trt,x1,x2,y1\na,0,0.1,0.1,1\nb,1,0.5,0.5,2\n'
                          'c,0,0.9,0.9,3\nd,1,1.3,1.3,4\n')
    with pytest.raises(RankError):
        load_csv(path)


@pytest.mark.parametrize('trt', ['2', 'yes', ''])
def test_load_csv_bad_treatment(write_csv_text, trt):
    path = write_csv_text('id,trt,x1,y1\na,%s,0.1,1.0\nb,0,0.2,2.0\n' % trt)
    with pytest.raises(SchemaError):
        load_csv(path)


def test_load_csv_missing_column(write_csv_text):
    path = write_csv_text('id,x1,y1\na,0.1,1.0\n')
    with pytest.raises(SchemaError):
        load_csv(path)


def test_load_csv_missing_covariate(write_csv_text):
    path = write_csv_text('id,trt,x1,y1\na,0,,1.0\nb,1,0.2,2.0\n')
    with pytest.raises(SchemaError):
        load_csv(path)


def test_load_csv_custom_schema(write_csv_text):
    path = write_csv_text('subject,arm,age,week1,week2\n'
                          'a,0,30,1.0,2.0\nb,1,40,1.5,\nc,0,35,0.5,1.0\n')
    schema = CsvSchema(id='subject', treatment='arm', covariates=('age',),
                       outcomes=('week1', 'week2'))
    d = load_csv(path, schema=schema)
    assert d.covariate_names == ('age',)
    assert d.outcome_names == ('week1', 'week2')
    assert d.ids == ('a', 'b', 'c')


def test_csv_round_trip(small_trial, tmp_path):
    path = str(tmp_path / 'round_trip.csv')
    write_csv(small_trial, path)
    d = load_csv(path)
    np.testing.assert_array_equal(d.observed, small_trial.observed)
    np.testing.assert_array_equal(d.outcomes[d.observed],
                                  small_trial.outcomes[small_trial.observed])
    np.testing.assert_array_equal(d.baseline, small_trial.baseline)
    np.testing.assert_array_equal(d.treatment, small_trial.treatment)
    assert d.ids == small_trial.ids


def test_csv_round_trip_exact_floats(tmp_path):
    values = np.array([[0.1 + 0.2, 1.0 / 3.0],
                       [1e-300, -123456789.123456789],
                       [2.0 ** 0.5, np.nan],
                       [np.pi * 1e12, np.exp(-20.0)]])
    x = np.array([0.7, 1.0 / 7.0, -2.0 / 3.0, 1e-17])
    d = TrialDataset.from_arrays([0, 0, 1, 1], x, values)
    path = str(tmp_path / 'exact.csv')
    write_csv(d, path)
    loaded = load_csv(path)
    np.testing.assert_array_equal(loaded.observed, d.observed)
    np.testing.assert_array_equal(loaded.outcomes[loaded.observed],
                                  values[d.observed])
    np.testing.assert_array_equal(loaded.baseline[:, 1], x)


# VALIDATION
def test_dataset_immutable(small_trial):
    with pytest.raises(ValueError):
        small_trial.outcomes[0, 0] = 10.0


def test_dataset_duplicate_ids():
    with pytest.raises(SchemaError):
        TrialDataset.from_arrays([0, 1], [0.1, 0.2], [[1.0], [2.0]],
                                 ids=['a', 'a'])


def test_dataset_value_at_unobserved_entry():
    with pytest.raises(SchemaError):
        TrialDataset([0, 1], np.array([[1.0, 0.1], [1.0, 0.2]]),
                     np.array([[1.0, 2.0], [3.0, 4.0]]),
                     np.array([[True, False], [True, True]]))


def test_dataset_single_arm_allowed():
    d = TrialDataset.from_arrays([0, 0, 0], [0.1, 0.5, 0.3],
                                 [[1.0], [2.0], [3.0]])
    assert not d.has_both_arms()


# PATTERNS
@pytest.mark.parametrize(('observed', 'expected'), [
    ([1, 1, 0, 0, 0], 3),
    ([1, 1, 1, 1, 1], 6),
    ([0, 0, 0, 0, 0], 1),
])
def test_dropout_pattern(observed, expected):
    observed = np.array([observed], dtype=bool)
    Y = np.where(observed, 1.0, np.nan)
    d = TrialDataset.from_arrays([1], [0.2], Y, observed=observed)
    assert dropout_pattern(d, 0) == expected
    assert d.completer_pattern == 6


def test_dropout_patterns_partition(small_trial):
    patterns = dropout_patterns(small_trial)
    counts = np.bincount(patterns, minlength=small_trial.t + 2)
    assert counts.sum() == small_trial.n
    assert counts[0] == 0
    expected = [dropout_pattern(small_trial, i) for i in range(20)]
    np.testing.assert_array_equal(patterns[:20], expected)


def test_force_monotone():
    Y = np.array([[1.0, np.nan, 3.0], [1.0, 2.0, 3.0]])
    R = np.isfinite(Y)
    Y2, R2, n_deleted = force_monotone(Y, R)
    assert n_deleted == 1
    np.testing.assert_array_equal(R2, [[True, False, False],
                                       [True, True, True]])
    assert np.isnan(Y2[0, 2])


# HISTORIES
def test_history_lengths(small_trial):
    h = small_trial.history(0, 0)
    assert len(h) == small_trial.p
    completers = np.flatnonzero(small_trial.observed.all(axis=1))
    h = small_trial.history(completers[0], 3)
    assert len(h) == small_trial.p + 3


def test_history_unobserved_raises(small_trial):
    i = np.flatnonzero(~small_trial.observed[:, -1])[0]
    with pytest.raises(ValueError):
        small_trial.history(i, small_trial.t)


def test_completed_history_always_defined(small_trial):
    Y = np.where(small_trial.observed, small_trial.outcomes, 0.0)
    c = CompletedDataset(small_trial, Y)
    for s in range(small_trial.t + 1):
        for i in range(0, small_trial.n, 37):
            assert len(c.history(i, s)) == small_trial.p + s
    assert set(np.unique(c.provenance())) <= {'observed', 'imputed'}
    np.testing.assert_array_equal(c.imputed, ~small_trial.observed)


def test_completed_must_keep_observed(small_trial):
    Y = np.where(small_trial.observed, small_trial.outcomes, 0.0)
    Y[0, 0] += 1.0
    with pytest.raises(SchemaError):
        CompletedDataset(small_trial, Y)


def test_subset_suffixes_duplicate_ids(small_trial):
    d = small_trial.subset([0, 0, 1])
    assert d.ids == (small_trial.ids[0], small_trial.ids[0] + '#1',
                     small_trial.ids[1])


def test_subset_skips_rank_check(small_trial):
    rows = np.flatnonzero(small_trial.baseline[:, 2] == 0)[:5]
    # x2 is constant on these rows
    with pytest.raises(RankError):
        TrialDataset.from_arrays(small_trial.treatment[rows],
                                 small_trial.baseline[rows, 1:],
                                 small_trial.outcomes[rows],
                                 observed=small_trial.observed[rows])
    d = small_trial.subset(rows)
    assert d.n == 5
    np.testing.assert_array_equal(d.baseline, small_trial.baseline[rows])
    completed = d.with_outcomes(np.where(d.observed, d.outcomes, 0.0),
                                np.ones_like(d.observed))
    assert completed.observed.all()
