import enum
import json

import numpy as np
import pytest

from robj2r import utils
from robj2r.log_robj2r import level_from_env


def test_seed_sequence_deterministic():
    a = utils.rng_for(5, 2, 1).standard_normal(3)
    b = utils.rng_for(5, 2, 1).standard_normal(3)
    c = utils.rng_for(5, 1, 2).standard_normal(3)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert utils.int_seed(5, 3) == utils.int_seed(5, 3)
    assert utils.seed_sequence(None).entropy == utils.DEFAULT_SEED


@pytest.mark.parametrize('n_jobs', [1, 2])
def test_parallel_map_order(n_jobs):
    assert utils.parallel_map(abs, [-3, 2, -1], n_jobs=n_jobs) == [3, 2, 1]


class Color(enum.Enum):
    RED = 'red'


def test_to_jsonable():
    obj = {1: np.array([1.5, np.nan]), 'b': np.int64(3),
           'c': np.bool_(True), 'd': Color.RED, 'e': (np.float32(0.5),)}
    assert utils.to_jsonable(obj) == {'1': [1.5, None], 'b': 3, 'c': True,
                                      'd': 'red', 'e': [0.5]}


def test_dumps_report_sorted():
    text = utils.dumps_report({'b': 1, 'a': float('inf')})
    assert json.loads(text) == {'a': None, 'b': 1}
    assert text.index('"a"') < text.index('"b"')


@pytest.mark.parametrize(('value', 'expected'), [
    (None, (20, True)),
    ('', (20, True)),
    ('debug', (10, True)),
    ('WARNING', (30, True)),
    ('15', (15, True)),
    ('chatty', (20, False)),
])
def test_level_from_env(value, expected):
    assert level_from_env(value) == expected
