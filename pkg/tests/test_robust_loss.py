""" Tests for robj2r.regression.robust_loss
"""
import numpy as np
import pytest

from robj2r.errors import UnsupportedDerivative
from robj2r.regression.robust_loss import (LossKind, LossSpec, psi,
                                           psi_prime, rho)

LOSSES = [LossSpec.least_squares(), LossSpec.huber(),
          LossSpec(LossKind.ABSOLUTE), LossSpec(LossKind.EPS, eps=0.5)]


def test_huber_value():
    huber = LossSpec.huber()
    np.testing.assert_allclose(rho(huber, 2.0), 1.7854875)
    np.testing.assert_allclose(rho(huber, 1.0), 0.5)
    assert psi(huber, 2.0) == 1.345
    assert psi_prime(huber, 2.0) == 0.0
    assert psi_prime(huber, 1.0) == 1.0


def test_huber_threshold_uses_scale():
    huber = LossSpec.huber()
    np.testing.assert_allclose(rho(huber, 2.0, scale=2.0), 2.0)
    np.testing.assert_allclose(psi(huber, 4.0, scale=2.0), 2.69)


def test_scalar_in_scalar_out():
    for spec in LOSSES:
        assert isinstance(rho(spec, 0.3), float)
        assert isinstance(psi(spec, 0.3), float)


@pytest.mark.parametrize('spec', LOSSES)
def test_symmetry(spec):
    x = np.linspace(-4, 4, 41)
    np.testing.assert_allclose(rho(spec, x), rho(spec, -x))
    np.testing.assert_allclose(psi(spec, x), -psi(spec, -x))
    assert np.all(rho(spec, x) >= 0)


@pytest.mark.parametrize('spec', LOSSES)
def test_psi_is_derivative(spec):
    # avoid kinks at 0, +-eps and +-l
    x = np.array([-3.1, -0.9, -0.2, 0.3, 0.77, 2.4])
    h = 1e-6
    numeric = (rho(spec, x + h) - rho(spec, x - h)) / (2 * h)
    np.testing.assert_allclose(psi(spec, x), numeric, atol=1e-6)


def test_absolute_psi_at_zero():
    assert psi(LossSpec(LossKind.ABSOLUTE), 0.0) == 0.0


def test_eps_insensitive_margin():
    spec = LossSpec(LossKind.EPS, eps=0.5)
    np.testing.assert_array_equal(rho(spec, [0.2, -0.5, 1.5]), [0, 0, 1.0])


@pytest.mark.parametrize('kind', [LossKind.ABSOLUTE, LossKind.EPS])
def test_psi_prime_unsupported(kind):
    with pytest.raises(UnsupportedDerivative):
        psi_prime(LossSpec(kind), 1.0)


@pytest.mark.parametrize(('text', 'kind'), [
    ('ls', LossKind.LS),
    ('Huber', LossKind.HUBER),
    ('absolute', LossKind.ABSOLUTE),
    ('eps-insensitive', LossKind.EPS),
])
def test_parse(text, kind):
    assert LossSpec.parse(text).kind is kind


def test_parse_unknown():
    with pytest.raises(ValueError):
        LossSpec.parse('tukey')


@pytest.mark.parametrize('kwargs', [{'huber_l': 0}, {'eps': -1.0}])
def test_invalid_constants(kwargs):
    with pytest.raises(ValueError):
        LossSpec(**kwargs)
