""" Loss functions ``rho`` with their derivatives ``psi`` and ``psi'``

All functions are vectorized over ``x``. The Huber threshold is
``l * scale``, so residuals are never pre-divided by the scale and fitted
coefficients stay on the data's scale.
"""
from dataclasses import dataclass
import enum

import numpy as np

from ..errors import UnsupportedDerivative


class LossKind(str, enum.Enum):
    LS = 'ls'
    HUBER = 'huber'
    ABSOLUTE = 'abs'
    EPS = 'eps'


#: Spellings accepted by :meth:`LossSpec.parse`
_ALIASES = {
    'ls': LossKind.LS, 'least-squares': LossKind.LS,
    'huber': LossKind.HUBER,
    'abs': LossKind.ABSOLUTE, 'absolute': LossKind.ABSOLUTE,
    'eps': LossKind.EPS, 'eps-insensitive': LossKind.EPS,
}

HUBER_L = 1.345


@dataclass(frozen=True)
class LossSpec(object):
    """ Loss family and tuning constants

    Attributes:
        kind (LossKind): loss family
        huber_l (float): Huber multiplier ``l`` applied to the robust scale
        eps (float): insensitivity margin of the eps-insensitive loss
    """
    kind: LossKind = LossKind.HUBER
    huber_l: float = HUBER_L
    eps: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', LossKind(self.kind))
        if not self.huber_l > 0:
            raise ValueError('huber_l must be positive (got %r)'
                             % self.huber_l)
        if not self.eps >= 0:
            raise ValueError('eps must be nonnegative (got %r)' % self.eps)

    @classmethod
    def parse(cls, kind, huber_l=HUBER_L, eps=0.0):
        try:
            kind = _ALIASES[str(kind).lower()]
        except KeyError:
            raise ValueError('Unknown loss "%s" (choose from %s)'
                             % (kind, ', '.join(sorted(_ALIASES))))
        return cls(kind, huber_l=huber_l, eps=eps)

    @classmethod
    def least_squares(cls):
        return cls(LossKind.LS)

    @classmethod
    def huber(cls, huber_l=HUBER_L):
        return cls(LossKind.HUBER, huber_l=huber_l)

    def threshold(self, scale):
        """ Huber clipping point ``l * scale`` """
        return self.huber_l * scale

    @property
    def supports_linearization(self):
        return self.kind in (LossKind.LS, LossKind.HUBER)

    def to_dict(self):
        return {'kind': self.kind.value, 'huber_l': self.huber_l,
                'eps': self.eps}


def rho(spec, x, scale=1.0):
    """ Loss value ``rho(x)``

    Args:
        spec (LossSpec): loss definition
        x (float or np.ndarray): residual(s)
        scale (float): robust residual scale (Huber only)

    Returns:
        float or np.ndarray: nonnegative loss

    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    if spec.kind is LossKind.LS:
        out = 0.5 * x ** 2
    elif spec.kind is LossKind.HUBER:
        k = spec.threshold(scale)
        out = np.where(ax < k, 0.5 * x ** 2, k * ax - 0.5 * k ** 2)
    elif spec.kind is LossKind.ABSOLUTE:
        out = ax
    else:
        out = np.maximum(ax - spec.eps, 0.0)
    return out if out.ndim else float(out)


def psi(spec, x, scale=1.0):
    """ Loss derivative ``psi(x) = d rho / d x``

    ``psi(absolute, 0) = 0``.
    """
    x = np.asarray(x, dtype=float)
    if spec.kind is LossKind.LS:
        out = x.copy()
    elif spec.kind is LossKind.HUBER:
        k = spec.threshold(scale)
        out = np.clip(x, -k, k)
    elif spec.kind is LossKind.ABSOLUTE:
        out = np.sign(x)
    else:
        out = np.sign(x) * (np.abs(x) > spec.eps)
    return out if out.ndim else float(out)


def psi_prime(spec, x, scale=1.0):
    """ Second derivative ``psi'(x)`` for least squares and Huber

    Raises:
        UnsupportedDerivative: absolute and eps-insensitive losses, whose
            ``psi'`` vanishes almost everywhere
    """
    x = np.asarray(x, dtype=float)
    if spec.kind is LossKind.LS:
        out = np.ones_like(x)
    elif spec.kind is LossKind.HUBER:
        out = (np.abs(x) < spec.threshold(scale)).astype(float)
    else:
        raise UnsupportedDerivative(
            "psi' is not available for the %s loss; use the bootstrap "
            "variance instead" % spec.kind.value)
    return out if out.ndim else float(out)
