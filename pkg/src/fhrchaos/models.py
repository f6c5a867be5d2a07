"""FitzHugh-Rinzel vector fields.

Two equivalent three-dimensional forms are provided:

* :class:`DelNegroParams` -- the two-fast / one-slow variant of Del Negro
  et al. (1998), state ``(v, w, z)``::

      v' = a*w - 4*v^3 + 4*v - z
      w' = -(1 + 4*v + w)
      z' = alpha * (b*v - (c*z - z0) / d)

  All parameter studies in this package sweep ``a`` of this form; the
  remaining coefficients default to the fixed study values.

* :class:`RinzelParams` -- the original Rinzel (1987) form, state
  ``(v, w, y)``::

      v' = v - v^3 - w + y + I
      w' = phi * (v + a - b*w)
      y' = eps * (-v + c - d*y)

  Rinzel's parameter listing gives I, eps, phi, a and c only.  The ``b``
  and ``d`` defaults here are the values in common use for the
  FitzHugh-Nagumo backbone and are *not* fixed by the original source;
  override them explicitly if your reference differs.

States are plain float64 numpy arrays of shape (3,).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "DelNegroParams",
    "RinzelParams",
    "delnegro_rhs",
    "delnegro_jacobian",
    "rinzel_rhs",
    "rinzel_jacobian",
    "as_state",
]


def as_state(x) -> np.ndarray:
    """Coerce to a finite float64 state vector of shape (3,)."""
    s = np.asarray(x, dtype=np.float64)
    if s.shape != (3,):
        raise ValueError(f"state must have shape (3,), got {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError(f"state has non-finite entries: {s}")
    return s


def _check_finite(obj, names):
    for name in names:
        val = getattr(obj, name)
        if not math.isfinite(val):
            raise ValueError(f"{type(obj).__name__}.{name} must be finite, got {val}")


@dataclass(frozen=True)
class DelNegroParams:
    """Coefficients of the Del Negro form; ``a`` is the bifurcation parameter."""

    a: float
    alpha: float = 0.006
    b: float = 6.0
    c: float = 1.605
    z0: float = 1.1
    d: float = 3.7

    def __post_init__(self):
        _check_finite(self, ("a", "alpha", "b", "c", "z0", "d"))
        if self.d == 0.0:
            raise ValueError("DelNegroParams.d must be nonzero")
        if self.alpha <= 0.0:
            raise ValueError("DelNegroParams.alpha must be positive")

    def with_a(self, a: float) -> "DelNegroParams":
        return replace(self, a=float(a))

    def rhs(self, t: float, s: np.ndarray) -> np.ndarray:
        return delnegro_rhs(s, self)

    def jacobian(self, s: np.ndarray) -> np.ndarray:
        return delnegro_jacobian(s, self)

    def pack(self) -> np.ndarray:
        """Flat coefficient vector for the compiled kernels."""
        return np.array([self.a, self.alpha, self.b, self.c, self.z0, self.d])


@dataclass(frozen=True)
class RinzelParams:
    """Coefficients of the original Rinzel form.

    ``b`` and ``d`` are not part of the original parameter listing; the
    defaults are conventional FitzHugh-Nagumo values.
    """

    I: float = 0.3125
    eps: float = 0.0001
    phi: float = 0.08
    a: float = 0.7
    b: float = 0.8
    c: float = -0.775
    d: float = 1.0

    def __post_init__(self):
        _check_finite(self, ("I", "eps", "phi", "a", "b", "c", "d"))
        if self.eps <= 0.0:
            raise ValueError("RinzelParams.eps must be positive")
        if self.b == 0.0:
            raise ValueError("RinzelParams.b must be nonzero")

    def rhs(self, t: float, s: np.ndarray) -> np.ndarray:
        return rinzel_rhs(s, self)

    def with_a(self, a: float) -> "RinzelParams":
        return replace(self, a=a)

    def jacobian(self, s: np.ndarray) -> np.ndarray:
        return rinzel_jacobian(s, self)

    def pack(self) -> np.ndarray:
        return np.array([self.I, self.eps, self.phi, self.a, self.b, self.c, self.d])


def delnegro_rhs(s: np.ndarray, p: DelNegroParams) -> np.ndarray:
    """Time derivative of the Del Negro field at state ``s = (v, w, z)``."""
    v, w, z = s
    return np.array(
        [
            p.a * w - 4.0 * v**3 + 4.0 * v - z,
            -(1.0 + 4.0 * v + w),
            p.alpha * (p.b * v - (p.c * z - p.z0) / p.d),
        ]
    )


def delnegro_jacobian(s: np.ndarray, p: DelNegroParams) -> np.ndarray:
    v = s[0]
    return np.array(
        [
            [4.0 - 12.0 * v * v, p.a, -1.0],
            [-4.0, -1.0, 0.0],
            [p.alpha * p.b, 0.0, -p.alpha * p.c / p.d],
        ]
    )


def rinzel_rhs(s: np.ndarray, p: RinzelParams) -> np.ndarray:
    """Time derivative of the original Rinzel field at state ``s = (v, w, y)``."""
    v, w, y = s
    return np.array(
        [
            v - v**3 - w + y + p.I,
            p.phi * (v + p.a - p.b * w),
            p.eps * (-v + p.c - p.d * y),
        ]
    )


def rinzel_jacobian(s: np.ndarray, p: RinzelParams) -> np.ndarray:
    v = s[0]
    return np.array(
        [
            [1.0 - 3.0 * v * v, -1.0, 1.0],
            [p.phi, -p.phi * p.b, 0.0],
            [-p.eps, 0.0, -p.eps * p.d],
        ]
    )
