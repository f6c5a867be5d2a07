"""Reference dynamical systems used for cross-checks and benchmarks.

These are not part of the FitzHugh-Rinzel study itself; they provide
well-understood baselines (known Lyapunov spectra, analytic solutions)
against which the integrators and estimators are validated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LorenzParams", "LinearDiagParams", "harmonic_oscillator"]


@dataclass(frozen=True)
class LorenzParams:
    """Classic Lorenz system; defaults give the standard chaotic attractor."""

    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0

    def rhs(self, t: float, s: np.ndarray) -> np.ndarray:
        x, y, z = s
        return np.array(
            [
                self.sigma * (y - x),
                x * (self.rho - z) - y,
                x * y - self.beta * z,
            ]
        )

    def jacobian(self, s: np.ndarray) -> np.ndarray:
        x, y, z = s
        return np.array(
            [
                [-self.sigma, self.sigma, 0.0],
                [self.rho - z, -1.0, -x],
                [y, x, -self.beta],
            ]
        )

    def pack(self) -> np.ndarray:
        return np.array([self.sigma, self.rho, self.beta])


@dataclass(frozen=True)
class LinearDiagParams:
    """Decoupled linear field x_i' = rate_i * x_i (exact exponents known)."""

    rates: tuple[float, float, float] = (-1.0, -2.0, -3.0)

    def rhs(self, t: float, s: np.ndarray) -> np.ndarray:
        return np.asarray(self.rates) * s

    def jacobian(self, s: np.ndarray) -> np.ndarray:
        return np.diag(self.rates)

    def pack(self) -> np.ndarray:
        return np.array(self.rates, dtype=float)


def harmonic_oscillator(t: float, s: np.ndarray) -> np.ndarray:
    """Planar rotation x' = y, y' = -x; energy x^2 + y^2 is conserved."""
    return np.array([s[1], -s[0]])
