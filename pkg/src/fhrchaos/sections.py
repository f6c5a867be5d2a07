"""Poincare sections: crossing detection, return maps, bifurcation scans.

A :class:`PlaneSection` is the surface {x : normal . x = offset} with a
direction filter. Crossings of a sampled trajectory are located by sign
changes of the section function between consecutive samples and refined by
bisection on a cubic Hermite interpolant (when the trajectory carries its
vector field) or on linear interpolation otherwise.

Default section geometry
------------------------
The bursting orbit of the Del Negro form crosses v = 0.8 upward exactly once
per burst cycle (only the leading large spike exceeds v ~ 0.93; the later
spikes stay below ~0.59 over the whole swept window). A plane through the
mean of any single coordinate is crossed several times per cycle, which
makes the per-cycle return map ambiguous, so the shipped default is the
large-spike plane with direction ``positive`` and the return-map coordinate
is z (the slow variable), the classic slow-variable return map for bursters.
Both are plain config values; nothing downstream depends on the default.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import TooFewCrossingsError
from .integrate import Trajectory

__all__ = [
    "PlaneSection",
    "Crossing",
    "PeriodicityVerdict",
    "DEFAULT_SECTION",
    "DEFAULT_RETURN_AXIS",
    "detect_crossings",
    "return_map",
    "bifurcation_scan",
    "classify_periodicity",
    "crossings_to_array",
]

#: bisection refinement: stop when |section function| < this
CROSSING_TOL = 1e-10
#: and give up after this many bisection steps regardless
MAX_BISECT = 60

#: axis used for return maps / bifurcation scans unless overridden (z)
DEFAULT_RETURN_AXIS = 2


@dataclass(frozen=True)
class PlaneSection:
    """Oriented plane {x : normal . x = offset}.

    Args:
        normal: 3-vector, need not be unit length (normalized on init).
        offset: plane offset in the *normalized* normal direction when
            ``normalize`` runs; i.e. offset is rescaled together with normal.
        direction: 'positive' keeps crossings where normal . x is increasing,
            'negative' the decreasing ones, 'both' keeps all.
    """

    normal: tuple = (1.0, 0.0, 0.0)
    offset: float = 0.8
    direction: str = "positive"

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64)
        if n.shape != (3,) or not np.all(np.isfinite(n)):
            raise ValueError("normal must be a finite 3-vector")
        norm = float(np.linalg.norm(n))
        if norm == 0.0:
            raise ValueError("normal must be nonzero")
        object.__setattr__(self, "normal", tuple(n / norm))
        object.__setattr__(self, "offset", float(self.offset) / norm)
        if self.direction not in ("positive", "negative", "both"):
            raise ValueError(f"bad direction {self.direction!r}")

    def value(self, state) -> float:
        """Signed section function normal . x - offset."""
        s = np.asarray(state, dtype=np.float64)
        return float(s @ np.asarray(self.normal)) - self.offset

    def values(self, states: np.ndarray) -> np.ndarray:
        return states @ np.asarray(self.normal) - self.offset


#: shipped default: the large-spike plane (see module docstring)
DEFAULT_SECTION = PlaneSection(normal=(1.0, 0.0, 0.0), offset=0.8,
                               direction="positive")


@dataclass(frozen=True)
class Crossing:
    """One section crossing: time, interpolated state, crossing direction."""

    t: float
    state: tuple
    direction: int  # +1 if section function was increasing, -1 otherwise


@dataclass(frozen=True)
class PeriodicityVerdict:
    """Outcome of :func:`classify_periodicity`.

    kind is 'periodic', 'aperiodic' or 'undetermined'; period is set only
    for 'periodic'. residual is the max Euclidean mismatch of the best
    candidate period.
    """

    kind: str
    period: Optional[int]
    residual: float

    @property
    def is_periodic(self) -> bool:
        return self.kind == "periodic"


# Hermite interpolation on one sampling interval, in the scaled variable
# theta = (t - t_i) / dt. Coefficient solves are set up once against the
# monomial basis: rows constrain value/1st/2nd derivative at theta = 0, 1.
def _hermite_basis(order: int) -> np.ndarray:
    ncoef = 2 * order  # order = #constraints per endpoint (2 cubic, 3 quintic)
    M = np.zeros((ncoef, ncoef))
    for side, theta in enumerate((0.0, 1.0)):
        for der in range(order):
            for k in range(der, ncoef):
                c = 1.0
                for j in range(der):
                    c *= k - j
                M[side * order + der, k] = c * theta ** (k - der)
    return np.linalg.inv(M)

_CUBIC_INV = _hermite_basis(2)
_QUINTIC_INV = _hermite_basis(3)


def _interval_poly(traj: Trajectory, i: int) -> np.ndarray:
    """Monomial coefficients (ncoef, dim) of the interpolant on [t_i, t_i+1]."""
    y0, y1 = traj.samples[i], traj.samples[i + 1]
    dt = traj.sample_dt
    if traj.field is None:
        return np.stack([y0, y1 - y0])
    t0, t1 = traj.time_at(i), traj.time_at(i + 1)
    f0 = np.asarray(traj.field(t0, y0), dtype=np.float64)
    f1 = np.asarray(traj.field(t1, y1), dtype=np.float64)
    if traj.jac is None:
        rhs = np.stack([y0, dt * f0, y1, dt * f1])
        return _CUBIC_INV @ rhs
    a0 = np.asarray(traj.jac(y0), dtype=np.float64) @ f0
    a1 = np.asarray(traj.jac(y1), dtype=np.float64) @ f1
    rhs = np.stack([y0, dt * f0, dt * dt * a0, y1, dt * f1, dt * dt * a1])
    return _QUINTIC_INV @ rhs


def _poly_eval(coef: np.ndarray, theta: float) -> np.ndarray:
    out = coef[-1].copy()
    for row in coef[-2::-1]:
        out *= theta
        out += row
    return out


def detect_crossings(traj: Trajectory, sec: PlaneSection) -> list[Crossing]:
    """Locate section crossings of a uniformly sampled trajectory.

    Assumes sample_dt is small enough that the section function changes
    sign at most once per sampling interval; crossings faster than that
    are merged or lost. Samples lying exactly on the plane count as
    positive side, so no crossing is reported twice.

    Each bracketing interval is refined by bisection on a Hermite
    interpolant -- quintic when the trajectory carries field and Jacobian,
    cubic with field only, linear otherwise -- until
    |normal . x - offset| < 1e-10 or 60 halvings.

    Returns crossings in time order with the direction filter applied.
    """
    g = sec.values(traj.samples)
    sign = np.where(g >= 0.0, 1, -1)
    flips = np.flatnonzero(sign[1:] != sign[:-1])
    if flips.size == 0:
        return []

    dt = traj.sample_dt
    times = traj.times
    n = np.asarray(sec.normal)
    out: list[Crossing] = []
    for i in flips:
        direction = 1 if g[i + 1] > g[i] else -1
        if sec.direction == "positive" and direction < 0:
            continue
        if sec.direction == "negative" and direction > 0:
            continue
        coef = _interval_poly(traj, i)

        lo, hi = 0.0, 1.0
        glo = g[i]
        state = traj.samples[i]
        tc = times[i]
        for _ in range(MAX_BISECT):
            mid = 0.5 * (lo + hi)
            state = _poly_eval(coef, mid)
            gm = float(state @ n) - sec.offset
            tc = times[i] + mid * dt
            if abs(gm) < CROSSING_TOL:
                break
            if (gm < 0.0) == (glo < 0.0):
                lo = mid
                glo = gm
            else:
                hi = mid
        out.append(Crossing(t=float(tc), state=tuple(float(x) for x in state),
                            direction=direction))
    return out


def crossings_to_array(crossings: Sequence[Crossing]) -> np.ndarray:
    """Stack crossing states into an (n, 3) array."""
    return np.array([c.state for c in crossings], dtype=np.float64)


def return_map(crossings: Sequence[Crossing],
               coord: int = DEFAULT_RETURN_AXIS) -> list[tuple]:
    """Successive-crossing pairs (c_k, c_{k+1}) of one coordinate.

    Args:
        crossings: output of detect_crossings (>= 2 entries).
        coord: state axis to read (0=v, 1=w, 2=z/y).
    """
    if len(crossings) < 2:
        raise TooFewCrossingsError(
            f"return map needs >= 2 crossings, got {len(crossings)}")
    c = [cr.state[coord] for cr in crossings]
    return list(zip(c[:-1], c[1:]))


@dataclass(frozen=True)
class ScanPoint:
    """One bifurcation-scan grid point: parameter, crossing coords, error."""

    a: float
    coords: np.ndarray = field(default_factory=lambda: np.empty(0))
    error: Optional[str] = None


def bifurcation_scan(a_grid: Sequence[float], base, sec: PlaneSection,
                     coord: int = DEFAULT_RETURN_AXIS,
                     cfg=None,
                     progress: Optional[Callable[[int, float], None]] = None,
                     ) -> list[ScanPoint]:
    """Crossing-coordinate multiset per parameter value (bifurcation diagram).

    Integrates the Del Negro (or Rinzel) system at each a in the grid,
    detects section crossings post-transient and records the selected
    coordinate of every crossing. Integration failures are recorded in the
    point's ``error`` field and the scan continues.

    Args:
        a_grid: parameter values to visit, any order (output keeps it).
        base: ModelParams providing every field except the swept ``a``.
        sec: Poincare section.
        coord: state axis recorded per crossing.
        cfg: IntegratorConfig; defaults to the module default config.
        progress: optional callback (index, a) before each point.
    """
    from .integrate import IntegratorConfig, attractor_sample

    if cfg is None:
        cfg = IntegratorConfig()
    out: list[ScanPoint] = []
    for i, a in enumerate(a_grid):
        if progress is not None:
            progress(i, a)
        try:
            traj = attractor_sample(base.with_a(float(a)), cfg)
            crossings = detect_crossings(traj, sec)
            coords = np.array([c.state[coord] for c in crossings])
            out.append(ScanPoint(a=float(a), coords=coords))
        except Exception as exc:  # record and continue, per scan contract
            out.append(ScanPoint(a=float(a), coords=np.empty(0),
                                 error=f"{type(exc).__name__}: {exc}"))
    return out


def classify_periodicity(crossings: Sequence[Crossing], tol: float = 1e-5,
                         max_period: int = 16) -> PeriodicityVerdict:
    """Smallest period p such that crossings repeat within tol.

    Checks ||c_{k+p} - c_k||_2 < tol for *every* k in the sequence, for
    p = 1..max_period; the first p that holds wins. If no p holds, the
    verdict is 'aperiodic' when the best residual exceeds 100*tol and
    'undetermined' in between (borderline orbits near a bifurcation or
    not yet settled).

    Requires at least 3*max_period crossings so each candidate period is
    tested against several repetitions.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    pts = crossings_to_array(crossings)
    if len(pts) < 3 * max_period:
        raise TooFewCrossingsError(
            f"need >= {3 * max_period} crossings, got {len(pts)}")
    best = np.inf
    for p in range(1, max_period + 1):
        residual = float(np.max(np.linalg.norm(pts[p:] - pts[:-p], axis=1)))
        if residual < tol:
            return PeriodicityVerdict(kind="periodic", period=p,
                                      residual=residual)
        best = min(best, residual)
    kind = "aperiodic" if best >= 100.0 * tol else "undetermined"
    return PeriodicityVerdict(kind=kind, period=None, residual=best)
