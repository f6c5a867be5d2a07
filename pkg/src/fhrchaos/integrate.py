"""Trajectory integration.

Two paths share the same Dormand-Prince 5(4) and classic RK4 schemes:

* :func:`attractor_sample` dispatches the built-in vector fields
  (:class:`~fhrchaos.models.DelNegroParams`, RinzelParams, LorenzParams,
  LinearDiagParams) to compiled kernels -- this is the production path for
  long FitzHugh-Rinzel runs.
* :func:`integrate` accepts any Python callable ``f(t, y) -> dy`` and runs
  the same schemes in numpy; intended for synthetic fields and tests.

Both discard ``t_transient`` and return the window
``[t_transient, t_transient + t_record]`` sampled uniformly every
``sample_dt`` through the scheme's dense interpolant.  Integration is
deterministic: identical configuration yields bit-identical trajectories.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import _native
from .errors import ConfigError, DivergenceError, StepUnderflowError
from .models import DelNegroParams, RinzelParams
from .systems import LinearDiagParams, LorenzParams

__all__ = ["IntegratorConfig", "Trajectory", "integrate", "attractor_sample"]

_MODEL_IDS = {
    DelNegroParams: _native.MODEL_DELNEGRO,
    RinzelParams: _native.MODEL_RINZEL,
    LorenzParams: _native.MODEL_LORENZ,
    LinearDiagParams: _native.MODEL_LINEAR3,
}

_METHOD_ALIASES = {
    "rk45": "rk45",
    "adaptive-rk45": "rk45",
    "rk4": "rk4",
    "fixed-step-rk4": "rk4",
}

_INITIAL_STEP = 1e-3  # fixed for determinism


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45"
    step: float = 0.01  # rk4 only
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    t_transient: float = 5e4
    t_record: float = 2e5
    sample_dt: float = 0.05
    initial_state: tuple[float, ...] = (0.1, 0.0, 0.0)
    max_norm: float = 1e6
    min_step: float = 1e-12

    def __post_init__(self):
        if _METHOD_ALIASES.get(self.method) is None:
            raise ConfigError(f"unknown integrator method {self.method!r}")
        if self.t_transient < 0:
            raise ConfigError("t_transient must be >= 0")
        if self.t_record <= 0:
            raise ConfigError("t_record must be > 0")
        if self.sample_dt <= 0:
            raise ConfigError("sample_dt must be > 0")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ConfigError("tolerances must be > 0")
        if self.step <= 0:
            raise ConfigError("step must be > 0")
        if not all(math.isfinite(x) for x in self.initial_state):
            raise ConfigError("initial_state must be finite")

    @property
    def scheme(self) -> str:
        return _METHOD_ALIASES[self.method]

    def n_samples(self) -> int:
        return int(math.floor(self.t_record / self.sample_dt + 1e-9)) + 1

    def with_(self, **kw) -> "IntegratorConfig":
        return replace(self, **kw)


@dataclass
class Trajectory:
    """Uniformly sampled solution path, post-transient.

    ``field`` optionally holds the generating vector field so downstream
    consumers (section crossing refinement) can build a Hermite interpolant
    between samples without storing derivatives; ``jac`` its state Jacobian,
    which upgrades that interpolant from cubic to quintic (y'' = J f).
    """

    t0: float
    sample_dt: float
    samples: np.ndarray
    field: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    jac: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 2 or self.samples.shape[0] == 0:
            raise ValueError("samples must be a nonempty (n, dim) array")
        if self.sample_dt <= 0:
            raise ValueError("sample_dt must be > 0")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("trajectory contains non-finite samples")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.sample_dt * np.arange(len(self))

    def time_at(self, index: int) -> float:
        return self.t0 + self.sample_dt * index

    def to_csv(self, path) -> None:
        names = ("v", "w", "z") if self.dim == 3 else tuple(f"x{i+1}" for i in range(self.dim))
        with open(path, "w") as fh:
            fh.write("t," + ",".join(names) + "\n")
            t = self.times
            for k in range(len(self)):
                row = ",".join(repr(float(x)) for x in self.samples[k])
                fh.write(f"{float(t[k])!r},{row}\n")


def integrate(rhs: Callable[[float, np.ndarray], np.ndarray],
              cfg: IntegratorConfig) -> Trajectory:
    """Integrate an arbitrary vector field and sample the recorded window."""
    y0 = np.array(cfg.initial_state, dtype=np.float64)
    n = cfg.n_samples()
    out = np.empty((n, y0.size))
    ts0 = cfg.t_transient
    t_end = cfg.t_transient + cfg.t_record
    if cfg.scheme == "rk45":
        _py_dp45(rhs, y0, 0.0, t_end, cfg, ts0, n, out)
    else:
        _py_rk4(rhs, y0, 0.0, t_end, cfg, ts0, n, out)
    return Trajectory(t0=ts0, sample_dt=cfg.sample_dt, samples=out, field=rhs)


def attractor_sample(params, cfg: IntegratorConfig) -> Trajectory:
    """Post-transient trajectory of a built-in model via the compiled path."""
    model = _MODEL_IDS.get(type(params))
    if model is None:
        raise ConfigError(
            f"no compiled kernel for {type(params).__name__}; use integrate() "
            "with params.rhs"
        )
    if len(cfg.initial_state) != 3:
        raise ConfigError("built-in models are three-dimensional")
    par = params.pack()
    y = np.array(cfg.initial_state, dtype=np.float64)
    n = cfg.n_samples()
    out = np.empty((n, 3))
    ts0 = cfg.t_transient
    t_end = cfg.t_transient + cfg.t_record
    if cfg.scheme == "rk45":
        status, t, _, _ = _native._dp45(
            model, 0, par, y, 0.0, t_end, _INITIAL_STEP,
            cfg.abs_tol, cfg.rel_tol, cfg.max_norm, cfg.min_step,
            ts0, cfg.sample_dt, n, out,
        )
    else:
        status, t, _ = _native._rk4(
            model, 0, par, y, 0.0, t_end, cfg.step, cfg.max_norm,
            ts0, cfg.sample_dt, n, out,
        )
    _raise_for_status(status, t, cfg)
    return Trajectory(t0=ts0, sample_dt=cfg.sample_dt, samples=out,
                      field=params.rhs, jac=params.jacobian)


def _raise_for_status(status: int, t: float, cfg: IntegratorConfig) -> None:
    if status == _native.STATUS_DIVERGED:
        raise DivergenceError(t, cfg.max_norm)
    if status == _native.STATUS_UNDERFLOW:
        raise StepUnderflowError(t, cfg.min_step)


# ---------------------------------------------------------------------------
# numpy implementations (arbitrary callables / dimensions)

_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200,
               22 / 525, -1 / 40])
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    _B[:6],
)
_P = np.array([
    [1.0, -2.8535800653862835, 3.0717434641059005, -1.1270175653862835],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 4.023133379230305, -6.249321565289, 2.675424484351598],
    [0.0, -3.7324019615885042, 10.068970589843675, -5.685526961588504],
    [0.0, 2.5548038301849423, -6.399112377351017, 3.5219323679207912],
    [0.0, -1.3744241142186024, 3.272657752246729, -1.7672812570757455],
    [0.0, 1.3824689317781436, -3.764937863556287, 2.382468931778144],
])


def _py_dp45(f, y, t, t_end, cfg, ts0, n_samples, out):
    nd = y.size
    K = np.empty((7, nd))
    h = _INITIAL_STEP
    isamp = 0
    while isamp < n_samples and ts0 + isamp * cfg.sample_dt <= t + 1e-12:
        out[isamp] = y
        isamp += 1
    K[0] = f(t, y)
    tiny = 1e-12 * (abs(t_end) + 1.0)
    while t < t_end - tiny:
        if h < cfg.min_step:
            raise StepUnderflowError(t, h)
        hs = min(h, t_end - t)
        for s in range(1, 6):
            K[s] = f(t + _C[s] * hs, y + hs * (_A[s - 1] @ K[:s]))
        ynew = y + hs * (_B[:6] @ K[:6])
        K[6] = f(t + hs, ynew)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(ynew))
        err = math.sqrt(float(np.mean((hs * (_E @ K) / scale) ** 2)))
        if err <= 1.0:
            y_old = y.copy()
            y = ynew
            t_new = t + hs
            while isamp < n_samples:
                ts = ts0 + isamp * cfg.sample_dt
                if ts > t_new + 1e-12:
                    break
                th = min(max((ts - t) / hs, 0.0), 1.0)
                p = np.array([th, th**2, th**3, th**4])
                out[isamp] = y_old + hs * (K.T @ (_P @ p))
                isamp += 1
            t = t_new
            K[0] = K[6]
            norm = float(np.linalg.norm(y))
            if not math.isfinite(norm) or norm > cfg.max_norm:
                raise DivergenceError(t, norm)
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err**-0.2))
            h = hs * fac
        else:
            fac = 0.9 * err**-0.2
            if not math.isfinite(fac) or fac < 0.2:
                fac = 0.2
            h = hs * min(1.0, fac)
    while isamp < n_samples:
        out[isamp] = y
        isamp += 1


def _py_rk4(f, y, t, t_end, cfg, ts0, n_samples, out):
    h = cfg.step
    isamp = 0
    while isamp < n_samples and ts0 + isamp * cfg.sample_dt <= t + 1e-12:
        out[isamp] = y
        isamp += 1
    k1 = f(t, y)
    tiny = 1e-12 * (abs(t_end) + 1.0)
    while t < t_end - tiny:
        hs = min(h, t_end - t)
        k2 = f(t + 0.5 * hs, y + 0.5 * hs * k1)
        k3 = f(t + 0.5 * hs, y + 0.5 * hs * k2)
        k4 = f(t + hs, y + hs * k3)
        y_old = y
        y = y + hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = t + hs
        fend = f(t_new, y)
        while isamp < n_samples:
            ts = ts0 + isamp * cfg.sample_dt
            if ts > t_new + 1e-12:
                break
            th = min(max((ts - t) / hs, 0.0), 1.0)
            h00 = (1.0 + 2.0 * th) * (1.0 - th) ** 2
            h10 = th * (1.0 - th) ** 2
            h01 = th * th * (3.0 - 2.0 * th)
            h11 = th * th * (th - 1.0)
            out[isamp] = h00 * y_old + h10 * hs * k1 + h01 * y + h11 * hs * fend
            isamp += 1
        t = t_new
        k1 = fend
        norm = float(np.linalg.norm(y))
        if not math.isfinite(norm) or norm > cfg.max_norm:
            raise DivergenceError(t, norm)
    while isamp < n_samples:
        out[isamp] = y
        isamp += 1
