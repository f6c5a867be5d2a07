"""Dynamical complexity measures.

Three families, sharing no state:

* Lyapunov spectra by the Benettin method (tangent vectors carried through
  the variational equations, Gram-Schmidt reorthonormalization every
  ``renorm_dt`` time units, exponents = time-averaged log stretching).
* Topological-entropy estimates: the Pesin-style proxy (sum of positive
  Lyapunov exponents, per unit time) and the symbolic word-growth slope
  (per crossing). They estimate different quantities and are validated
  separately; the word-growth value is the one compared against Markov
  entropy rates because it shares per-symbol units.
* Lempel-Ziv 1976 phrase counting of binary sequences (exhaustive
  production parsing, final incomplete phrase counted), normalized as
  c * log2(n) / n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import _native
from .errors import (
    ConfigError,
    DivergenceError,
    IncompleteReductionError,
    InsufficientDataError,
    NotConvergedError,
    StepUnderflowError,
)
from .integrate import _INITIAL_STEP, _MODEL_IDS
from .partition import SymbolSequence

__all__ = [
    "LyapunovConfig",
    "LyapunovResult",
    "TopEntropyEstimate",
    "LZResult",
    "lyapunov_spectrum",
    "topological_entropy_estimate",
    "lz76",
    "binarize_walk",
]


# ---------------------------------------------------------------------------
# Lyapunov spectrum

@dataclass(frozen=True)
class LyapunovConfig:
    renorm_dt: float = 1.0
    t_average: float = 2e5
    t_transient: float = 2e4
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    initial_state: tuple = (0.1, 0.0, 0.0)
    max_norm: float = 1e6
    min_step: float = 1e-12
    n_blocks: int = 50      # tail blocks for the standard-error estimate
    max_se: Optional[float] = None  # raise NotConverged above this
    history_points: int = 512

    def __post_init__(self):
        if self.renorm_dt <= 0 or self.t_average <= 0:
            raise ConfigError("renorm_dt and t_average must be > 0")
        if self.t_average < 10 * self.renorm_dt:
            raise ConfigError("t_average must cover >= 10 renormalizations")
        if self.t_transient < 0:
            raise ConfigError("t_transient must be >= 0")
        if self.n_blocks < 2:
            raise ConfigError("need >= 2 blocks for a standard error")


@dataclass(frozen=True)
class LyapunovResult:
    """Exponents sorted descending, nats per unit time.

    ``se`` pairs with ``exponents``: a block-means standard error over the
    second half of the stretching increments. ``history`` holds running
    estimates (rows are checkpoints, columns the sorted exponents) for
    convergence inspection.
    """

    exponents: tuple
    se: tuple
    history: np.ndarray
    renorm_dt: float
    t_average: float

    @property
    def largest(self) -> float:
        return self.exponents[0]

    def pesin_sum(self) -> float:
        """Sum of positive exponents (nats per unit time)."""
        return float(sum(max(x, 0.0) for x in self.exponents))


def lyapunov_spectrum(params, cfg: LyapunovConfig = LyapunovConfig(),
                      ) -> LyapunovResult:
    """Benettin spectrum of a built-in 3D model.

    The base trajectory first runs ``t_transient`` time units to land on
    the attractor, then tangent stretching is accumulated over
    ``t_average``. Works for any parameter object with a compiled kernel
    (Del Negro, Rinzel, Lorenz, linear diagnostic).
    """
    model = _MODEL_IDS.get(type(params))
    if model is None:
        raise ConfigError(
            f"no compiled kernel for {type(params).__name__}")
    par = params.pack()
    y = np.array(cfg.initial_state, dtype=np.float64)
    dummy = np.empty((0, 3))
    if cfg.t_transient > 0:
        status, t, _, _ = _native._dp45(
            model, 0, par, y, 0.0, cfg.t_transient, _INITIAL_STEP,
            cfg.abs_tol, cfg.rel_tol, cfg.max_norm, cfg.min_step,
            cfg.t_transient, 1.0, 0, dummy)
        _raise_status(status, t)
    n = int(round(cfg.t_average / cfg.renorm_dt))
    increments = np.empty((n, 3))
    status, t = _native._benettin(
        model, par, y, cfg.t_transient, n, cfg.renorm_dt,
        _INITIAL_STEP, cfg.abs_tol, cfg.rel_tol, cfg.max_norm,
        cfg.min_step, increments)
    _raise_status(status, t)

    rates = increments / cfg.renorm_dt
    order = np.argsort(rates.mean(axis=0))[::-1]
    rates = rates[:, order]
    exponents = rates.mean(axis=0)

    tail = rates[n // 2:]
    nb = cfg.n_blocks
    usable = (len(tail) // nb) * nb
    if usable < nb:
        raise NotConvergedError("too few increments for a tail error bar")
    block_means = tail[:usable].reshape(nb, -1, 3).mean(axis=1)
    se = block_means.std(axis=0, ddof=1) / np.sqrt(nb)

    stride = max(1, n // cfg.history_points)
    running = np.cumsum(rates, axis=0) / np.arange(1, n + 1)[:, None]
    history = running[stride - 1::stride]

    if cfg.max_se is not None and (se > cfg.max_se).any():
        raise NotConvergedError(
            f"tail standard errors {np.round(se, 6).tolist()} exceed "
            f"max_se={cfg.max_se:g}")
    return LyapunovResult(exponents=tuple(float(x) for x in exponents),
                          se=tuple(float(x) for x in se),
                          history=history, renorm_dt=cfg.renorm_dt,
                          t_average=cfg.t_average)


def _raise_status(status: int, t: float) -> None:
    if status == _native.STATUS_DIVERGED:
        raise DivergenceError(t, np.inf)
    if status == _native.STATUS_UNDERFLOW:
        raise StepUnderflowError(t, 0.0)
    if status == _native.STATUS_DEGENERATE:
        raise NotConvergedError(
            f"tangent frame became degenerate at t={t:g}; the most "
            "contracted direction underflowed the Gram-Schmidt "
            "orthogonalization -- use a shorter renorm_dt")


# ---------------------------------------------------------------------------
# topological entropy estimates

@dataclass(frozen=True)
class TopEntropyEstimate:
    value: float
    method: str            # "pesin-proxy" | "word-growth"
    units: str             # "per_time" | "per_crossing"
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("pesin-proxy", "word-growth"):
            raise ConfigError(f"unknown method {self.method!r}")


def topological_entropy_estimate(method: str, *,
                                 lyapunov: Optional[LyapunovResult] = None,
                                 mean_return_time: Optional[float] = None,
                                 coords: Optional[np.ndarray] = None,
                                 symbols: Optional[np.ndarray] = None,
                                 m: int = 16, L: int = 10,
                                 min_window: int = 4,
                                 min_range: float = 1e-5,
                                 ) -> TopEntropyEstimate:
    """Estimate topological entropy by one of two methods.

    pesin-proxy: sum of positive Lyapunov exponents, per unit time;
    multiplied by ``mean_return_time`` (per-crossing units) when given.

    word-growth: bin ``coords`` (the return-map coordinate at successive
    crossings) into ``m`` equal cells -- or take pre-binned integer
    ``symbols`` directly -- count distinct words N(n) for n <= L and fit
    the slope of ln N(n) over the contiguous window (length >=
    ``min_window``) with maximal R^2. Per-crossing units. A coordinate
    range narrower than ``min_range`` (a periodic orbit plus integrator
    noise) collapses to a single cell rather than letting the bin grid
    amplify that noise into spurious words.
    """
    if method == "pesin-proxy":
        if lyapunov is None:
            raise ConfigError("pesin-proxy needs a LyapunovResult")
        value = lyapunov.pesin_sum()
        units = "per_time"
        diag = {"exponents": list(lyapunov.exponents)}
        if mean_return_time is not None:
            if mean_return_time <= 0:
                raise ConfigError("mean_return_time must be > 0")
            value *= mean_return_time
            units = "per_crossing"
            diag["mean_return_time"] = mean_return_time
        return TopEntropyEstimate(value, "pesin-proxy", units, diag)

    if method != "word-growth":
        raise ConfigError(f"unknown method {method!r}")
    if (coords is None) == (symbols is None):
        raise ConfigError("word-growth needs exactly one of coords/symbols")
    if symbols is None:
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 1:
            raise ConfigError("coords must be 1-D")
        lo, hi = coords.min(), coords.max()
        if hi - lo < min_range:
            symbols = np.zeros(len(coords), dtype=np.int64)
            m = 1
        else:
            edges = np.linspace(lo, hi, m + 1)
            symbols = np.clip(np.searchsorted(edges, coords, side="right") - 1,
                              0, m - 1)
    else:
        symbols = np.asarray(symbols, dtype=np.int64)
        if symbols.ndim != 1:
            raise ConfigError("symbols must be 1-D")
        if len(symbols) and symbols.min() < 0:
            raise ConfigError("symbols must be nonnegative integers")
        m = max(m, int(symbols.max()) + 1 if len(symbols) else 1)

    n_seq = len(symbols)
    if n_seq < L + min_window:
        raise InsufficientDataError(
            f"sequence of {n_seq} symbols too short for word length {L}")
    counts = _word_counts(symbols, base=m, L=L)
    if counts[-1] > 0.5 * n_seq:
        raise InsufficientDataError(
            f"word counts saturate: N({L}) = {counts[-1]} exceeds half the "
            f"sequence length {n_seq}")

    lnN = np.log(counts)
    ns = np.arange(1, L + 1, dtype=np.float64)
    best = None  # (r2, -length, start, slope, residuals)
    for length in range(min_window, L + 1):
        for i in range(0, L - length + 1):
            x = ns[i:i + length]
            y = lnN[i:i + length]
            slope, icpt = np.polyfit(x, y, 1)
            resid = y - (slope * x + icpt)
            ss_res = float(np.sum(resid ** 2))
            ss_tot = float(np.sum((y - y.mean()) ** 2))
            r2 = 1.0 if ss_tot < 1e-300 else 1.0 - ss_res / ss_tot
            key = (r2, -length, -i)
            if best is None or key > best[0]:
                best = (key, slope, (i + 1, i + length), resid)
    _, slope, window, resid = best
    diag = {
        "N": [int(c) for c in counts],
        "window": window,
        "r2": float(best[0][0]),
        "residuals": resid.tolist(),
        "m": int(m),
        "L": int(L),
    }
    return TopEntropyEstimate(max(float(slope), 0.0), "word-growth",
                              "per_crossing", diag)


def _word_counts(symbols: np.ndarray, base: int, L: int) -> np.ndarray:
    """N(n) = number of distinct length-n words, n = 1..L."""
    out = np.empty(L, dtype=np.int64)
    for n in range(1, L + 1):
        span = len(symbols) - n + 1
        if span <= 0:
            out[n - 1] = out[n - 2] if n > 1 else 0
            continue
        code = np.zeros(span, dtype=np.int64)
        for j in range(n):
            code = code * base + symbols[j:j + span]
        out[n - 1] = len(np.unique(code))
    return out


# ---------------------------------------------------------------------------
# Lempel-Ziv

@dataclass(frozen=True)
class LZResult:
    c: int
    n: int
    normalized: float


def _as_binary_array(seq) -> np.ndarray:
    if isinstance(seq, str):
        try:
            arr = np.array([int(ch) for ch in seq], dtype=np.uint8)
        except ValueError as exc:
            raise ConfigError(f"non-binary character in string: {exc}")
    else:
        arr = np.asarray(seq)
        if arr.dtype == bool:
            arr = arr.astype(np.uint8)
        arr = arr.astype(np.uint8, casting="unsafe")
    if arr.ndim != 1 or arr.size == 0:
        raise ConfigError("need a nonempty 1-D binary sequence")
    if not np.isin(arr, (0, 1)).all():
        raise ConfigError("sequence values must be 0 or 1")
    return arr


def lz76(seq) -> LZResult:
    """LZ76 phrase count of a binary sequence.

    Exhaustive production parsing; the final phrase is counted even when
    incomplete. ``normalized`` is c * log2(n) / n, which tends to 1 for
    i.i.d. fair bits and to 0 for eventually-periodic sequences.
    """
    arr = _as_binary_array(seq)
    c = int(_native._lz76_count(arr))
    n = arr.size
    normalized = c * (np.log2(n) / n) if n > 1 else 0.0
    return LZResult(c=c, n=n, normalized=float(normalized))


def binarize_walk(seq: SymbolSequence, reduction: Mapping[str, int],
                  ) -> np.ndarray:
    """Map every event label through a {0,1}-valued reduction.

    Consecutive duplicates are kept -- the reduced graph generally has
    self-loops, and collapsing them would delete exactly the randomness
    LZ is supposed to see.
    """
    missing = [l for l in seq.alphabet if l not in reduction]
    if missing:
        raise IncompleteReductionError(
            f"reduction misses alphabet labels {missing}")
    bad = {l: v for l, v in reduction.items()
           if l in seq.alphabet and v not in (0, 1)}
    if bad:
        raise IncompleteReductionError(
            f"reduction maps outside {{0,1}}: {bad}")
    return np.array([reduction[l] for l in seq.labels], dtype=np.uint8)
