"""Parameter sweeps over the slow-gate coupling ``a``.

Each grid point runs the full pipeline independently: integrate, detect
section crossings, symbolize, estimate the chain, and compute whichever
measures the config requests (entropy_rate, h_top, lyapunov, lz). Points
are embarrassingly parallel; all randomness derives from the config seed
xor the grid index, so worker count cannot perturb any value and the
output table is byte-identical for 1 or N workers.

Two unit conventions meet here: Markov entropy rate is nats per *event*
(region entry) while word-growth h_top is nats per *crossing* (one
crossing per burst cycle with the default section). The pesin column is
converted to per-crossing units via the mean return time so the three
entropy columns of the CSV share a decade.

Chains are estimated with ``observed_only=True``: periodic windows
legitimately never visit some regions, and a sweep that errored at every
periodic point would be useless. Single-partition analyses outside sweeps
keep the strict default.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .complexity import (
    LyapunovConfig,
    binarize_walk,
    lz76,
    lyapunov_spectrum,
    topological_entropy_estimate,
)
from .errors import ConfigError, FhrChaosError, MissingMeasureError
from .integrate import IntegratorConfig, attractor_sample
from .markov import entropy_rate, estimate_chain, simulate_walk, stationary
from .models import DelNegroParams
from .partition import PartitionSpec, builtin_partition, symbolize
from .refine import EntropyReport
from .sections import (
    DEFAULT_RETURN_AXIS,
    DEFAULT_SECTION,
    PlaneSection,
    crossings_to_array,
    detect_crossings,
)

__all__ = [
    "SweepConfig",
    "SweepRow",
    "run_sweep",
    "run_point",
    "sweep_rows_to_csv",
    "sweep_rows_to_json",
    "sweep_rows_from_csv",
    "sweep_rows_from_json",
    "rows_to_complexity_csv",
    "compare_report",
]

MEASURES = frozenset({"entropy_rate", "h_top", "lyapunov", "lz"})

CSV_HEADER = ("a,h_rate,htop_words,htop_pesin,lambda1,lambda2,lambda3,"
              "lambda1_se,lambda2_se,lambda3_se,lz_c,lz_norm,error")

COMPLEXITY_CSV_HEADER = ("a,lambda1,lambda2,lambda3,htop_pesin,htop_words,"
                         "lz_c,lz_norm")


def _default_integrator() -> IntegratorConfig:
    # desk-scale profile: ~1500 burst cycles per point
    return IntegratorConfig(t_transient=2e4, t_record=6e4, sample_dt=0.05)


def _default_lyapunov() -> LyapunovConfig:
    return LyapunovConfig(t_average=4e4, t_transient=2e4)


@dataclass(frozen=True)
class SweepConfig:
    a_min: float = 0.7136
    a_max: float = 0.718
    a_step: float = 5e-5
    params: DelNegroParams = field(
        default_factory=lambda: DelNegroParams(a=0.7136))
    integrator: IntegratorConfig = field(default_factory=_default_integrator)
    section: PlaneSection = field(default_factory=lambda: DEFAULT_SECTION)
    return_axis: int = DEFAULT_RETURN_AXIS
    partition: PartitionSpec = field(
        default_factory=lambda: builtin_partition("primitive3"))
    measures: frozenset = frozenset({"entropy_rate", "h_top", "lz"})
    lyapunov: LyapunovConfig = field(default_factory=_default_lyapunov)
    word_bins: int = 16
    word_length: int = 10
    walk_len: int = 100_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "measures", frozenset(self.measures))
        if not (self.a_min < self.a_max):
            raise ConfigError("a_min must be < a_max")
        if self.a_step <= 0:
            raise ConfigError("a_step must be > 0")
        if not self.measures:
            raise ConfigError("measures must be nonempty")
        unknown = self.measures - MEASURES
        if unknown:
            raise ConfigError(f"unknown measures {sorted(unknown)}; "
                              f"choose from {sorted(MEASURES)}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.walk_len < 2:
            raise ConfigError("walk_len must be >= 2")

    def grid(self) -> list:
        n = int(np.floor((self.a_max - self.a_min) / self.a_step + 1e-9)) + 1
        return [float(self.a_min + self.a_step * i) for i in range(n)]

    def with_(self, **kw) -> "SweepConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class SweepRow:
    a: float
    h_rate: Optional[float] = None
    htop_words: Optional[float] = None
    htop_pesin: Optional[float] = None
    lambdas: Optional[tuple] = None
    lambda_se: Optional[tuple] = None
    lz_c: Optional[int] = None
    lz_norm: Optional[float] = None
    error: Optional[str] = None


def run_point(cfg: SweepConfig, index: int) -> SweepRow:
    """Run one grid point; failures come back as an error-tagged row."""
    a = float(cfg.grid()[index])
    try:
        return _measure_point(cfg, index, a)
    except (FhrChaosError, ValueError) as exc:
        return SweepRow(a=a, error=f"{type(exc).__name__}: {exc}")


def _measure_point(cfg: SweepConfig, index: int, a: float) -> SweepRow:
    params = cfg.params.with_a(a)
    need_traj = cfg.measures & {"entropy_rate", "h_top", "lz"}
    seq = None
    coords = None
    mean_return = None
    if need_traj:
        traj = attractor_sample(params, cfg.integrator)
        crossings = detect_crossings(traj, cfg.section)
        if len(crossings) >= 2:
            coords = crossings_to_array(crossings)[:, cfg.return_axis]
            t_cross = np.array([c.t for c in crossings])
            mean_return = float(np.diff(t_cross).mean())
        if cfg.measures & {"entropy_rate", "lz"}:
            seq = symbolize(traj, cfg.partition)

    h_rate = htop_words = htop_pesin = lz_norm = None
    lambdas = lambda_se = None
    lz_c = None

    if seq is not None and cfg.measures & {"entropy_rate", "lz"}:
        _, chain = estimate_chain(seq, observed_only=True)
        pi = stationary(chain)
        if "entropy_rate" in cfg.measures:
            h_rate = entropy_rate(chain, pi)
        if "lz" in cfg.measures:
            head = cfg.partition.labels[1]
            reduction = {l: 1 if l == head else 0 for l in chain.labels}
            walk = simulate_walk(chain, cfg.walk_len, seed=cfg.seed ^ index)
            res = lz76(binarize_walk(walk, reduction))
            lz_c, lz_norm = res.c, res.normalized

    if "h_top" in cfg.measures:
        if coords is None:
            raise MissingMeasureError("h_top needs >= 2 section crossings")
        htop_words = topological_entropy_estimate(
            "word-growth", coords=coords, m=cfg.word_bins,
            L=cfg.word_length).value

    if "lyapunov" in cfg.measures:
        res = lyapunov_spectrum(params, cfg.lyapunov)
        lambdas = res.exponents
        lambda_se = res.se
        if mean_return is not None:
            htop_pesin = topological_entropy_estimate(
                "pesin-proxy", lyapunov=res,
                mean_return_time=mean_return).value

    return SweepRow(a=a, h_rate=h_rate, htop_words=htop_words,
                    htop_pesin=htop_pesin, lambdas=lambdas,
                    lambda_se=lambda_se, lz_c=lz_c, lz_norm=lz_norm)


def run_sweep(cfg: SweepConfig, progress=None) -> list:
    """All grid points, optionally in parallel; rows sorted by a."""
    n = len(cfg.grid())
    indices = range(n)
    if cfg.workers == 1:
        rows = []
        for i in indices:
            rows.append(run_point(cfg, i))
            if progress is not None:
                progress(i + 1, n)
        return rows
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        futures = {i: pool.submit(run_point, cfg, i) for i in indices}
        rows = []
        for i in indices:
            rows.append(futures[i].result())
            if progress is not None:
                progress(i + 1, n)
    return rows


# ---------------------------------------------------------------------------
# serialization

def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _row_cells(r: SweepRow) -> list:
    lam = r.lambdas or (None, None, None)
    se = r.lambda_se or (None, None, None)
    return [_cell(r.a), _cell(r.h_rate), _cell(r.htop_words),
            _cell(r.htop_pesin), _cell(lam[0]), _cell(lam[1]), _cell(lam[2]),
            _cell(se[0]), _cell(se[1]), _cell(se[2]),
            _cell(r.lz_c), _cell(r.lz_norm), _cell(r.error)]


def sweep_rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in rows:
        writer.writerow(_row_cells(r))
    return buf.getvalue()


def sweep_rows_to_json(rows: Sequence[SweepRow]) -> str:
    out = []
    for r in rows:
        out.append({
            "a": r.a, "h_rate": r.h_rate, "htop_words": r.htop_words,
            "htop_pesin": r.htop_pesin,
            "lambdas": list(r.lambdas) if r.lambdas else None,
            "lambda_se": list(r.lambda_se) if r.lambda_se else None,
            "lz_c": r.lz_c, "lz_norm": r.lz_norm, "error": r.error,
        })
    return json.dumps(out, indent=2)


def sweep_rows_from_json(text: str) -> list:
    """Inverse of :func:`sweep_rows_to_json` (gap-scan reads sweep output)."""
    rows = []
    for d in json.loads(text):
        rows.append(SweepRow(
            a=d["a"], h_rate=d.get("h_rate"),
            htop_words=d.get("htop_words"), htop_pesin=d.get("htop_pesin"),
            lambdas=tuple(d["lambdas"]) if d.get("lambdas") else None,
            lambda_se=tuple(d["lambda_se"]) if d.get("lambda_se") else None,
            lz_c=d.get("lz_c"), lz_norm=d.get("lz_norm"),
            error=d.get("error")))
    return rows


def sweep_rows_from_csv(text: str) -> list:
    """Inverse of :func:`sweep_rows_to_csv`."""
    reader = csv.DictReader(io.StringIO(text))
    expected = CSV_HEADER.split(",")
    if reader.fieldnames != expected:
        raise ConfigError(f"sweep CSV header {reader.fieldnames} != {expected}")

    def num(cell, parse=float):
        return parse(cell) if cell not in ("", None) else None

    rows = []
    for d in reader:
        lam = tuple(num(d[k]) for k in ("lambda1", "lambda2", "lambda3"))
        se = tuple(num(d[k]) for k in ("lambda1_se", "lambda2_se", "lambda3_se"))
        rows.append(SweepRow(
            a=float(d["a"]), h_rate=num(d["h_rate"]),
            htop_words=num(d["htop_words"]), htop_pesin=num(d["htop_pesin"]),
            lambdas=None if lam[0] is None else lam,
            lambda_se=None if se[0] is None else se,
            lz_c=num(d["lz_c"], int), lz_norm=num(d["lz_norm"]),
            error=d["error"] or None))
    return rows


def rows_to_complexity_csv(rows: Sequence[SweepRow]) -> str:
    """The fixed 8-column per-parameter complexity table.

    Requires lyapunov + h_top + lz measures on every non-error row;
    error rows are skipped (they have no values to tabulate).
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPLEXITY_CSV_HEADER.split(","))
    for r in rows:
        if r.error is not None:
            continue
        if r.lambdas is None or r.htop_words is None or r.lz_c is None:
            raise MissingMeasureError(
                "complexity CSV needs lyapunov, h_top and lz measures")
        writer.writerow([
            _cell(r.a), _cell(r.lambdas[0]), _cell(r.lambdas[1]),
            _cell(r.lambdas[2]), _cell(r.htop_pesin), _cell(r.htop_words),
            _cell(r.lz_c), _cell(r.lz_norm)])
    return buf.getvalue()


def compare_report(rows: Sequence[SweepRow]) -> list:
    """EntropyReports (h_top vs h_rate) from sweep rows.

    Needs the entropy_rate and h_top measures; error rows are skipped. A
    missing lz measure is tolerated (reports carry 0.0) since the gap
    analysis never reads it.
    """
    out = []
    for r in rows:
        if r.error is not None:
            continue
        if r.h_rate is None or r.htop_words is None:
            raise MissingMeasureError(
                "compare_report needs entropy_rate and h_top measures")
        out.append(EntropyReport(
            a=r.a, h_rate=r.h_rate, h_top=r.htop_words,
            lz_norm=r.lz_norm if r.lz_norm is not None else 0.0))
    return out
