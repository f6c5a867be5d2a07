"""Partition-refinement feedback loop.

The working loop: build per-parameter EntropyReports (Markov entropy rate
vs word-growth topological entropy plus binary LZ), flag parameters whose
entropy gap is large, test whether the symbol sequence looks higher than
first order, propose a geometric split of the region whose interior points
best separate by successor statistics, and validate a refinement by the
non-strict criterion (entropy rate must not drop, |gap| must not grow).

Suggestions are never auto-applied: callers get a patched partition file
plus a JSON evidence record and rerun the pipeline with the edited file.
"""

from __future__ import annotations

import collections
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.spatial.distance import jensenshannon
from sklearn.cluster import KMeans
from sklearn.metrics import silhouette_score

from .complexity import binarize_walk, lz76, topological_entropy_estimate
from .errors import (
    ConfigError,
    InsufficientDataError,
    MismatchedParametersError,
    NoCandidateError,
)
from .markov import entropy_rate, estimate_chain, simulate_walk, stationary
from .partition import (
    HalfSpace,
    PartitionSpec,
    Predicate,
    SymbolSequence,
    classify_many,
    split_region,
    symbolize,
)

__all__ = [
    "EntropyReport",
    "FlaggedInterval",
    "OrderTestResult",
    "RefinementSuggestion",
    "DEFAULT_GAP_THRESHOLD",
    "make_entropy_report",
    "entropy_gap_scan",
    "markov_order_test",
    "event_points",
    "suggest_refinement",
    "suggestion_patch",
    "suggestion_evidence_json",
    "validate_refinement",
    "vanishing_regions",
]

# The gap scale of the shipped partitions peaks near 0.17 nats/symbol in
# the chaotic window, so the flagging default sits at 0.1.
DEFAULT_GAP_THRESHOLD = 0.1


@dataclass(frozen=True)
class EntropyReport:
    """Per-parameter entropy comparison; gap is derived, never stored."""

    a: float
    h_rate: float
    h_top: float
    lz_norm: float
    visit_fractions: Optional[Mapping[str, float]] = None

    def __post_init__(self):
        for name in ("a", "h_rate", "h_top", "lz_norm"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"EntropyReport.{name} must be finite")

    @property
    def gap(self) -> float:
        return self.h_top - self.h_rate


def make_entropy_report(a: float, seq: SymbolSequence, coords: np.ndarray,
                        *, m: int = 16, L: int = 10,
                        walk_len: int = 100_000, walk_seed: int = 0,
                        reduction: Optional[Mapping[str, int]] = None,
                        ) -> EntropyReport:
    """Assemble the full report for one parameter value.

    ``seq`` is the symbolized trajectory, ``coords`` the return-map
    coordinate at successive section crossings (feeds word-growth h_top).
    The LZ value comes from a seeded random walk on the estimated chain,
    binarized through ``reduction`` -- by default the indicator of the
    partition's second region, which is the head region in the shipped
    partition files.
    """
    _, chain = estimate_chain(seq)
    pi = stationary(chain)
    h_rate = entropy_rate(chain, pi)
    h_top = topological_entropy_estimate("word-growth", coords=coords,
                                         m=m, L=L).value
    if reduction is None:
        reduction = {l: 1 if i == 1 else 0
                     for i, l in enumerate(seq.alphabet)}
    walk = simulate_walk(chain, walk_len, seed=walk_seed)
    lz_norm = lz76(binarize_walk(walk, reduction)).normalized
    counts = collections.Counter(seq.labels)
    n = max(len(seq), 1)
    fractions = {l: counts.get(l, 0) / n for l in seq.alphabet}
    return EntropyReport(a=a, h_rate=h_rate, h_top=h_top, lz_norm=lz_norm,
                         visit_fractions=fractions)


# ---------------------------------------------------------------------------
# gap scan

@dataclass(frozen=True)
class FlaggedInterval:
    a_lo: float
    a_hi: float
    representative: float   # argmax-gap parameter inside the interval
    max_gap: float

    def __contains__(self, a: float) -> bool:
        return self.a_lo <= a <= self.a_hi


def entropy_gap_scan(reports: Sequence[EntropyReport],
                     threshold: float = DEFAULT_GAP_THRESHOLD,
                     ) -> list:
    """Contiguous parameter intervals where gap > threshold.

    Reports must be sorted by ``a``. Returns FlaggedInterval records, each
    carrying the argmax-gap representative parameter.
    """
    a_vals = [r.a for r in reports]
    if any(x > y for x, y in zip(a_vals[:-1], a_vals[1:])):
        raise ConfigError("reports must be sorted by parameter a")
    out = []
    run = []
    for r in reports:
        if r.gap > threshold:
            run.append(r)
        elif run:
            out.append(_close_interval(run))
            run = []
    if run:
        out.append(_close_interval(run))
    return out


def _close_interval(run):
    best = max(run, key=lambda r: r.gap)
    return FlaggedInterval(a_lo=run[0].a, a_hi=run[-1].a,
                           representative=best.a, max_gap=best.gap)


# ---------------------------------------------------------------------------
# Markov order test

@dataclass(frozen=True)
class OrderTestResult:
    best_order: int
    h: tuple            # h_0 .. h_max_order, conditional block entropies
    drops: tuple        # h_k - h_{k+1} for k = 1 .. max_order-1
    bounds: tuple       # surrogate significance bound per drop
    n_events: int
    n_surrogates: int


def _block_entropy(codes: np.ndarray, k: int, base: int) -> float:
    """Plug-in entropy of the empirical k-gram distribution (nats)."""
    span = len(codes) - k + 1
    word = np.zeros(span, dtype=np.int64)
    for j in range(k):
        word = word * base + codes[j:j + span]
    _, counts = np.unique(word, return_counts=True)
    p = counts / span
    return float(-(p * np.log(p)).sum())


def _conditional_entropies(codes: np.ndarray, max_order: int, base: int):
    """h_k = H(X_{k+1} | X_1..X_k) = H_{k+1} - H_k for k = 0..max_order."""
    H = [0.0] + [_block_entropy(codes, k, base)
                 for k in range(1, max_order + 2)]
    return tuple(H[k + 1] - H[k] for k in range(max_order + 1))


def markov_order_test(seq: SymbolSequence, max_order: int = 3,
                      n_surrogates: int = 20, seed: int = 0,
                      min_factor: int = 5) -> OrderTestResult:
    """Estimate the memory order of a symbol sequence.

    Computes plug-in conditional block entropies h_k and declares the best
    order the smallest k >= 1 whose entropy drop to order k+1 is within
    the noise of surrogates simulated from the fitted order-k model (the
    drop under a true order-k law is zero, so anything inside the
    surrogate spread is noise). If every tested drop is significant the
    test returns max_order -- the data support at least that much memory.
    """
    if max_order < 1:
        raise ConfigError("max_order must be >= 1")
    labels = seq.labels if isinstance(seq, SymbolSequence) else list(seq)
    alphabet = (tuple(seq.alphabet) if isinstance(seq, SymbolSequence)
                else tuple(dict.fromkeys(labels)))
    base = len(alphabet)
    index = {l: i for i, l in enumerate(alphabet)}
    codes = np.array([index[l] for l in labels], dtype=np.int64)
    n = len(codes)
    need = min_factor * base ** (max_order + 1)
    if n < need:
        raise InsufficientDataError(
            f"{n} events < {need} required for order {max_order} over "
            f"{base} symbols")

    h = _conditional_entropies(codes, max_order, base)
    rng = np.random.default_rng(seed)
    drops = []
    bounds = []
    best = max_order
    found = False
    for k in range(1, max_order):
        drop = h[k] - h[k + 1]
        surr = [_surrogate_drop(codes, k, base, rng)
                for _ in range(n_surrogates)]
        bound = float(np.quantile(surr, 0.95))
        drops.append(drop)
        bounds.append(bound)
        if not found and drop <= bound:
            best = k
            found = True
    return OrderTestResult(best_order=best, h=h, drops=tuple(drops),
                           bounds=tuple(bounds), n_events=n,
                           n_surrogates=n_surrogates)


def _surrogate_drop(codes: np.ndarray, k: int, base: int, rng) -> float:
    """h_k - h_{k+1} of one sequence simulated from the fitted order-k law."""
    n = len(codes)
    span = n - k
    ctx = np.zeros(span, dtype=np.int64)
    for j in range(k):
        ctx = ctx * base + codes[j:j + span]
    nxt = codes[k:]
    table = {}
    for c, x in zip(ctx, nxt):
        table.setdefault(int(c), []).append(int(x))
    cum = {c: _cumdist(xs, base) for c, xs in table.items()}

    sim = np.empty(n, dtype=np.int64)
    sim[:k] = codes[:k]
    c = int(ctx[0])
    us = rng.random(n - k)
    mod = base ** (k - 1) if k > 0 else 1
    for i in range(k, n):
        row = cum.get(c)
        if row is None:    # context never observed: restart from data
            c = int(ctx[rng.integers(0, span)])
            row = cum[c]
        x = int(np.searchsorted(row, us[i - k], side="right"))
        x = min(x, base - 1)
        sim[i] = x
        c = (c % mod) * base + x if k > 0 else 0
    hs = _conditional_entropies(sim, k + 1, base)
    return hs[k] - hs[k + 1]


def _cumdist(xs, base):
    counts = np.bincount(xs, minlength=base).astype(np.float64)
    return np.cumsum(counts / counts.sum())


# ---------------------------------------------------------------------------
# split suggestion

@dataclass(frozen=True)
class RefinementSuggestion:
    target: str
    primitive: Predicate
    evidence: str           # entropy-gap | markov-order | cluster-split
    score: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.evidence not in ("entropy-gap", "markov-order",
                                 "cluster-split"):
            raise ConfigError(f"unknown evidence tag {self.evidence!r}")


def event_points(traj, spec: PartitionSpec):
    """(points, labels, next_labels) -- one interior point per event.

    The representative is the middle sample of the event's span (falling
    back to the entry sample if a background excursion happens to sit at
    the midpoint). The final event is dropped: it has no successor.
    """
    seq, spans = symbolize(traj, spec, return_spans=True)
    if len(seq) < 2:
        raise InsufficientDataError("need at least 2 events")
    pts = []
    for (start, end), event in zip(spans, seq.events):
        mid = (start + end) // 2
        code = int(classify_many(traj.samples[mid][None, :], spec)[0])
        if code < 0 or spec.regions[code].label != event.label:
            mid = start
        pts.append(traj.samples[mid])
    labels = seq.labels
    return (np.asarray(pts[:-1]), labels[:-1], labels[1:])


def suggest_refinement(points: np.ndarray, labels: Sequence[str],
                       next_labels: Sequence[str], spec: PartitionSpec,
                       *, floor: float = 0.05, seed: int = 0,
                       min_points: int = 40) -> RefinementSuggestion:
    """Propose the best single-region split, or raise NoCandidate.

    Per region: 2-means over its member points (10 restarts, seeded);
    score = silhouette x Jensen-Shannon divergence (nats) between the two
    clusters' next-symbol distributions. The returned primitive is the
    perpendicular bisector plane of the cluster centroids. A region whose
    points form one blob, or whose clusters see the same successors,
    scores ~0 and is never proposed.
    """
    points = np.asarray(points, dtype=np.float64)
    if not (len(points) == len(labels) == len(next_labels)):
        raise ConfigError("points, labels, next_labels lengths differ")
    alphabet = spec.labels
    best = None
    skipped = []
    for region_label in alphabet:
        idx = [i for i, l in enumerate(labels) if l == region_label]
        if len(idx) < min_points:
            skipped.append(f"{region_label}: {len(idx)} points < "
                           f"{min_points}")
            continue
        pts = points[idx]
        km = KMeans(n_clusters=2, n_init=10, random_state=seed).fit(pts)
        sizes = np.bincount(km.labels_, minlength=2)
        if sizes.min() < 5:
            skipped.append(f"{region_label}: degenerate 2-means")
            continue
        sil = float(silhouette_score(pts, km.labels_))
        succ = [collections.Counter() for _ in range(2)]
        for j, i in enumerate(idx):
            succ[km.labels_[j]][next_labels[i]] += 1
        support = sorted(succ[0].keys() | succ[1].keys())
        p = np.array([succ[0].get(s, 0) for s in support], dtype=float)
        q = np.array([succ[1].get(s, 0) for s in support], dtype=float)
        p /= p.sum()
        q /= q.sum()
        js_div = float(jensenshannon(p, q, base=np.e) ** 2)
        score = sil * js_div
        if best is None or score > best[0]:
            c0, c1 = km.cluster_centers_
            normal = c1 - c0
            normal /= np.linalg.norm(normal)
            offset = float(normal @ ((c0 + c1) / 2))
            prim = HalfSpace(tuple(normal), offset)
            best = (score, region_label, prim, {
                "silhouette": sil,
                "js_divergence_nats": js_div,
                "cluster_sizes": sizes.tolist(),
                "centroids": [c0.tolist(), c1.tolist()],
                "next_symbol_support": support,
            })
    if best is None or best[0] < floor:
        detail = f"best score {best[0]:.4f} < floor {floor}" if best \
            else "no region had enough points"
        raise NoCandidateError(
            f"{detail}" + (f" (skipped: {'; '.join(skipped)})" if skipped
                           else ""))
    score, target, prim, diag = best
    return RefinementSuggestion(target=target, primitive=prim,
                                evidence="cluster-split", score=score,
                                diagnostics=diag)


def suggestion_patch(spec: PartitionSpec,
                     suggestion: RefinementSuggestion) -> str:
    """Partition-file text with the suggested split applied."""
    patched = split_region(spec, suggestion.target, suggestion.primitive)
    return json.dumps(patched.to_dict(), indent=2) + "\n"


def suggestion_evidence_json(suggestion: RefinementSuggestion) -> str:
    d = {
        "target": suggestion.target,
        "evidence": suggestion.evidence,
        "score": suggestion.score,
        "primitive": suggestion.primitive.to_dict(),
        "diagnostics": suggestion.diagnostics,
    }
    return json.dumps(d, indent=2)


# ---------------------------------------------------------------------------
# validation

def validate_refinement(before: EntropyReport, after: EntropyReport) -> bool:
    """Accept a refinement iff h_rate does not drop and |gap| does not grow.

    Non-strict on both clauses, so a no-op edit validates. Reports must
    describe the same parameter value.
    """
    if before.a != after.a:
        raise MismatchedParametersError(
            f"reports compare different parameters: {before.a} vs {after.a}")
    return (after.h_rate >= before.h_rate
            and abs(after.gap) <= abs(before.gap))


def vanishing_regions(report: EntropyReport, floor: float = 0.01) -> list:
    """Labels whose visit frequency fell below ``floor``.

    Heuristic flag for region disappearance under parameter change; there
    is no principled criterion, so this is reporting only.
    """
    if report.visit_fractions is None:
        return []
    return [l for l, f in report.visit_fractions.items() if f < floor]
