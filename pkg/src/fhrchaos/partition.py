"""Labeled attractor regions and trajectory symbolization.

A partition is an *ordered* list of labeled regions, each a boolean
combination (and/or/not) of geometric primitives: half-spaces
``{x : n . x >= c}``, axis-aligned boxes, and balls. Overlaps are resolved
by order (first match wins); points matching no region are *background*.

Symbolization turns a sampled trajectory into region-entry events
``(label, entry_t, dwell)``:

1. classify every sample (first matching region, else background);
2. run-length encode;
3. merge re-entries: consecutive runs of the same label whose gap is
   shorter than ``min_dwell`` belong to one event (dwell = summed
   in-region time, entry = first entry);
4. drop events whose total dwell is below ``min_dwell`` (boundary grazes);
5. background handling: with policy ``bridge`` background spans simply
   vanish; with ``error`` a background span longer than ``timeout``
   between two kept events raises LostInBackgroundError;
6. collapse consecutive same-label events (a background excursion that
   returns to the region it left emits no new event).

The result never contains two consecutive identical labels and every
event's dwell is at least ``min_dwell``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    ConfigError,
    LostInBackgroundError,
    TooFewRegionsError,
    UnknownLabelError,
)
from .integrate import Trajectory

__all__ = [
    "HalfSpace",
    "Box",
    "Ball",
    "And",
    "Or",
    "Not",
    "Region",
    "PartitionSpec",
    "SymbolEvent",
    "SymbolSequence",
    "classify_point",
    "classify_many",
    "symbolize",
    "merge_regions",
    "split_region",
    "predicate_from_dict",
    "load_partition",
    "save_partition",
    "builtin_partition",
]


# ---------------------------------------------------------------------------
# predicates

class Predicate:
    """Base class; subclasses implement vectorized membership tests."""

    def contains(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return self.contains(np.atleast_2d(np.asarray(pts, dtype=np.float64)))

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class HalfSpace(Predicate):
    """{x : normal . x >= offset}; the normal is kept as given."""

    normal: tuple
    offset: float

    def __post_init__(self):
        n = tuple(float(x) for x in self.normal)
        if len(n) != 3 or not all(np.isfinite(n)) or not any(n):
            raise ConfigError("halfspace normal must be a finite nonzero 3-vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    def contains(self, pts):
        return pts @ np.asarray(self.normal) >= self.offset

    def to_dict(self):
        return {"op": "halfspace", "normal": list(self.normal),
                "offset": self.offset}


@dataclass(frozen=True)
class Box(Predicate):
    """Axis-aligned box lo <= x <= hi; None bounds mean unbounded."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(-np.inf if x is None else float(x) for x in self.lo)
        hi = tuple(np.inf if x is None else float(x) for x in self.hi)
        if len(lo) != 3 or len(hi) != 3:
            raise ConfigError("box bounds must be 3-vectors")
        if any(l > h for l, h in zip(lo, hi)):
            raise ConfigError("box has lo > hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, pts):
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def to_dict(self):
        def clean(v):
            return [None if not np.isfinite(x) else x for x in v]
        return {"op": "box", "lo": clean(self.lo), "hi": clean(self.hi)}


@dataclass(frozen=True)
class Ball(Predicate):
    """Closed Euclidean ball."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(x) for x in self.center)
        if len(c) != 3 or not all(np.isfinite(c)):
            raise ConfigError("ball center must be a finite 3-vector")
        if not (self.radius > 0):
            raise ConfigError("ball radius must be > 0")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, pts):
        d = pts - np.asarray(self.center)
        return np.einsum("ij,ij->i", d, d) <= self.radius**2

    def to_dict(self):
        return {"op": "ball", "center": list(self.center),
                "radius": self.radius}


@dataclass(frozen=True)
class And(Predicate):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ConfigError("'and' needs at least one term")

    def contains(self, pts):
        out = self.terms[0].contains(pts)
        for t in self.terms[1:]:
            out &= t.contains(pts)
        return out

    def to_dict(self):
        return {"op": "and", "terms": [t.to_dict() for t in self.terms]}


@dataclass(frozen=True)
class Or(Predicate):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ConfigError("'or' needs at least one term")

    def contains(self, pts):
        out = self.terms[0].contains(pts)
        for t in self.terms[1:]:
            out |= t.contains(pts)
        return out

    def to_dict(self):
        return {"op": "or", "terms": [t.to_dict() for t in self.terms]}


@dataclass(frozen=True)
class Not(Predicate):
    term: Predicate

    def contains(self, pts):
        return ~self.term.contains(pts)

    def to_dict(self):
        return {"op": "not", "term": self.term.to_dict()}


_PRIMITIVES = {"halfspace", "box", "ball"}


def predicate_from_dict(d: Mapping) -> Predicate:
    """Inverse of Predicate.to_dict (partition file deserialization)."""
    op = d.get("op")
    if op == "halfspace":
        return HalfSpace(tuple(d["normal"]), d["offset"])
    if op == "box":
        return Box(tuple(d["lo"]), tuple(d["hi"]))
    if op == "ball":
        return Ball(tuple(d["center"]), d["radius"])
    if op == "and":
        return And(tuple(predicate_from_dict(t) for t in d["terms"]))
    if op == "or":
        return Or(tuple(predicate_from_dict(t) for t in d["terms"]))
    if op == "not":
        return Not(predicate_from_dict(d["term"]))
    raise ConfigError(f"unknown predicate op {op!r}")


# ---------------------------------------------------------------------------
# regions and partitions

@dataclass(frozen=True)
class Region:
    label: str
    predicate: Predicate

    def __post_init__(self):
        if not self.label or not isinstance(self.label, str):
            raise ConfigError("region label must be a nonempty string")


@dataclass(frozen=True)
class PartitionSpec:
    """Ordered labeled regions plus dwell/background rules.

    background_policy is 'bridge' (default: background spans between events
    are skipped) or 'error' (a background span longer than ``timeout`` time
    units raises LostInBackgroundError during symbolize).
    """

    regions: tuple
    min_dwell: float = 1.0
    background_policy: str = "bridge"
    timeout: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        if len(self.regions) < 2:
            raise TooFewRegionsError("a partition needs at least 2 regions")
        labels = [r.label for r in self.regions]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate region labels in {labels}")
        if self.min_dwell < 0:
            raise ConfigError("min_dwell must be >= 0")
        if self.background_policy not in ("bridge", "error"):
            raise ConfigError(
                f"bad background_policy {self.background_policy!r}")
        if self.background_policy == "error":
            if self.timeout is None or self.timeout <= 0:
                raise ConfigError("policy 'error' requires timeout > 0")

    @property
    def labels(self) -> tuple:
        return tuple(r.label for r in self.regions)

    def index_of(self, label: str) -> int:
        for i, r in enumerate(self.regions):
            if r.label == label:
                return i
        raise UnknownLabelError(f"no region labeled {label!r}")

    def to_dict(self) -> dict:
        d = {
            "min_dwell": self.min_dwell,
            "background_policy": self.background_policy,
            "regions": [
                {"label": r.label, "predicate": r.predicate.to_dict()}
                for r in self.regions
            ],
        }
        if self.timeout is not None:
            d["timeout"] = self.timeout
        return d


def load_partition(path) -> PartitionSpec:
    """Read a partition file (JSON schema mirroring PartitionSpec.to_dict)."""
    with open(path) as fh:
        d = json.load(fh)
    try:
        regions = tuple(
            Region(r["label"], predicate_from_dict(r["predicate"]))
            for r in d["regions"]
        )
        return PartitionSpec(
            regions=regions,
            min_dwell=d.get("min_dwell", 1.0),
            background_policy=d.get("background_policy", "bridge"),
            timeout=d.get("timeout"),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed partition file {path}: {exc}") from exc


def save_partition(spec: PartitionSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


def builtin_partition(name: str) -> PartitionSpec:
    """Load one of the partition files shipped with the package.

    'primitive3' is the 3-region partition calibrated at a=0.71385,
    'advanced4' its 4-region refinement calibrated at a=0.7175 (see
    scripts/calibrate_partitions.py for how the thresholds were fitted).
    """
    ref = resources.files("fhrchaos").joinpath(f"partitions/{name}.json")
    if not ref.is_file():
        raise ConfigError(f"no builtin partition named {name!r}")
    with resources.as_file(ref) as path:
        return load_partition(path)


# ---------------------------------------------------------------------------
# classification

def classify_many(pts: np.ndarray, spec: PartitionSpec) -> np.ndarray:
    """Region index per point (-1 for background), order-resolved."""
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    codes = np.full(pts.shape[0], -1, dtype=np.int64)
    unassigned = np.ones(pts.shape[0], dtype=bool)
    for i, region in enumerate(spec.regions):
        if not unassigned.any():
            break
        idx = np.flatnonzero(unassigned)
        hit = region.predicate.contains(pts[idx])
        codes[idx[hit]] = i
        unassigned[idx[hit]] = False
    return codes


def classify_point(s, spec: PartitionSpec) -> Optional[str]:
    """Label of the first region containing s, or None (background)."""
    code = int(classify_many(np.asarray(s, dtype=np.float64)[None, :], spec)[0])
    return None if code < 0 else spec.regions[code].label


# ---------------------------------------------------------------------------
# symbol sequences

@dataclass(frozen=True)
class SymbolEvent:
    label: str
    entry_t: float
    dwell: float


@dataclass(frozen=True)
class SymbolSequence:
    """Ordered region-entry events over a fixed alphabet.

    Sequences produced by :func:`symbolize` never repeat a label in
    consecutive events; sequences produced by random walks on a chain with
    self-loops may (see markov.simulate_walk), so the invariant is checked
    only where it is guaranteed.
    """

    alphabet: tuple
    events: tuple

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "events", tuple(self.events))
        known = set(self.alphabet)
        for e in self.events:
            if e.label not in known:
                raise UnknownLabelError(
                    f"event label {e.label!r} not in alphabet")

    def __len__(self) -> int:
        return len(self.events)

    @property
    def labels(self) -> list:
        return [e.label for e in self.events]

    def map_labels(self, mapping: Mapping, collapse: bool = False,
                   ) -> "SymbolSequence":
        """Relabel events through ``mapping``.

        With ``collapse`` consecutive events that map to the same label are
        merged (dwell summed, first entry kept) -- the lumping used when
        regions are merged. Without it duplicates are kept, which is what
        the binary reduction of a random walk wants.
        """
        missing = [l for l in self.alphabet if l not in mapping]
        if missing:
            raise UnknownLabelError(f"mapping misses labels {missing}")
        alphabet = tuple(dict.fromkeys(mapping[l] for l in self.alphabet))
        out = []
        for e in self.events:
            lab = mapping[e.label]
            if collapse and out and out[-1].label == lab:
                prev = out[-1]
                out[-1] = SymbolEvent(lab, prev.entry_t, prev.dwell + e.dwell)
            else:
                out.append(SymbolEvent(lab, e.entry_t, e.dwell))
        return SymbolSequence(alphabet=alphabet, events=tuple(out))

    @classmethod
    def from_labels(cls, labels: Sequence[str],
                    alphabet: Optional[Sequence[str]] = None,
                    ) -> "SymbolSequence":
        """Build a unit-dwell sequence from bare labels (walks, tests)."""
        if alphabet is None:
            alphabet = tuple(dict.fromkeys(labels))
        events = tuple(
            SymbolEvent(label=l, entry_t=float(i), dwell=1.0)
            for i, l in enumerate(labels)
        )
        return cls(alphabet=tuple(alphabet), events=events)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("label,entry_t,dwell\n")
            for e in self.events:
                fh.write(f"{e.label},{e.entry_t!r},{e.dwell!r}\n")


def _rle(codes: np.ndarray):
    """(code, start, length) runs of a 1-D integer array."""
    change = np.flatnonzero(codes[1:] != codes[:-1]) + 1
    starts = np.r_[0, change]
    ends = np.r_[change, codes.size]
    return [(int(codes[s]), int(s), int(e - s)) for s, e in zip(starts, ends)]


def symbolize(traj: Trajectory, spec: PartitionSpec,
              return_spans: bool = False):
    """Region-entry event sequence of a trajectory (see module docstring).

    The trajectory should be post-transient and sampled densely relative
    to min_dwell (min_dwell >= a few sample_dt), otherwise single-sample
    visits are lost to quantization.

    With ``return_spans`` also returns, per event, the (start, end) sample
    index span from first entry to last in-region sample -- the hook used
    by refinement to pick representative interior points.
    """
    dt = traj.sample_dt
    codes = classify_many(traj.samples, spec)
    runs = _rle(codes)

    # group same-code runs whose separating gap is shorter than min_dwell
    groups = []  # [code, entry_index, span_end_index, dwell_samples]
    open_group = {}  # code -> index into groups of the growable group
    for code, start, length in runs:
        if code < 0:
            continue
        g = open_group.get(code)
        if g is not None and (start - groups[g][2]) * dt < spec.min_dwell:
            groups[g][2] = start + length
            groups[g][3] += length
        else:
            groups.append([code, start, start + length, length])
            open_group[code] = len(groups) - 1
    groups.sort(key=lambda g: g[1])

    # drop boundary grazes: total dwell below min_dwell
    kept = [g for g in groups if g[3] * dt >= spec.min_dwell]

    if spec.background_policy == "error":
        spans = [(g[1], g[2]) for g in kept]
        for (_, prev_end), (next_start, _) in zip(spans[:-1], spans[1:]):
            gap = (next_start - prev_end) * dt
            if gap > spec.timeout:
                raise LostInBackgroundError(
                    f"background span of {gap:g} time units starting at "
                    f"t={traj.time_at(prev_end):g} exceeds timeout "
                    f"{spec.timeout:g}")

    # emit events, collapsing consecutive same-label groups
    events = []
    spans = []
    for code, entry, span_end, dwell_samples in kept:
        label = spec.regions[code].label
        entry_t = traj.time_at(entry)
        dwell = dwell_samples * dt
        if events and events[-1].label == label:
            prev = events[-1]
            events[-1] = SymbolEvent(label, prev.entry_t, prev.dwell + dwell)
            spans[-1] = (spans[-1][0], span_end)
        else:
            events.append(SymbolEvent(label, entry_t, dwell))
            spans.append((entry, span_end))
    seq = SymbolSequence(alphabet=spec.labels, events=tuple(events))
    if return_spans:
        return seq, spans
    return seq


# ---------------------------------------------------------------------------
# partition edits

def merge_regions(spec: PartitionSpec, labels: Sequence[str],
                  ) -> PartitionSpec:
    """Replace the named regions by their union under the first label.

    The merged region sits at the position of the earliest named region;
    all other regions keep their order and labels.
    """
    labels = list(dict.fromkeys(labels))
    idx = [spec.index_of(l) for l in labels]
    if len(idx) == 1:
        return spec
    if len(spec.regions) - len(idx) + 1 < 2:
        raise TooFewRegionsError("merge would leave fewer than 2 regions")
    union = Or(tuple(spec.regions[i].predicate for i in sorted(idx)))
    merged = Region(labels[0], union)
    drop = set(idx)
    out = []
    for i, region in enumerate(spec.regions):
        if i == min(idx):
            out.append(merged)
        elif i not in drop:
            out.append(region)
    return PartitionSpec(regions=tuple(out), min_dwell=spec.min_dwell,
                         background_policy=spec.background_policy,
                         timeout=spec.timeout)


def split_region(spec: PartitionSpec, label: str, primitive: Predicate,
                 ) -> PartitionSpec:
    """Split a region by a separating primitive into labels '<l>a'/'<l>b'.

    Child 'a' is (predicate AND primitive), child 'b' is
    (predicate AND NOT primitive); both keep the original position. A
    degenerate primitive (containing all or none of the region) leaves one
    child empty -- validate with a point sample before trusting the result.
    """
    i = spec.index_of(label)
    region = spec.regions[i]
    child_a = Region(label + "a", And((region.predicate, primitive)))
    child_b = Region(label + "b", And((region.predicate, Not(primitive))))
    out = spec.regions[:i] + (child_a, child_b) + spec.regions[i + 1:]
    return PartitionSpec(regions=out, min_dwell=spec.min_dwell,
                         background_policy=spec.background_policy,
                         timeout=spec.timeout)
