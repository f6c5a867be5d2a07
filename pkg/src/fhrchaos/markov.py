"""Flow-induced Markov chains over partition labels.

The chain is estimated from a symbol sequence by counting consecutive
label pairs and row-normalizing -- no smoothing, so the support of P is
exactly the observed transition graph. Entropy rate is reported in nats;
subshift entropy is the log Perron root of the 0/1 support adjacency,
i.e. the topological entropy of the edge shift the graph defines.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import _native
from .errors import (
    ConfigError,
    NoCycleError,
    NotConvergedError,
    NotIrreducibleError,
    ZeroRowError,
)
from .partition import SymbolSequence

__all__ = [
    "TransitionCounts",
    "MarkovChain",
    "StationaryDist",
    "estimate_chain",
    "check_irreducible_aperiodic",
    "stationary",
    "entropy_rate",
    "subshift_entropy",
    "simulate_walk",
    "chain_to_json",
    "chain_from_json",
    "chain_to_dot",
]

_ROW_TOL = 1e-12
_PI_TOL = 1e-10


@dataclass(frozen=True)
class TransitionCounts:
    labels: tuple
    counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        c = np.asarray(self.counts, dtype=np.int64)
        n = len(self.labels)
        if c.shape != (n, n):
            raise ConfigError(f"counts shape {c.shape} does not match "
                              f"{n} labels")
        if (c < 0).any():
            raise ConfigError("negative transition count")
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class MarkovChain:
    labels: tuple
    P: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        P = np.asarray(self.P, dtype=np.float64)
        n = len(self.labels)
        if P.shape != (n, n):
            raise ConfigError(f"P shape {P.shape} does not match {n} labels")
        if (P < 0).any() or (P > 1).any():
            raise ConfigError("P entries must lie in [0, 1]")
        err = np.abs(P.sum(axis=1) - 1.0).max()
        if err > _ROW_TOL:
            raise ConfigError(f"P rows sum to 1 within {_ROW_TOL:g} "
                              f"(worst error {err:g})")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    @property
    def n_states(self) -> int:
        return len(self.labels)

    @property
    def support(self) -> np.ndarray:
        """0/1 adjacency of transitions with positive probability."""
        return (self.P > 0).astype(np.int64)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class StationaryDist:
    pi: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.float64)
        if pi.ndim != 1 or (pi < 0).any():
            raise ConfigError("pi must be a nonnegative vector")
        if abs(pi.sum() - 1.0) > _ROW_TOL:
            raise ConfigError("pi must sum to 1")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    def __getitem__(self, i):
        return self.pi[i]

    def __len__(self):
        return len(self.pi)


def _as_labels(seq: Union[SymbolSequence, Sequence[str]]):
    if isinstance(seq, SymbolSequence):
        return seq.labels, tuple(seq.alphabet)
    labels = list(seq)
    return labels, tuple(dict.fromkeys(labels))


def estimate_chain(seq: Union[SymbolSequence, Sequence[str]],
                   observed_only: bool = False):
    """Count consecutive label pairs and row-normalize.

    Returns (TransitionCounts, MarkovChain). Every alphabet label must
    occur as the source of at least one transition, otherwise ZeroRowError
    names the offending labels -- a region the trajectory never leaves (or
    never reaches) signals a partition or sampling problem. Passing
    ``observed_only=True`` instead restricts the chain to the labels that
    do have outgoing transitions, which is the right thing in bulk
    parameter sweeps where periodic windows legitimately skip regions.
    """
    labels, alphabet = _as_labels(seq)
    if len(labels) < 2:
        raise ZeroRowError("need at least 2 events to estimate a chain")
    index = {l: i for i, l in enumerate(alphabet)}
    counts = np.zeros((len(alphabet), len(alphabet)), dtype=np.int64)
    for a, b in zip(labels[:-1], labels[1:]):
        counts[index[a], index[b]] += 1
    row_sums = counts.sum(axis=1)
    if observed_only:
        keep = row_sums > 0
        # transitions into a dropped label (one that only ever appears as
        # the final event) leave with it
        counts = counts[np.ix_(keep, keep)]
        alphabet = tuple(l for l, k in zip(alphabet, keep) if k)
        row_sums = counts.sum(axis=1)
        if counts.shape[0] < 1 or (row_sums == 0).any():
            raise ZeroRowError("no usable transitions after restriction")
    elif (row_sums == 0).any():
        dead = [l for l, s in zip(alphabet, row_sums) if s == 0]
        raise ZeroRowError(f"labels with no outgoing transitions: {dead}")
    tc = TransitionCounts(alphabet, counts)
    P = counts / row_sums[:, None]
    return tc, MarkovChain(alphabet, P)


def check_irreducible_aperiodic(chain: MarkovChain):
    """(irreducible, aperiodic) of the support graph.

    Irreducible: one strongly connected component. Aperiodic: every SCC
    that contains a cycle has gcd of its cycle lengths equal to 1 (for an
    irreducible chain this is the usual chain period).
    """
    A = chain.support
    n_comp, comp = connected_components(A, directed=True, connection="strong")
    irreducible = n_comp == 1
    aperiodic = True
    for c in range(n_comp):
        nodes = np.flatnonzero(comp == c)
        sub = A[np.ix_(nodes, nodes)]
        if not sub.any():
            continue
        g = _scc_period(sub)
        if g != 1:
            aperiodic = False
    return irreducible, aperiodic


def _scc_period(A: np.ndarray) -> int:
    """gcd of cycle lengths of a strongly connected 0/1 graph.

    BFS from node 0 assigns levels; every edge (u, v) contributes
    level[u] + 1 - level[v] to the gcd.
    """
    n = A.shape[0]
    level = np.full(n, -1, dtype=np.int64)
    level[0] = 0
    queue = [0]
    while queue:
        u = queue.pop()
        for v in np.flatnonzero(A[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u in range(n):
        for v in np.flatnonzero(A[u]):
            g = math.gcd(g, int(level[u] + 1 - level[v]))
    return abs(g)


def stationary(chain: MarkovChain, tol: float = 1e-12,
               max_iter: int = 200_000) -> StationaryDist:
    """Unique stationary distribution of an irreducible chain.

    Power iteration from the uniform vector; a periodic chain makes the
    iteration cycle instead of settle, in which case we fall back to the
    linear solve (I - P^T) pi = 0 with the normalization row appended.
    """
    irreducible, _ = check_irreducible_aperiodic(chain)
    if not irreducible:
        raise NotIrreducibleError(
            "stationary distribution is not unique: support graph is not "
            "strongly connected")
    P = chain.P
    n = chain.n_states
    pi = np.full(n, 1.0 / n)
    converged = False
    for _ in range(max_iter):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.abs(nxt - pi).max() < tol:
            pi = nxt
            converged = True
            break
        pi = nxt
    if not converged:
        A = np.vstack([(np.eye(n) - P.T), np.ones((1, n))])
        b = np.zeros(n + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
        pi = np.clip(pi, 0.0, None)
        pi /= pi.sum()
    resid = np.abs(pi @ P - pi).max()
    if resid > _PI_TOL:
        raise NotConvergedError(
            f"stationary solve residual {resid:g} exceeds {_PI_TOL:g}")
    return StationaryDist(pi)


def entropy_rate(chain: MarkovChain,
                 pi: Optional[StationaryDist] = None) -> float:
    """h = -sum_i pi_i sum_j P_ij ln P_ij, in nats per event."""
    if pi is None:
        pi = stationary(chain)
    P = chain.P
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(P > 0, P * np.log(P), 0.0)
    h = float(-(np.asarray(pi.pi)[:, None] * plogp).sum())
    return h if h > 0.0 else 0.0  # kill the -0.0 a deterministic row produces


def subshift_entropy(graph, tol: float = 1e-13,
                     max_iter: int = 100_000) -> float:
    """ln of the Perron root of a 0/1 support adjacency (nats/event).

    Accepts a MarkovChain, TransitionCounts, or any square nonnegative
    array; anything positive counts as an edge. Power iteration runs on
    A + I, whose Perron root is 1 + rho(A), so it converges even when the
    graph is a bare cycle (rho-eigenvalue not dominant on A itself). A 0/1
    adjacency has rho(A) = 0 exactly when the graph is acyclic, and
    rho(A) >= 1 otherwise, so a root below 1/2 means no cycle.
    """
    if isinstance(graph, MarkovChain):
        A = graph.support.astype(np.float64)
    elif isinstance(graph, TransitionCounts):
        A = (graph.counts > 0).astype(np.float64)
    else:
        A = (np.asarray(graph) > 0).astype(np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError("support graph must be a square matrix")
    n = A.shape[0]
    B = A + np.eye(n)
    x = np.full(n, 1.0 / n)
    lam = 1.0
    for _ in range(max_iter):
        y = B @ x
        lam_new = float(y.max())
        y /= lam_new
        if np.abs(y - x).max() < tol and abs(lam_new - lam) < tol:
            lam = lam_new
            break
        x, lam = y, lam_new
    rho = lam - 1.0
    if rho < 0.5:
        raise NoCycleError("support graph has no cycle; subshift is empty")
    return float(np.log(rho))


def simulate_walk(chain: MarkovChain, n: int, seed: int) -> SymbolSequence:
    """n-step random walk, started from a stationary draw.

    Deterministic per seed. Unlike symbolize() output, the walk may repeat
    a label on consecutive steps whenever the chain has self-loops.
    """
    if n < 1:
        raise ConfigError("walk length must be >= 1")
    pi = stationary(chain)
    rng = np.random.default_rng(seed)
    start = int(rng.choice(chain.n_states, p=pi.pi))
    out = np.empty(n - 1, dtype=np.int64)
    if n > 1:
        cum = np.cumsum(chain.P, axis=1)
        uniforms = rng.random(n - 1)
        _native._simulate_walk(cum, start, uniforms, out)
    codes = np.r_[start, out]
    labels = [chain.labels[c] for c in codes]
    return SymbolSequence.from_labels(labels, alphabet=chain.labels)


# ---------------------------------------------------------------------------
# serialization

def chain_to_json(tc: TransitionCounts, chain: MarkovChain,
                  pi: Optional[StationaryDist] = None) -> str:
    d = {
        "labels": list(chain.labels),
        "counts": tc.counts.tolist(),
        "P": chain.P.tolist(),
        "pi": None if pi is None else pi.pi.tolist(),
    }
    return json.dumps(d, indent=2)


def chain_from_json(text: str):
    d = json.loads(text)
    try:
        labels = tuple(d["labels"])
        tc = TransitionCounts(labels, np.asarray(d["counts"]))
        chain = MarkovChain(labels, np.asarray(d["P"]))
        pi = None if d.get("pi") is None else StationaryDist(
            np.asarray(d["pi"]))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed chain JSON: {exc}") from exc
    return tc, chain, pi


def chain_to_dot(chain: MarkovChain, digits: int = 3) -> str:
    """GraphViz edge list of the support graph, probabilities as labels."""
    lines = ["digraph chain {"]
    for i, src in enumerate(chain.labels):
        for j, dst in enumerate(chain.labels):
            p = chain.P[i, j]
            if p > 0:
                lines.append(
                    f'  "{src}" -> "{dst}" [label="{p:.{digits}f}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
