"""Independent reference implementations the test suite checks against.

Everything here is deliberately naive and algorithm-divergent from the
package: different integrators (scipy), different decompositions
(Householder QR, dense eigensolve), dict-and-loop counting instead of
vectorized encodings. Slow is fine; agreeing with the package for the
wrong (shared-bug) reason is not.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np
from scipy.integrate import solve_ivp


# ------------------------------------------------------------------- LZ76

def lz76_brute(s: str) -> int:
    """Exhaustive-history LZ76 phrase count, the textbook way.

    Walk the sequence extending the current phrase while history+phrase
    minus its last character already contains it as a substring; when the
    extension is new, close the phrase. The final (possibly incomplete)
    phrase counts.
    """
    if len(s) == 0:
        return 0
    c = 0
    i = 0
    n = len(s)
    while i < n:
        k = 1
        # grow phrase s[i:i+k] while it occurs inside s[:i+k-1]
        while i + k <= n and s[i:i + k] in s[:i + k - 1]:
            k += 1
        c += 1
        i += k
    return c


# ----------------------------------------------------------------- chains

def random_chain(rng: np.random.Generator, n_states: int,
                 sparsity: float = 0.0) -> np.ndarray:
    """Random row-stochastic matrix; optional zeroed entries (renormalized)."""
    P = rng.dirichlet(np.ones(n_states), size=n_states)
    if sparsity > 0.0:
        mask = rng.random((n_states, n_states)) < sparsity
        # never kill a full row
        for i in range(n_states):
            if mask[i].all():
                mask[i, rng.integers(n_states)] = False
        P = np.where(mask, 0.0, P)
        P /= P.sum(axis=1, keepdims=True)
    return P


def stationary_eig(P: np.ndarray) -> np.ndarray:
    """Stationary law from the dense left-eigenvector at eigenvalue 1."""
    w, V = np.linalg.eig(P.T)
    k = int(np.argmin(np.abs(w - 1.0)))
    pi = np.real(V[:, k])
    pi = np.abs(pi)
    return pi / pi.sum()


def entropy_rate_direct(P: np.ndarray, pi: np.ndarray) -> float:
    h = 0.0
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            if P[i, j] > 0.0:
                h -= pi[i] * P[i, j] * math.log(P[i, j])
    return h


def entropy_rate_mc(P: np.ndarray, n_steps: int, seed: int) -> float:
    """Monte Carlo plug-in: simulate a walk, count transitions, plug in.

    Start state is drawn from the empirical occupation of a short warmup
    so the chain needs no stationary solve at all.
    """
    rng = np.random.default_rng(seed)
    k = P.shape[0]
    cum = np.cumsum(P, axis=1)
    state = int(rng.integers(k))
    for _ in range(1000):  # warmup toward stationarity
        state = int(np.searchsorted(cum[state], rng.random(), side="right"))
    counts = np.zeros((k, k), dtype=np.int64)
    u = rng.random(n_steps)
    for t in range(n_steps):
        nxt = int(np.searchsorted(cum[state], u[t], side="right"))
        counts[state, nxt] += 1
        state = nxt
    row = counts.sum(axis=1)
    h = 0.0
    total = counts.sum()
    for i in range(k):
        if row[i] == 0:
            continue
        for j in range(k):
            if counts[i, j]:
                p = counts[i, j] / row[i]
                h -= (row[i] / total) * p * math.log(p)
    return h


def spectral_radius_dense(A: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(A))))


# ------------------------------------------------------------ block stats

def word_counts_dict(symbols, L: int) -> dict:
    """n -> number of distinct length-n words, via tuple dict."""
    seq = list(symbols)
    out = {}
    for n in range(1, L + 1):
        seen = set()
        for i in range(len(seq) - n + 1):
            seen.add(tuple(seq[i:i + n]))
        out[n] = len(seen)
    return out


def block_entropy_counter(labels, k: int) -> float:
    """Plug-in entropy of the k-gram distribution via Counter (nats)."""
    grams = Counter(tuple(labels[i:i + k]) for i in range(len(labels) - k + 1))
    total = sum(grams.values())
    return -sum((c / total) * math.log(c / total) for c in grams.values())


# ------------------------------------------------------------ toy systems

def logistic_symbols(n: int, x0: float = 0.2024, r: float = 4.0) -> np.ndarray:
    """Binary itinerary of the logistic map w.r.t. the x = 1/2 partition."""
    x = x0
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        out[i] = 1 if x >= 0.5 else 0
        x = r * x * (1.0 - x)
    return out


def harmonic_exact(t: float, y0, omega: float = 1.0) -> np.ndarray:
    """Solution of x'' = -omega^2 x from y0 = (x0, v0)."""
    x0, v0 = y0
    return np.array([
        x0 * math.cos(omega * t) + (v0 / omega) * math.sin(omega * t),
        -x0 * omega * math.sin(omega * t) + v0 * math.cos(omega * t),
    ])


# ------------------------------------------- tangent-space Lyapunov (QR)

def lorenz_rhs_aug(t, y, sigma, rho, beta):
    """Lorenz flow plus three tangent columns (12-dim augmented system)."""
    x = y[:3]
    T = y[3:].reshape(3, 3)
    f = np.array([
        sigma * (x[1] - x[0]),
        x[0] * (rho - x[2]) - x[1],
        x[0] * x[1] - beta * x[2],
    ])
    J = np.array([
        [-sigma, sigma, 0.0],
        [rho - x[2], -1.0, -x[0]],
        [x[1], x[0], -beta],
    ])
    return np.concatenate([f, (J @ T).ravel()])


def lorenz_lyapunov_qr(t_total: float = 3000.0, dt: float = 1.0,
                       t_transient: float = 50.0,
                       sigma: float = 10.0, rho: float = 28.0,
                       beta: float = 8.0 / 3.0) -> np.ndarray:
    """Lyapunov spectrum of Lorenz by tangent-map QR, scipy integration.

    Integrates the augmented system in dt-long legs with solve_ivp (RK45,
    tight tolerances), re-orthonormalizing the tangent frame by Householder
    QR after each leg and averaging log |diag R|.
    """
    x = np.array([1.0, 1.0, 1.0])
    sol = solve_ivp(lambda t, y: np.array([
        sigma * (y[1] - y[0]),
        y[0] * (rho - y[2]) - y[1],
        y[0] * y[1] - beta * y[2],
    ]), (0.0, t_transient), x, rtol=1e-10, atol=1e-10, dense_output=False)
    x = sol.y[:, -1]

    T = np.eye(3)
    sums = np.zeros(3)
    n_legs = int(round(t_total / dt))
    for _ in range(n_legs):
        y0 = np.concatenate([x, T.ravel()])
        sol = solve_ivp(lorenz_rhs_aug, (0.0, dt), y0,
                        args=(sigma, rho, beta), rtol=1e-10, atol=1e-10)
        y = sol.y[:, -1]
        x = y[:3]
        Q, R = np.linalg.qr(y[3:].reshape(3, 3))
        sign = np.sign(np.diag(R))
        sign[sign == 0] = 1.0
        T = Q * sign
        sums += np.log(np.abs(np.diag(R)))
    return np.sort(sums / (n_legs * dt))[::-1]


# --------------------------------------------------------------- FHR rhs

def delnegro_rhs_direct(s, a, alpha=0.006, b=6.0, c=1.605, z0=1.1, d=3.7):
    """Del Negro form written out longhand, no shared code."""
    v, w, z = s
    return np.array([
        a * w - 4.0 * v ** 3 + 4.0 * v - z,
        -(1.0 + 4.0 * v + w),
        alpha * (b * v - (c * z - z0) / d),
    ])


def rinzel_rhs_direct(s, I=0.3125, eps=0.0001, phi=0.08, a=0.7, b=0.8,
                      c=-0.775, d=1.0):
    v, w, y = s
    return np.array([
        v - v ** 3 - w + y + I,
        phi * (v + a - b * w),
        eps * (-v + c - d * y),
    ])
