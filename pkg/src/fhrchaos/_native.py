"""Compiled numerical kernels (numba).

Everything here is private plumbing: the public modules wrap these kernels
with validated configuration objects.  Vector fields are selected by integer
id so each kernel compiles once and caches cleanly.

Model ids and packed parameter layouts::

    0  Del Negro FHR   par = [a, alpha, b, c, z0, d]         state (v, w, z)
    1  Rinzel FHR      par = [I, eps, phi, a, b, c, d]       state (v, w, y)
    2  Lorenz          par = [sigma, rho, beta]              state (x, y, z)
    3  linear diagonal par = [d1, d2, d3]                    state (x1, x2, x3)

Extended 12-dimensional states carry three tangent vectors after the base
state: ``y[3:6], y[6:9], y[9:12]``, each propagated by the analytic Jacobian.

Integrator status codes: 0 ok, 1 divergence (state norm above bound),
2 step underflow.
"""
from __future__ import annotations

import numpy as np
from numba import njit

MODEL_DELNEGRO = 0
MODEL_RINZEL = 1
MODEL_LORENZ = 2
MODEL_LINEAR3 = 3

STATUS_OK = 0
STATUS_DIVERGED = 1
STATUS_UNDERFLOW = 2
STATUS_DEGENERATE = 3


@njit(cache=True)
def _rhs3(model, t, y, par, out):
    if model == 0:
        v = y[0]
        w = y[1]
        z = y[2]
        out[0] = par[0] * w - 4.0 * v * v * v + 4.0 * v - z
        out[1] = -(1.0 + 4.0 * v + w)
        out[2] = par[1] * (par[2] * v - (par[3] * z - par[4]) / par[5])
    elif model == 1:
        v = y[0]
        w = y[1]
        yy = y[2]
        out[0] = v - v * v * v - w + yy + par[0]
        out[1] = par[2] * (v + par[3] - par[4] * w)
        out[2] = par[1] * (-v + par[5] - par[6] * yy)
    elif model == 2:
        x = y[0]
        yy = y[1]
        z = y[2]
        out[0] = par[0] * (yy - x)
        out[1] = x * (par[1] - z) - yy
        out[2] = x * yy - par[2] * z
    else:
        out[0] = par[0] * y[0]
        out[1] = par[1] * y[1]
        out[2] = par[2] * y[2]


@njit(cache=True)
def _rhs12(model, t, y, par, out):
    _rhs3(model, t, y[:3], par, out[:3])
    if model == 0:
        v = y[0]
        j00 = 4.0 - 12.0 * v * v
        j01 = par[0]
        j02 = -1.0
        j10 = -4.0
        j11 = -1.0
        j12 = 0.0
        j20 = par[1] * par[2]
        j21 = 0.0
        j22 = -par[1] * par[3] / par[5]
    elif model == 1:
        v = y[0]
        j00 = 1.0 - 3.0 * v * v
        j01 = -1.0
        j02 = 1.0
        j10 = par[2]
        j11 = -par[2] * par[4]
        j12 = 0.0
        j20 = -par[1]
        j21 = 0.0
        j22 = -par[1] * par[6]
    elif model == 2:
        j00 = -par[0]
        j01 = par[0]
        j02 = 0.0
        j10 = par[1] - y[2]
        j11 = -1.0
        j12 = -y[0]
        j20 = y[1]
        j21 = y[0]
        j22 = -par[2]
    else:
        j00 = par[0]
        j01 = 0.0
        j02 = 0.0
        j10 = 0.0
        j11 = par[1]
        j12 = 0.0
        j20 = 0.0
        j21 = 0.0
        j22 = par[2]
    for o in (3, 6, 9):
        u0 = y[o]
        u1 = y[o + 1]
        u2 = y[o + 2]
        out[o] = j00 * u0 + j01 * u1 + j02 * u2
        out[o + 1] = j10 * u0 + j11 * u1 + j12 * u2
        out[o + 2] = j20 * u0 + j21 * u1 + j22 * u2


@njit(cache=True)
def _eval_rhs(model, ext, t, y, par, out):
    if ext == 1:
        _rhs12(model, t, y, par, out)
    else:
        _rhs3(model, t, y, par, out)


@njit(cache=True)
def _dense_emit(y_old, h, th, k1, k3, k4, k5, k6, k7, out_row):
    # Dormand-Prince quartic interpolant (same P matrix as the standard
    # RK45 dense output).
    th2 = th * th
    th3 = th2 * th
    th4 = th3 * th
    b1 = th - 2.8535800653862835 * th2 + 3.0717434641059005 * th3 - 1.1270175653862835 * th4
    b3 = 4.023133379230305 * th2 - 6.249321565289 * th3 + 2.675424484351598 * th4
    b4 = -3.7324019615885042 * th2 + 10.068970589843675 * th3 - 5.685526961588504 * th4
    b5 = 2.5548038301849423 * th2 - 6.399112377351017 * th3 + 3.5219323679207912 * th4
    b6 = -1.3744241142186024 * th2 + 3.272657752246729 * th3 - 1.7672812570757455 * th4
    b7 = 1.3824689317781436 * th2 - 3.764937863556287 * th3 + 2.382468931778144 * th4
    for i in range(y_old.size):
        out_row[i] = y_old[i] + h * (
            b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i] + b7 * k7[i]
        )


@njit(cache=True)
def _dp45(model, ext, par, y, t0, t_end, h0, atol, rtol, max_norm, min_step,
          ts0, dt_s, n_samples, out_samples):
    """Adaptive Dormand-Prince 5(4) from t0 to t_end; y is advanced in place.

    Samples (if n_samples > 0) are emitted at ts0 + k*dt_s via the dense
    interpolant.  Returns (status, t_reached, next_step, n_steps).
    """
    nd = y.size
    k1 = np.empty(nd)
    k2 = np.empty(nd)
    k3 = np.empty(nd)
    k4 = np.empty(nd)
    k5 = np.empty(nd)
    k6 = np.empty(nd)
    k7 = np.empty(nd)
    yt = np.empty(nd)
    ynew = np.empty(nd)
    y_old = np.empty(nd)

    t = t0
    h = h0
    if h <= 0.0:
        h = 1e-3
    n_steps = 0

    isamp = 0
    while isamp < n_samples and ts0 + isamp * dt_s <= t + 1e-12:
        for i in range(nd):
            out_samples[isamp, i] = y[i]
        isamp += 1

    _eval_rhs(model, ext, t, y, par, k1)
    tiny = 1e-12 * (abs(t_end) + 1.0)

    while t < t_end - tiny:
        if h < min_step:
            return STATUS_UNDERFLOW, t, h, n_steps
        hs = h
        if t + hs > t_end:
            hs = t_end - t

        # stages
        for i in range(nd):
            yt[i] = y[i] + hs * 0.2 * k1[i]
        _eval_rhs(model, ext, t + 0.2 * hs, yt, par, k2)
        for i in range(nd):
            yt[i] = y[i] + hs * (0.075 * k1[i] + 0.225 * k2[i])
        _eval_rhs(model, ext, t + 0.3 * hs, yt, par, k3)
        for i in range(nd):
            yt[i] = y[i] + hs * (
                0.9777777777777777 * k1[i] - 3.7333333333333334 * k2[i]
                + 3.5555555555555554 * k3[i]
            )
        _eval_rhs(model, ext, t + 0.8 * hs, yt, par, k4)
        for i in range(nd):
            yt[i] = y[i] + hs * (
                2.9525986892242035 * k1[i] - 11.595793324188385 * k2[i]
                + 9.822892851699436 * k3[i] - 0.2908093278463649 * k4[i]
            )
        _eval_rhs(model, ext, t + 0.8888888888888888 * hs, yt, par, k5)
        for i in range(nd):
            yt[i] = y[i] + hs * (
                2.8462752525252526 * k1[i] - 10.757575757575758 * k2[i]
                + 8.906422717743473 * k3[i] + 0.2784090909090909 * k4[i]
                - 0.2735313036020583 * k5[i]
            )
        _eval_rhs(model, ext, t + hs, yt, par, k6)
        for i in range(nd):
            ynew[i] = y[i] + hs * (
                0.09114583333333333 * k1[i] + 0.44923629829290207 * k3[i]
                + 0.6510416666666666 * k4[i] - 0.322376179245283 * k5[i]
                + 0.13095238095238096 * k6[i]
            )
        _eval_rhs(model, ext, t + hs, ynew, par, k7)

        # embedded 4th-order error estimate, scaled RMS norm
        err = 0.0
        for i in range(nd):
            e = hs * (
                0.0012326388888888888 * k1[i] - 0.0042527702905061394 * k3[i]
                + 0.03697916666666667 * k4[i] - 0.05086379716981132 * k5[i]
                + 0.0419047619047619 * k6[i] - 0.025 * k7[i]
            )
            ay = abs(y[i])
            an = abs(ynew[i])
            sc = atol + rtol * (ay if ay > an else an)
            q = e / sc
            err += q * q
        err = np.sqrt(err / nd)

        if err <= 1.0:
            for i in range(nd):
                y_old[i] = y[i]
                y[i] = ynew[i]
            t_new = t + hs
            n_steps += 1

            while isamp < n_samples:
                ts = ts0 + isamp * dt_s
                if ts > t_new + 1e-12:
                    break
                th = (ts - t) / hs
                if th < 0.0:
                    th = 0.0
                elif th > 1.0:
                    th = 1.0
                _dense_emit(y_old, hs, th, k1, k3, k4, k5, k6, k7,
                            out_samples[isamp])
                isamp += 1

            t = t_new
            for i in range(nd):
                k1[i] = k7[i]

            norm = 0.0
            for i in range(min(nd, 3)):
                norm += y[i] * y[i]
            norm = np.sqrt(norm)
            if not np.isfinite(norm) or norm > max_norm:
                return STATUS_DIVERGED, t, h, n_steps

            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * err ** -0.2
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            h = hs * fac
        else:
            fac = 0.9 * err ** -0.2
            if not np.isfinite(fac) or fac < 0.2:
                fac = 0.2
            elif fac > 1.0:
                fac = 1.0
            h = hs * fac

    while isamp < n_samples:
        for i in range(nd):
            out_samples[isamp, i] = y[i]
        isamp += 1

    return STATUS_OK, t_end, h, n_steps


@njit(cache=True)
def _rk4(model, ext, par, y, t0, t_end, step, max_norm,
         ts0, dt_s, n_samples, out_samples):
    """Fixed-step classic RK4 with cubic Hermite sampling.

    Returns (status, t_reached, n_steps).
    """
    nd = y.size
    k1 = np.empty(nd)
    k2 = np.empty(nd)
    k3 = np.empty(nd)
    k4 = np.empty(nd)
    fend = np.empty(nd)
    yt = np.empty(nd)
    y_old = np.empty(nd)

    t = t0
    n_steps = 0
    isamp = 0
    while isamp < n_samples and ts0 + isamp * dt_s <= t + 1e-12:
        for i in range(nd):
            out_samples[isamp, i] = y[i]
        isamp += 1

    _eval_rhs(model, ext, t, y, par, k1)
    tiny = 1e-12 * (abs(t_end) + 1.0)
    while t < t_end - tiny:
        hs = step
        if t + hs > t_end:
            hs = t_end - t
        for i in range(nd):
            y_old[i] = y[i]
            yt[i] = y[i] + 0.5 * hs * k1[i]
        _eval_rhs(model, ext, t + 0.5 * hs, yt, par, k2)
        for i in range(nd):
            yt[i] = y[i] + 0.5 * hs * k2[i]
        _eval_rhs(model, ext, t + 0.5 * hs, yt, par, k3)
        for i in range(nd):
            yt[i] = y[i] + hs * k3[i]
        _eval_rhs(model, ext, t + hs, yt, par, k4)
        for i in range(nd):
            y[i] = y[i] + hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        t_new = t + hs
        n_steps += 1
        _eval_rhs(model, ext, t_new, y, par, fend)

        while isamp < n_samples:
            ts = ts0 + isamp * dt_s
            if ts > t_new + 1e-12:
                break
            th = (ts - t) / hs
            if th < 0.0:
                th = 0.0
            elif th > 1.0:
                th = 1.0
            h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th)
            h10 = th * (1.0 - th) * (1.0 - th)
            h01 = th * th * (3.0 - 2.0 * th)
            h11 = th * th * (th - 1.0)
            for i in range(nd):
                out_samples[isamp, i] = (
                    h00 * y_old[i] + h10 * hs * k1[i]
                    + h01 * y[i] + h11 * hs * fend[i]
                )
            isamp += 1

        t = t_new
        for i in range(nd):
            k1[i] = fend[i]

        norm = 0.0
        for i in range(min(nd, 3)):
            norm += y[i] * y[i]
        norm = np.sqrt(norm)
        if not np.isfinite(norm) or norm > max_norm:
            return STATUS_DIVERGED, t, n_steps

    while isamp < n_samples:
        for i in range(nd):
            out_samples[isamp, i] = y[i]
        isamp += 1
    return STATUS_OK, t_end, n_steps


@njit(cache=True)
def _benettin(model, par, y0, t0, n_intervals, renorm_dt, h0, atol, rtol,
              max_norm, min_step, increments):
    """Tangent-vector stretching increments per reorthonormalization interval.

    Fills increments[(n_intervals, 3)] with log norms of the Gram-Schmidt
    orthogonalized tangent vectors.  Returns (status, t_reached).
    """
    y = np.zeros(12)
    for i in range(3):
        y[i] = y0[i]
    y[3] = 1.0
    y[7] = 1.0
    y[11] = 1.0

    dummy = np.empty((0, 12))
    t = t0
    h = h0
    for k in range(n_intervals):
        target = t0 + (k + 1) * renorm_dt
        status, t, h, _ = _dp45(model, 1, par, y, t, target, h, atol, rtol,
                                max_norm, min_step, 0.0, 1.0, 0, dummy)
        if status != STATUS_OK:
            return status, t

        # modified Gram-Schmidt on tangent blocks.  A norm can cancel to
        # exactly zero when renorm_dt is long enough that the most
        # contracted direction falls below the rounding noise of the
        # orthogonalization; report that instead of dividing by it.
        n1 = np.sqrt(y[3] * y[3] + y[4] * y[4] + y[5] * y[5])
        if n1 == 0.0:
            return STATUS_DEGENERATE, t
        for i in range(3):
            y[3 + i] /= n1
        d21 = y[6] * y[3] + y[7] * y[4] + y[8] * y[5]
        for i in range(3):
            y[6 + i] -= d21 * y[3 + i]
        n2 = np.sqrt(y[6] * y[6] + y[7] * y[7] + y[8] * y[8])
        if n2 == 0.0:
            return STATUS_DEGENERATE, t
        for i in range(3):
            y[6 + i] /= n2
        d31 = y[9] * y[3] + y[10] * y[4] + y[11] * y[5]
        d32 = y[9] * y[6] + y[10] * y[7] + y[11] * y[8]
        for i in range(3):
            y[9 + i] -= d31 * y[3 + i] + d32 * y[6 + i]
        n3 = np.sqrt(y[9] * y[9] + y[10] * y[10] + y[11] * y[11])
        if n3 == 0.0:
            return STATUS_DEGENERATE, t
        for i in range(3):
            y[9 + i] /= n3

        increments[k, 0] = np.log(n1)
        increments[k, 1] = np.log(n2)
        increments[k, 2] = np.log(n3)

    return STATUS_OK, t


@njit(cache=True)
def _simulate_walk(cum_rows, start, uniforms, out):
    """Sample a state path from cumulative transition rows; fills out."""
    s = start
    n_states = cum_rows.shape[1]
    for i in range(uniforms.size):
        u = uniforms[i]
        row = cum_rows[s]
        j = np.searchsorted(row, u, side="right")
        if j >= n_states:
            j = n_states - 1
        out[i] = j
        s = j


@njit(cache=True)
def _lz76_count(s):
    """Phrase count of the exhaustive production parsing of a symbol array."""
    n = s.size
    if n == 0:
        return 0
    c = 1
    prefix_len = 1
    len_sub = 1
    max_len = 1
    pointer = 0
    while prefix_len + len_sub <= n:
        if s[pointer + len_sub - 1] == s[prefix_len + len_sub - 1]:
            len_sub += 1
        else:
            if len_sub > max_len:
                max_len = len_sub
            pointer += 1
            if pointer == prefix_len:
                c += 1
                prefix_len += max_len
                pointer = 0
                max_len = 1
            len_sub = 1
    if len_sub != 1:
        c += 1
    return c
