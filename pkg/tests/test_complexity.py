import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fhrchaos.complexity import (LyapunovConfig, binarize_walk,
                                 lyapunov_spectrum, lz76,
                                 topological_entropy_estimate)
from fhrchaos.errors import (ConfigError, IncompleteReductionError,
                             InsufficientDataError, NotConvergedError)
from fhrchaos.models import DelNegroParams
from fhrchaos.partition import SymbolSequence
from fhrchaos.systems import LinearDiagParams, LorenzParams
from oracles import logistic_symbols, lz76_brute, word_counts_dict

# ----------------------------------------------------------------- LZ76

def test_lz76_known_strings():
    assert lz76("0" * 8).c == 2
    assert lz76("0001101001000101").c == 6  # the 1976 worked example
    assert lz76("1").c == 1
    assert lz76("01" * 50).c == 3


@given(st.text(alphabet="01", min_size=1, max_size=200))
def test_lz76_matches_brute_force(s):
    assert lz76(s).c == lz76_brute(s)


def test_lz76_exhaustive_short_strings():
    for n in range(1, 11):
        for bits in range(2 ** n):
            s = format(bits, f"0{n}b")
            assert lz76(s).c == lz76_brute(s), s


def test_lz76_input_forms_agree():
    s = "0110100110010110"
    as_str = lz76(s)
    as_ints = lz76(np.array([int(c) for c in s]))
    as_bool = lz76(np.array([c == "1" for c in s]))
    assert as_str == as_ints == as_bool


def test_lz76_normalization():
    res = lz76("0110")
    assert res.normalized == pytest.approx(res.c * math.log2(4) / 4)
    assert lz76("0").normalized == 0.0


def test_lz76_rejects_junk():
    with pytest.raises(ConfigError):
        lz76("012")
    with pytest.raises(ConfigError):
        lz76("")
    with pytest.raises(ConfigError):
        lz76(np.array([0, 1, 2]))


@given(st.text(alphabet="01", min_size=1, max_size=80),
       st.text(alphabet="01", min_size=1, max_size=80))
def test_lz76_subadditive(s, t):
    assert lz76(s + t).c <= lz76(s).c + lz76(t).c


def test_lz76_random_is_complex(rng):
    bits = rng.integers(0, 2, 20_000)
    assert lz76(bits).normalized > 0.8
    assert lz76(np.tile([0, 1, 1], 5000)).normalized < 0.05


def test_binarize_walk():
    seq = SymbolSequence.from_labels(list("ABCA"), alphabet=("A", "B", "C"))
    out = binarize_walk(seq, {"A": 0, "B": 1, "C": 0})
    np.testing.assert_array_equal(out, [0, 1, 0, 0])
    assert out.dtype == np.uint8
    with pytest.raises(IncompleteReductionError):
        binarize_walk(seq, {"A": 0, "B": 1})
    with pytest.raises(IncompleteReductionError):
        binarize_walk(seq, {"A": 0, "B": 2, "C": 0})


# ------------------------------------------------------------- Lyapunov

def test_linear_diag_exponents_exact():
    # start at the fixed point so the expanding base coordinate cannot
    # run off to the divergence guard; the tangent flow is still exact
    rates = (-0.5, -1.5, 0.25)
    cfg = LyapunovConfig(t_transient=0.0, t_average=500.0,
                         initial_state=(0.0, 0.0, 0.0))
    res = lyapunov_spectrum(LinearDiagParams(rates=rates), cfg)
    np.testing.assert_allclose(res.exponents, sorted(rates, reverse=True),
                               atol=1e-7)
    assert res.largest == pytest.approx(0.25, abs=1e-7)
    assert res.pesin_sum() == pytest.approx(0.25, abs=1e-7)


def test_lorenz_spectrum_shape():
    res = lyapunov_spectrum(LorenzParams(),
                            LyapunovConfig(t_transient=50.0, t_average=2e4))
    lam = res.exponents
    assert lam[0] == pytest.approx(0.906, abs=0.05)     # literature value
    assert lam[1] == pytest.approx(0.0, abs=0.02)       # flow direction
    assert lam[2] == pytest.approx(-14.57, abs=0.3)
    assert lam[0] >= lam[1] >= lam[2]
    assert all(se >= 0 for se in res.se)
    # volume contraction rate is exactly -(sigma + 1 + beta)
    assert sum(lam) == pytest.approx(-(10.0 + 1.0 + 8.0 / 3.0), rel=0.02)


def test_one_exponent_vanishes_on_fhr_attractor():
    # any bounded non-fixed-point flow carries a zero exponent along itself
    res = lyapunov_spectrum(DelNegroParams(a=0.7175),
                            LyapunovConfig(t_transient=2e4, t_average=2e4))
    assert min(abs(l) for l in res.exponents) < 2e-3


def test_renorm_interval_insensitivity():
    cfg1 = LyapunovConfig(t_transient=50.0, t_average=1e4, renorm_dt=1.0)
    cfg2 = LyapunovConfig(t_transient=50.0, t_average=1e4, renorm_dt=0.5)
    r1 = lyapunov_spectrum(LorenzParams(), cfg1)
    r2 = lyapunov_spectrum(LorenzParams(), cfg2)
    noise = 2.0 * (r1.se[0] + r2.se[0])
    assert abs(r1.exponents[0] - r2.exponents[0]) <= max(noise, 0.02)


def test_long_renorm_interval_reports_degenerate_frame():
    # on Lorenz the third direction contracts ~e^-29 over dt=2; sooner or
    # later the Gram-Schmidt residual cancels to exactly zero, which must
    # surface as a typed error and not as a ZeroDivisionError
    cfg = LyapunovConfig(t_transient=50.0, t_average=1e4, renorm_dt=2.0)
    with pytest.raises(NotConvergedError, match="degenerate"):
        lyapunov_spectrum(LorenzParams(), cfg)


def test_lyapunov_history_and_config_checks():
    res = lyapunov_spectrum(LinearDiagParams(),
                            LyapunovConfig(t_transient=0.0, t_average=100.0))
    assert res.history.shape[1] == 3
    assert 2 <= res.history.shape[0] <= 512
    np.testing.assert_allclose(res.history[-1], res.exponents, atol=1e-9)
    with pytest.raises(ConfigError):
        LyapunovConfig(t_average=5.0, renorm_dt=1.0)  # too short to average


# ---------------------------------------------------------- word growth

def test_word_growth_full_shift_is_ln2(rng):
    bits = rng.integers(0, 2, 120_000)
    est = topological_entropy_estimate("word-growth", symbols=bits)
    assert est.value == pytest.approx(math.log(2), rel=0.02)
    assert est.units == "per_crossing"
    assert est.diagnostics["r2"] > 0.99


def test_word_growth_counts_match_dict_oracle(rng):
    bits = rng.integers(0, 2, 5_000)
    est = topological_entropy_estimate("word-growth", symbols=bits, L=8)
    want = word_counts_dict(bits, 8)
    got = {n: est.diagnostics["N"][n - 1] for n in range(1, 9)}
    assert got == want


def test_word_growth_logistic_map():
    sym = logistic_symbols(120_000)
    est = topological_entropy_estimate("word-growth", symbols=sym)
    assert est.value == pytest.approx(math.log(2), rel=0.02)


def test_word_growth_periodic_coords_give_zero():
    coords = np.tile([0.1, 0.5, 0.9], 2000)
    est = topological_entropy_estimate("word-growth", coords=coords)
    assert est.value == pytest.approx(0.0, abs=1e-12)


def test_word_growth_near_constant_coords_collapse():
    # a periodic orbit's return coordinate plus integrator jitter must not
    # be amplified into fake entropy by the bin grid
    rng = np.random.default_rng(0)
    coords = -0.9 + 1e-8 * rng.standard_normal(5000)
    est = topological_entropy_estimate("word-growth", coords=coords)
    assert est.value == 0.0
    assert est.diagnostics["m"] == 1
    assert est.diagnostics["N"][0] == 1


def test_word_growth_guards():
    with pytest.raises(ConfigError):
        topological_entropy_estimate("word-growth")
    with pytest.raises(InsufficientDataError):
        topological_entropy_estimate("word-growth",
                                     symbols=np.array([0, 1] * 6), L=10)


def test_pesin_proxy_units():
    res = lyapunov_spectrum(
        LinearDiagParams(rates=(0.3, -1.0, -2.0)),
        LyapunovConfig(t_transient=0.0, t_average=200.0,
                       initial_state=(0.0, 0.0, 0.0)))
    per_time = topological_entropy_estimate("pesin-proxy", lyapunov=res)
    assert per_time.value == pytest.approx(0.3, abs=1e-6)
    assert per_time.units == "per_time"
    per_cross = topological_entropy_estimate("pesin-proxy", lyapunov=res,
                                             mean_return_time=35.0)
    assert per_cross.value == pytest.approx(0.3 * 35.0, abs=1e-4)
    assert per_cross.units == "per_crossing"
