import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fhrchaos.models import (DelNegroParams, RinzelParams, delnegro_jacobian,
                             delnegro_rhs, rinzel_jacobian, rinzel_rhs)
from oracles import delnegro_rhs_direct, rinzel_rhs_direct

state = st.tuples(*[st.floats(-3.0, 3.0) for _ in range(3)]).map(np.array)


@given(state, st.floats(0.5, 1.0))
def test_delnegro_rhs_matches_longhand(s, a):
    p = DelNegroParams(a=a)
    np.testing.assert_allclose(delnegro_rhs(s, p), delnegro_rhs_direct(s, a),
                               rtol=1e-13, atol=1e-13)


@given(state)
def test_rinzel_rhs_matches_longhand(s):
    p = RinzelParams()
    np.testing.assert_allclose(rinzel_rhs(s, p), rinzel_rhs_direct(s),
                               rtol=1e-13, atol=1e-13)


@given(state)
def test_delnegro_jacobian_is_rhs_derivative(s):
    p = DelNegroParams(a=0.7175)
    J = delnegro_jacobian(s, p)
    h = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        fd = (delnegro_rhs(s + e, p) - delnegro_rhs(s - e, p)) / (2 * h)
        np.testing.assert_allclose(J[:, k], fd, rtol=1e-4, atol=1e-5)


@given(state)
def test_rinzel_jacobian_is_rhs_derivative(s):
    p = RinzelParams()
    J = rinzel_jacobian(s, p)
    h = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        fd = (rinzel_rhs(s + e, p) - rinzel_rhs(s - e, p)) / (2 * h)
        np.testing.assert_allclose(J[:, k], fd, rtol=1e-4, atol=1e-5)


def test_with_a_changes_only_a():
    p = DelNegroParams(a=0.7136)
    q = p.with_a(0.718)
    assert q.a == 0.718
    assert (q.alpha, q.b, q.c, q.z0, q.d) == (p.alpha, p.b, p.c, p.z0, p.d)
    assert p.a == 0.7136  # frozen original untouched


def test_paper_defaults():
    p = DelNegroParams(a=0.7175)
    assert (p.alpha, p.b, p.c, p.z0, p.d) == (0.006, 6.0, 1.605, 1.1, 3.7)
    r = RinzelParams()
    assert (r.I, r.eps, r.phi, r.a, r.c) == (0.3125, 0.0001, 0.08, 0.7, -0.775)


@pytest.mark.parametrize("kw", [
    dict(a=float("nan")), dict(a=0.7, alpha=0.0), dict(a=0.7, alpha=-1e-3),
    dict(a=0.7, d=0.0), dict(a=float("inf")),
])
def test_delnegro_rejects_bad_coefficients(kw):
    with pytest.raises(ValueError):
        DelNegroParams(**kw)


def test_pack_order_matches_kernel_layout():
    p = DelNegroParams(a=0.7)
    np.testing.assert_array_equal(p.pack(), [0.7, 0.006, 6.0, 1.605, 1.1, 3.7])
    r = RinzelParams()
    np.testing.assert_array_equal(
        r.pack(), [0.3125, 0.0001, 0.08, 0.7, 0.8, -0.775, 1.0])
