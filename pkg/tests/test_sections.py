import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fhrchaos import DelNegroParams, Trajectory
from fhrchaos.errors import TooFewCrossingsError
from fhrchaos.sections import (DEFAULT_SECTION, Crossing, PlaneSection,
                               bifurcation_scan, classify_periodicity,
                               crossings_to_array, detect_crossings,
                               return_map)


def circle_traj(dt: float = 0.05, n_turns: int = 3,
                with_field: bool = True) -> Trajectory:
    """(cos t, sin t, 0): crossings of v = c are at known angles."""
    n = int(round(2 * math.pi * n_turns / dt)) + 1
    t = dt * np.arange(n)
    samples = np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=1)
    field = (lambda tt, y: np.array([-y[1], y[0], 0.0])) if with_field else None
    return Trajectory(t0=0.0, sample_dt=dt, samples=samples, field=field)


def test_crossing_times_match_arccos():
    traj = circle_traj()
    sec = PlaneSection(normal=(1, 0, 0), offset=0.8, direction="positive")
    got = detect_crossings(traj, sec)
    # cos t = 0.8 rising at t = 2k*pi - arccos(0.8)
    want = [2 * math.pi * k - math.acos(0.8) for k in (1, 2, 3)]
    assert len(got) == len(want)
    for c, tw in zip(got, want):
        assert c.t == pytest.approx(tw, abs=1e-6)
        assert c.state[0] == pytest.approx(0.8, abs=1e-9)
        assert c.direction == 1


def test_negative_direction_picks_the_other_branch():
    traj = circle_traj()
    sec = PlaneSection(normal=(1, 0, 0), offset=0.8, direction="negative")
    got = detect_crossings(traj, sec)
    want = [math.acos(0.8) + 2 * math.pi * k for k in (0, 1, 2)]
    assert len(got) == len(want)
    for c, tw in zip(got, want):
        assert c.t == pytest.approx(tw, abs=1e-6)
        assert c.direction == -1


@given(st.floats(-0.95, 0.95), st.integers(1, 4))
def test_direction_split_is_a_partition(offset, turns):
    # positive + negative crossings = both, as disjoint time sets
    traj = circle_traj(n_turns=turns)
    kw = dict(normal=(1, 0, 0), offset=offset)
    pos = detect_crossings(traj, PlaneSection(direction="positive", **kw))
    neg = detect_crossings(traj, PlaneSection(direction="negative", **kw))
    both = detect_crossings(traj, PlaneSection(direction="both", **kw))
    assert len(pos) + len(neg) == len(both)
    merged = sorted([c.t for c in pos] + [c.t for c in neg])
    assert merged == [c.t for c in both]
    assert all(c.direction == 1 for c in pos)
    assert all(c.direction == -1 for c in neg)


def test_no_crossings_is_empty_not_error():
    traj = circle_traj()
    sec = PlaneSection(normal=(1, 0, 0), offset=2.0, direction="both")
    assert detect_crossings(traj, sec) == []


def test_linear_fallback_without_field():
    # no field attached: interpolation degrades but stays near the truth
    traj = circle_traj(dt=0.01, with_field=False)
    sec = PlaneSection(normal=(1, 0, 0), offset=0.8, direction="positive")
    got = detect_crossings(traj, sec)
    assert len(got) == 3
    assert got[0].t == pytest.approx(2 * math.pi - math.acos(0.8), abs=1e-3)


def test_return_map_pairs():
    crossings = [Crossing(t=float(k), state=(0.8, 0.0, float(k) ** 2),
                          direction=1) for k in range(4)]
    assert return_map(crossings, coord=2) == [(0.0, 1.0), (1.0, 4.0), (4.0, 9.0)]
    with pytest.raises(TooFewCrossingsError):
        return_map(crossings[:1])


def make_crossings(cycle, reps, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(reps * len(cycle)):
        base = np.asarray(cycle[k % len(cycle)], dtype=float)
        state = base + noise * rng.standard_normal(3)
        out.append(Crossing(t=float(k), state=tuple(state), direction=1))
    return out


def test_periodicity_period1():
    v = classify_periodicity(make_crossings([(0.8, -1.0, -0.9)], 60,
                                            noise=1e-7, seed=1))
    assert v.kind == "periodic" and v.period == 1


def test_periodicity_period2():
    cyc = [(0.8, -1.0, -0.9), (0.8, -0.5, -0.7)]
    v = classify_periodicity(make_crossings(cyc, 30, noise=1e-7, seed=2))
    assert v.kind == "periodic" and v.period == 2


def test_periodicity_aperiodic_on_noise():
    crossings = make_crossings([(0.8, 0.0, 0.0)], 60, noise=0.3, seed=3)
    v = classify_periodicity(crossings, tol=1e-5)
    assert v.kind == "aperiodic"
    assert v.period is None


def test_periodicity_undetermined_between():
    # residual between tol and 100*tol: refuses to call it either way
    crossings = make_crossings([(0.8, 0.0, 0.0)], 60, noise=1e-5, seed=4)
    v = classify_periodicity(crossings, tol=1e-6)
    assert v.kind == "undetermined"


def test_periodicity_needs_enough_crossings():
    with pytest.raises(TooFewCrossingsError):
        classify_periodicity(make_crossings([(0.8, 0.0, 0.0)], 10),
                             max_period=16)


def test_crossings_to_array_shape():
    arr = crossings_to_array(make_crossings([(0.8, 0.1, -0.9)], 5))
    assert arr.shape == (5, 3)
    assert arr.dtype == np.float64


def test_bifurcation_scan_embeds_errors(chaotic_traj):
    base = DelNegroParams(a=0.7175)
    from fhrchaos import IntegratorConfig
    cfg = IntegratorConfig(t_transient=200.0, t_record=300.0, sample_dt=0.05)
    pts = bifurcation_scan([0.7175, float("nan")], base, DEFAULT_SECTION,
                           cfg=cfg)
    assert pts[0].error is None and len(pts[0].coords) > 0
    assert pts[1].error is not None and len(pts[1].coords) == 0
    assert [p.a for p in pts] == pytest.approx([0.7175, float("nan")], nan_ok=True)


def test_fhr_crossings_sit_on_plane(chaotic_traj):
    crossings = detect_crossings(chaotic_traj, DEFAULT_SECTION)
    assert len(crossings) > 100
    v = crossings_to_array(crossings)[:, 0]
    np.testing.assert_allclose(v, 0.8, atol=1e-8)
    t = np.array([c.t for c in crossings])
    assert np.all(np.diff(t) > 0)
