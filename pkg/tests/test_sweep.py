import numpy as np
import pytest

from fhrchaos.errors import ConfigError, MissingMeasureError
from fhrchaos.integrate import IntegratorConfig
from fhrchaos.sweep import (COMPLEXITY_CSV_HEADER, CSV_HEADER, SweepConfig,
                            SweepRow, compare_report, rows_to_complexity_csv,
                            run_point, run_sweep, sweep_rows_from_csv,
                            sweep_rows_from_json, sweep_rows_to_csv,
                            sweep_rows_to_json)

# ------------------------------------------------------------------ grid

def test_default_grid_covers_the_window():
    g = SweepConfig().grid()
    assert len(g) == 89
    assert g[0] == 0.7136
    assert g[-1] == pytest.approx(0.718, abs=1e-12)
    assert all(isinstance(a, float) for a in g)
    np.testing.assert_allclose(np.diff(g), 5e-5, rtol=1e-9)


def test_grid_single_interval():
    g = SweepConfig(a_min=0.714, a_max=0.715, a_step=1e-3).grid()
    assert len(g) == 2


@pytest.mark.parametrize("kw", [
    dict(a_min=0.718, a_max=0.7136),
    dict(a_step=0.0),
    dict(a_step=-1e-5),
    dict(measures=frozenset()),
    dict(measures=frozenset({"entropy_rate", "spectral_gap"})),
    dict(workers=0),
    dict(walk_len=1),
])
def test_config_rejections(kw):
    with pytest.raises(ConfigError):
        SweepConfig(**kw)


def test_with_override():
    cfg = SweepConfig().with_(workers=4, seed=9)
    assert cfg.workers == 4 and cfg.seed == 9
    assert SweepConfig().workers == 1       # original untouched


# ------------------------------------------------------------ run_point

#: cheap profile -- a few hundred burst cycles, enough for smoke checks
_MINI = IntegratorConfig(t_transient=5e3, t_record=1.5e4, sample_dt=0.05)


def _mini_cfg(**kw):
    base = dict(a_min=0.7174, a_max=0.7176, a_step=2e-4, integrator=_MINI)
    base.update(kw)
    return SweepConfig(**base)


def test_run_point_failure_becomes_error_row():
    # a 5-time-unit record cannot contain two section crossings
    cfg = _mini_cfg(
        integrator=IntegratorConfig(t_transient=0.0, t_record=5.0,
                                    sample_dt=0.05),
        measures=frozenset({"h_top"}))
    row = run_point(cfg, 0)
    assert row.a == cfg.grid()[0]
    assert row.error is not None and "MissingMeasure" in row.error
    assert row.htop_words is None


def test_mini_sweep_rows(sweep_rows):
    cfg, rows = sweep_rows
    assert [r.a for r in rows] == cfg.grid()
    for r in rows:
        assert r.error is None
        assert r.h_rate is not None and r.h_rate >= 0
        assert r.htop_words is not None and r.htop_words >= 0
        assert r.lz_c is not None and r.lz_c > 0
        assert r.lambdas is None            # lyapunov not requested
        assert r.htop_pesin is None


def test_worker_count_cannot_change_the_table(sweep_rows):
    cfg, rows = sweep_rows
    par = run_sweep(cfg.with_(workers=2))
    assert sweep_rows_to_csv(par) == sweep_rows_to_csv(rows)


def test_progress_callback_counts_points():
    cfg = _mini_cfg(
        a_max=0.7174 + 1e-4, a_step=1e-4,
        integrator=IntegratorConfig(t_transient=0.0, t_record=5.0,
                                    sample_dt=0.05),
        measures=frozenset({"h_top"}))      # error rows, but cheap and counted
    seen = []
    run_sweep(cfg, progress=lambda done, total: seen.append((done, total)))
    assert seen == [(1, 2), (2, 2)]


@pytest.fixture(scope="module")
def sweep_rows():
    cfg = _mini_cfg()
    return cfg, run_sweep(cfg)


# --------------------------------------------------------- serialization

def _sample_rows():
    full = SweepRow(a=0.7175, h_rate=0.2215, htop_words=0.3878,
                    htop_pesin=0.41, lambdas=(1.2e-3, -1e-6, -0.9),
                    lambda_se=(2e-5, 1e-6, 3e-4), lz_c=801, lz_norm=0.96)
    minimal = SweepRow(a=0.714, h_rate=0.0, htop_words=0.0, lz_c=3,
                       lz_norm=0.01)
    failed = SweepRow(a=0.7178, error="ZeroRowError: v2 has no exits")
    return [minimal, full, failed]


def test_csv_round_trip_is_exact():
    rows = _sample_rows()
    text = sweep_rows_to_csv(rows)
    assert text.splitlines()[0] == CSV_HEADER
    assert sweep_rows_from_csv(text) == rows


def test_json_round_trip_is_exact():
    rows = _sample_rows()
    assert sweep_rows_from_json(sweep_rows_to_json(rows)) == rows


def test_error_row_serializes_with_empty_cells():
    text = sweep_rows_to_csv([_sample_rows()[2]])
    line = text.splitlines()[1]
    assert line.startswith("0.7178,,,,")
    assert line.endswith("ZeroRowError: v2 has no exits")


def test_from_csv_rejects_foreign_header():
    with pytest.raises(ConfigError):
        sweep_rows_from_csv("a,b,c\n1,2,3\n")


def test_complexity_table_shape_and_skips():
    rows = _sample_rows()
    rows[0] = SweepRow(a=0.714, h_rate=0.0, htop_words=0.0, htop_pesin=0.0,
                       lambdas=(0.1, 0.0, -1.0), lambda_se=(0.0, 0.0, 0.0),
                       lz_c=3, lz_norm=0.01)
    text = rows_to_complexity_csv(rows)
    lines = text.splitlines()
    assert lines[0] == COMPLEXITY_CSV_HEADER
    assert len(lines) == 3                  # header + 2 rows; error row gone
    assert lines[2].split(",")[0] == "0.7175"


def test_complexity_table_requires_all_measures():
    with pytest.raises(MissingMeasureError):
        rows_to_complexity_csv([SweepRow(a=0.714, h_rate=0.1,
                                         htop_words=0.2, lz_c=3,
                                         lz_norm=0.1)])


def test_compare_report_builds_gap_reports():
    rows = _sample_rows()
    reports = compare_report(rows)
    assert [r.a for r in reports] == [0.714, 0.7175]    # error row skipped
    assert reports[1].gap == pytest.approx(0.3878 - 0.2215)
    # missing lz is tolerated
    bare = SweepRow(a=0.715, h_rate=0.1, htop_words=0.3)
    assert compare_report([bare])[0].lz_norm == 0.0
    with pytest.raises(MissingMeasureError):
        compare_report([SweepRow(a=0.715, htop_words=0.3)])
