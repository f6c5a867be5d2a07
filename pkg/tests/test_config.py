import json

import pytest

from fhrchaos.config import (load_run_config, resolve_partition,
                             run_config_from_dict, sweep_config_from_run)
from fhrchaos.errors import ConfigError
from fhrchaos.models import DelNegroParams, RinzelParams
from fhrchaos.partition import builtin_partition, save_partition
from fhrchaos.sections import DEFAULT_SECTION


def test_empty_document_gives_defaults():
    rc = run_config_from_dict({})
    assert rc.model == "delnegro"
    assert rc.params is None and rc.integrator is None
    assert rc.section == DEFAULT_SECTION
    assert rc.return_axis == 2
    assert rc.seed == 0 and rc.workers == 1
    assert rc.require_partition().labels == ("v1", "v2", "v3")


def test_full_document_round_trip(tmp_path):
    doc = {
        "model": "delnegro",
        "params": {"a": 0.7175},
        "integrator": {"t_transient": 1e3, "t_record": 5e3,
                       "sample_dt": 0.1, "initial_state": [0.2, 0.0, 0.0]},
        "section": {"normal": [1, 0, 0], "offset": 0.8,
                    "direction": "positive"},
        "return_axis": 2,
        "partition": "advanced4",
        "lyapunov": {"t_average": 1e4},
        "sweep": {"a_min": 0.714, "a_max": 0.715, "a_step": 5e-4,
                  "measures": ["entropy_rate", "h_top"]},
        "seed": 3,
        "workers": 2,
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(doc))
    rc = load_run_config(path)
    assert rc.params == DelNegroParams(a=0.7175)
    assert rc.integrator.t_record == 5e3
    assert rc.integrator.initial_state == (0.2, 0.0, 0.0)   # list -> tuple
    assert rc.partition_ref == "advanced4"
    assert len(rc.partition.labels) == 4
    assert rc.seed == 3 and rc.workers == 2


def test_rinzel_model_params():
    rc = run_config_from_dict({"model": "rinzel", "params": {"a": 0.65}})
    assert isinstance(rc.params, RinzelParams)
    assert rc.params.a == 0.65


@pytest.mark.parametrize("doc", [
    {"modle": "delnegro"},                            # top-level typo
    {"model": "hindmarsh-rose"},                      # unknown model
    {"params": {"a": 0.7175, "alpha0": 1.0}},         # params typo
    {"integrator": {"t_rec": 100.0}},                 # nested typo
    {"integrator": {"t_record": -5.0}},               # invalid value
    {"section": {"normal": [1, 0], "offset": 0.8}},   # bad normal
    {"return_axis": 3},
    {"partition": 7},
    {"partition": "no-such-partition"},
    {"lyapunov": ["t_average", 100]},                 # not an object
    {"sweep": "fast"},
])
def test_rejections(doc):
    with pytest.raises(ConfigError):
        run_config_from_dict(doc)


def test_malformed_file_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="cannot read"):
        load_run_config(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_run_config(bad)


def test_partition_path_resolved_relative_to_config(tmp_path):
    spec = builtin_partition("primitive3")
    save_partition(spec, tmp_path / "custom.json")
    doc = {"partition": "custom.json"}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(doc))
    rc = load_run_config(path)
    assert rc.partition.labels == spec.labels
    assert rc.partition_ref == "custom.json"


def test_resolve_partition_forms(tmp_path):
    spec, ref = resolve_partition("advanced4")
    assert ref == "advanced4" and len(spec.labels) == 4
    save_partition(builtin_partition("primitive3"), tmp_path / "p.json")
    spec2, ref2 = resolve_partition({"path": "p.json"}, base_dir=tmp_path)
    assert spec2.labels == ("v1", "v2", "v3") and ref2 == "p.json"
    with pytest.raises(ConfigError):
        resolve_partition({"file": "p.json"}, base_dir=tmp_path)


def test_sweep_config_merges_run_sections():
    rc = run_config_from_dict({
        "params": {"a": 0.7175},
        "integrator": {"t_transient": 1e3, "t_record": 5e3},
        "partition": "advanced4",
        "lyapunov": {"t_average": 1e4},
        "sweep": {"a_min": 0.714, "a_max": 0.715, "a_step": 5e-4,
                  "measures": ["lyapunov"]},
        "seed": 7,
        "workers": 3,
    })
    sc = sweep_config_from_run(rc)
    assert sc.a_min == 0.714 and sc.a_step == 5e-4
    assert sc.measures == frozenset({"lyapunov"})
    assert sc.params.a == 0.7175
    assert sc.integrator.t_record == 5e3
    assert len(sc.partition.labels) == 4
    assert sc.lyapunov.t_average == 1e4
    assert sc.seed == 7 and sc.workers == 3


def test_sweep_config_defaults_without_sections():
    sc = sweep_config_from_run(run_config_from_dict({}))
    assert len(sc.grid()) == 89
    assert sc.measures == frozenset({"entropy_rate", "h_top", "lz"})


def test_sweep_config_bad_measure_is_config_error():
    rc = run_config_from_dict({"sweep": {"measures": ["entropy_rate",
                                                      "spectra"]}})
    with pytest.raises(ConfigError):
        sweep_config_from_run(rc)
