"""Run configuration from JSON files.

One flat document feeds every CLI subcommand; each top-level key mirrors
the dataclass it fills, so the schema is just the constructor signatures:

.. code-block:: json

    {
      "model": "delnegro",
      "params": {"a": 0.7175},
      "integrator": {"t_transient": 5e4, "t_record": 2e5, "sample_dt": 0.05},
      "section": {"normal": [1, 0, 0], "offset": 0.8, "direction": "positive"},
      "return_axis": 2,
      "partition": "primitive3",
      "lyapunov": {"renorm_dt": 1.0, "t_average": 2e5},
      "sweep": {"a_min": 0.7136, "a_max": 0.718, "a_step": 5e-5,
                "measures": ["entropy_rate", "h_top", "lz"]},
      "seed": 0,
      "workers": 1
    }

Everything is optional; omitted sections fall back to package defaults.
``partition`` is either a shipped partition name or a path, resolved
relative to the config file. Unknown keys are rejected everywhere --
silently ignored typos in a config that drives hour-long sweeps are worse
than a hard error.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError
from .integrate import IntegratorConfig
from .models import DelNegroParams, RinzelParams
from .partition import PartitionSpec, builtin_partition, load_partition
from .sections import DEFAULT_RETURN_AXIS, DEFAULT_SECTION, PlaneSection

__all__ = [
    "RunConfig",
    "load_run_config",
    "run_config_from_dict",
    "resolve_partition",
    "sweep_config_from_run",
]

_MODELS = {"delnegro": DelNegroParams, "rinzel": RinzelParams}
_BUILTIN_PARTITIONS = ("primitive3", "advanced4")


def _build(cls, d, where: str, **extra):
    """Instantiate a dataclass from a JSON mapping, rejecting unknown keys."""
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}; "
                          f"allowed: {sorted(allowed)}")
    kw = dict(d)
    for k, v in kw.items():
        if isinstance(v, list):  # JSON arrays -> tuples (initial_state, normal)
            kw[k] = tuple(v)
    kw.update(extra)
    try:
        return cls(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Parsed run configuration; fields are ready-to-use objects."""

    model: str = "delnegro"
    params: object = None                   # DelNegroParams | RinzelParams
    integrator: IntegratorConfig = None
    section: PlaneSection = DEFAULT_SECTION
    return_axis: int = DEFAULT_RETURN_AXIS
    partition: Optional[PartitionSpec] = None
    partition_ref: Optional[str] = None     # name/path as written in the file
    lyapunov: Optional[dict] = None         # raw kwargs for LyapunovConfig
    sweep: Optional[dict] = None            # raw kwargs for SweepConfig
    seed: int = 0
    workers: int = 1

    def require_partition(self) -> PartitionSpec:
        if self.partition is None:
            return builtin_partition("primitive3")
        return self.partition


def resolve_partition(value, base_dir: str = "."):
    """(PartitionSpec, ref) from a shipped name, path, or {'path': ...}."""
    if isinstance(value, dict):
        value = _build(_PartitionRef, value, "partition").path
    if not isinstance(value, str):
        raise ConfigError("partition: expected a name or path string")
    if value in _BUILTIN_PARTITIONS:
        return builtin_partition(value), value
    path = value if os.path.isabs(value) else os.path.join(base_dir, value)
    if not os.path.exists(path):
        raise ConfigError(f"partition: {value!r} is neither a shipped "
                          f"partition {_BUILTIN_PARTITIONS} nor a file")
    return load_partition(path), value


@dataclass(frozen=True)
class _PartitionRef:
    path: str


def run_config_from_dict(doc: dict, base_dir: str = ".") -> RunConfig:
    """Validate a parsed JSON document and build the run objects."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = {"model", "params", "integrator", "section", "return_axis",
               "partition", "lyapunov", "sweep", "seed", "workers"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}; "
                          f"allowed: {sorted(allowed)}")

    model = doc.get("model", "delnegro")
    if model not in _MODELS:
        raise ConfigError(f"model must be one of {sorted(_MODELS)}, "
                          f"got {model!r}")
    params = None
    if "params" in doc:
        params = _build(_MODELS[model], doc["params"], "params")
    integrator = None
    if "integrator" in doc:
        integrator = _build(IntegratorConfig, doc["integrator"], "integrator")
    section = DEFAULT_SECTION
    if "section" in doc:
        section = _build(PlaneSection, doc["section"], "section")
    partition = ref = None
    if "partition" in doc:
        partition, ref = resolve_partition(doc["partition"], base_dir)

    for key in ("lyapunov", "sweep"):
        if key in doc and not isinstance(doc[key], dict):
            raise ConfigError(f"{key}: expected an object")
    return_axis = doc.get("return_axis", DEFAULT_RETURN_AXIS)
    if return_axis not in (0, 1, 2):
        raise ConfigError(f"return_axis must be 0, 1 or 2, got {return_axis!r}")

    return RunConfig(
        model=model,
        params=params,
        integrator=integrator,
        section=section,
        return_axis=return_axis,
        partition=partition,
        partition_ref=ref,
        lyapunov=doc.get("lyapunov"),
        sweep=doc.get("sweep"),
        seed=int(doc.get("seed", 0)),
        workers=int(doc.get("workers", 1)),
    )


def load_run_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return run_config_from_dict(doc, base_dir=os.path.dirname(str(path)) or ".")


def sweep_config_from_run(rc: RunConfig):
    """Assemble a SweepConfig, letting the config's sections override
    the sweep profile defaults piecewise."""
    from .complexity import LyapunovConfig
    from .sweep import SweepConfig

    kw = dict(rc.sweep or {})
    if "measures" in kw:
        kw["measures"] = frozenset(kw["measures"])
    if rc.params is not None:
        kw.setdefault("params", rc.params)
    if rc.integrator is not None:
        kw.setdefault("integrator", rc.integrator)
    if rc.partition is not None:
        kw.setdefault("partition", rc.partition)
    if rc.lyapunov is not None:
        kw.setdefault("lyapunov",
                      _build(LyapunovConfig, rc.lyapunov, "lyapunov"))
    kw.setdefault("section", rc.section)
    kw.setdefault("return_axis", rc.return_axis)
    kw.setdefault("seed", rc.seed)
    kw.setdefault("workers", rc.workers)
    try:
        return SweepConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sweep: {exc}") from exc
