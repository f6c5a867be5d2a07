"""Command-line front end.

Subcommands:

=============  ===========================================================
simulate       integrate the model, dump the sampled trajectory
poincare       section crossings of one run
bifurcation    crossing coordinates over an ``a`` grid (diagram data)
symbolize      region-entry events of one run
markov         transition counts / probabilities / stationary law
sweep          per-parameter measure table over an ``a`` grid
gap-scan       flag h_top vs h_rate gap intervals in sweep output
suggest-split  data-driven split proposal for one partition region
lz             LZ76 complexity of a chain walk or a symbol file
=============  ===========================================================

Every subcommand accepts ``--config`` (JSON run config, see
:mod:`fhrchaos.config`), ``--output`` (default stdout), ``--format``
csv|json, ``--seed`` and ``--workers``. Command-line flags win over config
values. On failure one JSON object ``{"error": ..., "message": ...}`` goes
to stderr and the exit code is nonzero; on success the exit code is 0 and
stdout carries only the requested table.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys

from .complexity import binarize_walk, lz76
from .config import (RunConfig, load_run_config, resolve_partition,
                     sweep_config_from_run)
from .errors import ConfigError, FhrChaosError
from .integrate import IntegratorConfig, attractor_sample
from .markov import (chain_to_dot, chain_to_json, estimate_chain,
                     simulate_walk, stationary)
from .models import DelNegroParams, RinzelParams
from .partition import SymbolSequence, symbolize
from .refine import (DEFAULT_GAP_THRESHOLD, entropy_gap_scan, event_points,
                     suggest_refinement, suggestion_evidence_json,
                     suggestion_patch)
from .sections import bifurcation_scan, detect_crossings
from .sweep import (rows_to_complexity_csv, run_sweep, sweep_rows_from_csv,
                    sweep_rows_from_json, sweep_rows_to_csv,
                    sweep_rows_to_json)

__all__ = ["main", "build_parser"]


# ---------------------------------------------------------------- plumbing

def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


@contextlib.contextmanager
def _out(args):
    if args.output:
        with open(args.output, "w") as fh:
            yield fh
    else:
        yield sys.stdout


def _emit_rows(args, header, rows):
    """Stream (header-aligned tuple) rows as CSV or a JSON array."""
    with _out(args) as fh:
        if args.format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_cell(x) for x in r])
        else:
            fh.write("[\n")
            first = True
            for r in rows:
                if not first:
                    fh.write(",\n")
                first = False
                fh.write("  " + json.dumps(dict(zip(header, r))))
            fh.write("\n]\n")


def _emit_text(args, text: str) -> None:
    with _out(args) as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _load_rc(args) -> RunConfig:
    return load_run_config(args.config) if args.config else RunConfig()


def _integrator(args, rc: RunConfig,
                fallback: IntegratorConfig = None) -> IntegratorConfig:
    cfg = rc.integrator or fallback or IntegratorConfig()
    kw = {}
    for name in ("method", "t_transient", "t_record", "sample_dt"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    return cfg.with_(**kw) if kw else cfg


def _params(args, rc: RunConfig):
    model = getattr(args, "model", None) or rc.model
    base = rc.params if (rc.params is not None and model == rc.model) else None
    a = getattr(args, "a", None)
    if base is None:
        if model == "rinzel":
            base = RinzelParams()
        elif a is not None:
            base = DelNegroParams(a=a)
        else:
            raise ConfigError("delnegro needs -a on the command line or "
                              "params.a in the config")
    return base.with_a(float(a)) if a is not None else base


def _partition(args, rc: RunConfig):
    ref = getattr(args, "partition", None)
    if ref:
        return resolve_partition(ref)[0]
    return rc.require_partition()


def _seed(args, rc: RunConfig) -> int:
    return args.seed if args.seed is not None else rc.seed


def _symbol_sequence(args, rc: RunConfig) -> SymbolSequence:
    traj = attractor_sample(_params(args, rc), _integrator(args, rc))
    return symbolize(traj, _partition(args, rc))


# ------------------------------------------------------------- subcommands

def cmd_simulate(args) -> None:
    rc = _load_rc(args)
    traj = attractor_sample(_params(args, rc), _integrator(args, rc))
    names = ("v", "w", "z") if traj.dim == 3 else tuple(
        f"x{i + 1}" for i in range(traj.dim))
    times = traj.times
    _emit_rows(args, ("t",) + names,
               ((float(times[k]), *map(float, traj.samples[k]))
                for k in range(len(traj))))


def cmd_poincare(args) -> None:
    rc = _load_rc(args)
    traj = attractor_sample(_params(args, rc), _integrator(args, rc))
    crossings = detect_crossings(traj, rc.section)
    _emit_rows(args, ("t", "v", "w", "z", "direction"),
               ((c.t, *map(float, c.state), c.direction) for c in crossings))


def cmd_bifurcation(args) -> None:
    rc = _load_rc(args)
    sweep_kw = rc.sweep or {}
    a_min = args.a_min if args.a_min is not None else sweep_kw.get("a_min", 0.7136)
    a_max = args.a_max if args.a_max is not None else sweep_kw.get("a_max", 0.718)
    a_step = args.a_step if args.a_step is not None else sweep_kw.get("a_step", 5e-5)
    if not (a_min < a_max and a_step > 0):
        raise ConfigError("need a_min < a_max and a_step > 0")
    n = int((a_max - a_min) / a_step + 1e-9) + 1
    grid = [a_min + a_step * i for i in range(n)]
    base = _params(args, rc) if (args.a is not None or rc.params is not None) \
        else DelNegroParams(a=a_min)
    # diagram profile: shorter record than a full analysis run
    cfg = _integrator(args, rc, fallback=IntegratorConfig(
        t_transient=2e4, t_record=6e4, sample_dt=0.05))
    progress = _progress_printer(args, len(grid))
    points = bifurcation_scan(grid, base, rc.section, coord=rc.return_axis,
                              cfg=cfg, progress=progress)
    failed = [p for p in points if p.error is not None]
    for p in failed:
        print(json.dumps({"warning": "grid point failed",
                          "a": p.a, "message": p.error}), file=sys.stderr)

    def rows():
        for p in points:
            for c in p.coords:
                yield (p.a, float(c))

    _emit_rows(args, ("a", "coord"), rows())


def cmd_symbolize(args) -> None:
    rc = _load_rc(args)
    seq = _symbol_sequence(args, rc)
    _emit_rows(args, ("label", "entry_t", "dwell"),
               ((e.label, e.entry_t, e.dwell) for e in seq.events))


def cmd_markov(args) -> None:
    rc = _load_rc(args)
    seq = _symbol_sequence(args, rc)
    tc, chain = estimate_chain(seq)
    pi = stationary(chain)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(chain_to_dot(chain))
    if args.format == "json":
        _emit_text(args, chain_to_json(tc, chain, pi))
    else:
        def rows():
            for i, src in enumerate(chain.labels):
                for j, dst in enumerate(chain.labels):
                    if tc.counts[i, j] or chain.P[i, j]:
                        yield (src, dst, int(tc.counts[i, j]),
                               float(chain.P[i, j]))
        _emit_rows(args, ("from", "to", "count", "p"), rows())


def _sweep_config(args, rc: RunConfig):
    cfg = sweep_config_from_run(rc)
    kw = {}
    for name in ("a_min", "a_max", "a_step"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    if args.measures:
        kw["measures"] = frozenset(args.measures.split(","))
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.workers is not None:
        kw["workers"] = args.workers
    return cfg.with_(**kw) if kw else cfg


def _progress_printer(args, total: int):
    if not getattr(args, "progress", False):
        return None

    def cb(i, a):
        print(f"[{i + 1}/{total}] a={a:.5f}", file=sys.stderr, flush=True)

    return cb


def cmd_sweep(args) -> None:
    rc = _load_rc(args)
    cfg = _sweep_config(args, rc)
    rows = run_sweep(cfg, progress=_progress_printer(args, len(cfg.grid())))
    if args.complexity_table:
        if args.format == "json":
            raise ConfigError("--complexity-table is a CSV layout; "
                              "use --format csv")
        _emit_text(args, rows_to_complexity_csv(rows))
    elif args.format == "json":
        _emit_text(args, sweep_rows_to_json(rows))
    else:
        _emit_text(args, sweep_rows_to_csv(rows))


def cmd_gap_scan(args) -> None:
    from .sweep import compare_report
    rc = _load_rc(args)
    if args.input:
        with open(args.input) as fh:
            text = fh.read()
        rows = (sweep_rows_from_json(text) if text.lstrip().startswith("[")
                else sweep_rows_from_csv(text))
    else:
        rows = run_sweep(_sweep_config(args, rc))
    reports = compare_report(rows)
    intervals = entropy_gap_scan(reports, threshold=args.threshold)
    _emit_rows(args, ("a_lo", "a_hi", "representative", "max_gap"),
               ((iv.a_lo, iv.a_hi, iv.representative, iv.max_gap)
                for iv in intervals))


def cmd_suggest_split(args) -> None:
    rc = _load_rc(args)
    spec = _partition(args, rc)
    traj = attractor_sample(_params(args, rc), _integrator(args, rc))
    points, labels, next_labels = event_points(traj, spec)
    sug = suggest_refinement(points, labels, next_labels, spec,
                             floor=args.floor, seed=_seed(args, rc))
    if args.patch:
        with open(args.patch, "w") as fh:
            fh.write(suggestion_patch(spec, sug))
    if args.format == "json":
        _emit_text(args, suggestion_evidence_json(sug))
    else:
        _emit_rows(args, ("target", "evidence", "score", "primitive"),
                   [(sug.target, sug.evidence, sug.score,
                     json.dumps(sug.primitive.to_dict()))])


def cmd_lz(args) -> None:
    rc = _load_rc(args)
    if args.input:
        with open(args.input) as fh:
            text = fh.read()
        symbols = "".join(text.split())
        if not symbols:
            raise ConfigError(f"{args.input} holds no symbols")
        res = lz76(symbols)
    else:
        seq = _symbol_sequence(args, rc)
        _, chain = estimate_chain(seq)
        if chain.n_states < 2:
            raise ConfigError("walk binarization needs at least 2 states")
        walk = simulate_walk(chain, args.walk_len, seed=_seed(args, rc))
        reduction = {lab: int(lab == chain.labels[1])
                     for lab in chain.labels}
        res = lz76(binarize_walk(walk, reduction))
    if args.format == "json":
        _emit_text(args, json.dumps(
            {"c": res.c, "n": res.n, "normalized": res.normalized}))
    else:
        _emit_rows(args, ("c", "n", "normalized"),
                   [(res.c, res.n, res.normalized)])


# ------------------------------------------------------------------ parser

def _add_common(sp) -> None:
    sp.add_argument("--config", help="JSON run config file")
    sp.add_argument("--output", help="output path (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--seed", type=int, default=None,
                    help="override the config seed")
    sp.add_argument("--workers", type=int, default=None,
                    help="worker processes (sweep-style commands)")


def _add_point(sp, require_a: bool = False) -> None:
    sp.add_argument("-a", type=float, default=None, required=require_a,
                    help="parameter a (overrides config params)")
    sp.add_argument("--model", choices=("delnegro", "rinzel"), default=None)
    sp.add_argument("--method", choices=("rk45", "rk4"), default=None)
    sp.add_argument("--t-transient", dest="t_transient", type=float)
    sp.add_argument("--t-record", dest="t_record", type=float)
    sp.add_argument("--sample-dt", dest="sample_dt", type=float)


def _add_grid(sp) -> None:
    sp.add_argument("--a-min", dest="a_min", type=float, default=None)
    sp.add_argument("--a-max", dest="a_max", type=float, default=None)
    sp.add_argument("--a-step", dest="a_step", type=float, default=None)
    sp.add_argument("--progress", action="store_true",
                    help="print per-point progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fhrchaos",
        description="FitzHugh-Rinzel chaos pipeline: simulate, section, "
                    "symbolize, and score.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="dump a sampled trajectory")
    _add_common(sp); _add_point(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("poincare", help="section crossings of one run")
    _add_common(sp); _add_point(sp)
    sp.set_defaults(func=cmd_poincare)

    sp = sub.add_parser("bifurcation", help="crossing coords over an a grid")
    _add_common(sp); _add_point(sp); _add_grid(sp)
    sp.set_defaults(func=cmd_bifurcation)

    sp = sub.add_parser("symbolize", help="region-entry events of one run")
    _add_common(sp); _add_point(sp)
    sp.add_argument("--partition", help="shipped partition name or file")
    sp.set_defaults(func=cmd_symbolize)

    sp = sub.add_parser("markov", help="estimated chain of one run")
    _add_common(sp); _add_point(sp)
    sp.add_argument("--partition", help="shipped partition name or file")
    sp.add_argument("--dot", help="also write a GraphViz file here")
    sp.set_defaults(func=cmd_markov)

    sp = sub.add_parser("sweep", help="measure table over an a grid")
    _add_common(sp); _add_grid(sp)
    sp.add_argument("--measures",
                    help="comma list from entropy_rate,h_top,lyapunov,lz")
    sp.add_argument("--complexity-table", action="store_true",
                    help="emit the 8-column complexity CSV layout")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("gap-scan", help="flag h_top vs h_rate gap intervals")
    _add_common(sp); _add_grid(sp)
    sp.add_argument("--input", help="sweep output (csv or json) to scan; "
                                    "omitted = run the config sweep")
    sp.add_argument("--measures", default=None, help=argparse.SUPPRESS)
    sp.add_argument("--threshold", type=float, default=DEFAULT_GAP_THRESHOLD)
    sp.set_defaults(func=cmd_gap_scan)

    sp = sub.add_parser("suggest-split", help="propose one region split")
    _add_common(sp); _add_point(sp)
    sp.add_argument("--partition", help="shipped partition name or file")
    sp.add_argument("--floor", type=float, default=0.05,
                    help="minimum admissible split score")
    sp.add_argument("--patch", help="write the patched partition here")
    sp.set_defaults(func=cmd_suggest_split)

    sp = sub.add_parser("lz", help="LZ76 of a walk or a symbol file")
    _add_common(sp); _add_point(sp)
    sp.add_argument("--partition", help="shipped partition name or file")
    sp.add_argument("--input", help="text file of symbols (whitespace "
                                    "ignored); omitted = simulate a walk")
    sp.add_argument("--walk-len", dest="walk_len", type=int, default=100_000)
    sp.set_defaults(func=cmd_lz)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except BrokenPipeError:
        return 0
    except (FhrChaosError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
