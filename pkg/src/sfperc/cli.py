"""Command line entry point ``sfperc``.

Exit codes: 0 on success (and passing checks), 2 when an experiment's
acceptance checks fail, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .degrees import iid_degrees, load_degrees, quantile_degrees, save_degrees, theta_limits
from .errors import SfpercError
from .explore import components_from_trace, explore, write_components_csv, write_trace_csv
from .graph import percolate_fountoulakis, percolate_retain, write_edgelist
from .harness import EXPERIMENTS, build_config, parse_config_text, run_experiment
from .limit import excursion_table, mark_surplus, simulate_limit_path, write_excursions_csv
from .params import ModelParams, critical_p, criticality_parameter
from .rng import Phase, stream

log = logging.getLogger("sfperc")

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

# flag dest -> config key
_FLAG_KEYS = {
    "tau": "tau",
    "lam": "lambda",
    "cf": "cf",
    "n": "n",
    "reps": "reps",
    "p_exponent": "p_exponent",
    "seed": "seed",
    "out": "out",
    "case": "case",
    "workers": "workers",
    "horizon": "horizon",
    "max_tail": "max_tail",
    "limit_paths": "limit_paths",
}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tau", type=float, help="power-law exponent in (2, 3)")
    p.add_argument("--lambda", dest="lam", type=float, help="critical-window parameter")
    p.add_argument("--cf", type=float, help="tail constant c_F")
    p.add_argument("--n", type=int, nargs="+", help="number of vertices (a ladder for experiments)")
    p.add_argument("--reps", type=int, help="replicates")
    p.add_argument("--p-exponent", dest="p_exponent", type=float, help="use p = n**-exponent")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=("csv", "jsonl"), default=None)
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="sfperc", description="Percolation on power-law configuration models.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-degrees", parents=[common], help="write a degree sequence")
    g.add_argument("--case", choices=("I", "II"), default=None)

    for name, helptext in (("percolate", "percolate and write an edge list"), ("explore", "explore a percolated graph")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--degrees", help="degree file (otherwise Case I from --tau/--cf/--n)")
        s.add_argument("--p", type=float, help="percolation probability (default p_c(lambda))")
        s.add_argument("--case", choices=("I", "II"), default=None)
        if name == "percolate":
            s.add_argument("--method", choices=("retain", "fountoulakis"), default="retain")
        else:
            s.add_argument("--trace", help="also write the exploration walk as CSV")

    ls = sub.add_parser("limit-sim", parents=[common], help="simulate limit-process excursions")
    ls.add_argument("--horizon", type=float, help="time horizon T")
    ls.add_argument("--max-tail", dest="max_tail", type=float, help="relative tail mass bound")
    ls.add_argument("--mu", type=float, help="mean degree (default: realized Case I value at --n)")
    ls.add_argument("--top", type=int, default=10, help="excursions reported per path")

    ex = sub.add_parser("experiment", parents=[common], help="run an experiment and its checks")
    ex.add_argument("experiment", nargs="?", choices=EXPERIMENTS)
    ex.add_argument("--case", choices=("I", "II"), default=None)
    ex.add_argument("--workers", type=int)
    ex.add_argument("--horizon", type=float)
    ex.add_argument("--max-tail", dest="max_tail", type=float)
    ex.add_argument("--limit-paths", dest="limit_paths", type=int)
    return parser


_ALIASES = {"lam": "lambda", "c_F": "cf", "replicates": "reps", "ladder": "n"}


def _settings(args) -> dict:
    """Config-file values overlaid with explicitly given flags (canonical flag names)."""
    values = parse_config_text(Path(args.config).read_text()) if args.config else {}
    values = {_ALIASES.get(k, k): v for k, v in values.items()}
    for dest, key in _FLAG_KEYS.items():
        val = getattr(args, dest, None)
        if val is not None:
            values[key] = val
    return values


def _get(values, key, default, cast):
    return cast(values[key]) if key in values else default


def _model(values) -> ModelParams:
    n = values.get("n", 1000)
    n = n[0] if isinstance(n, list) else int(str(n).replace(",", " ").split()[0])
    return ModelParams(
        tau=_get(values, "tau", 2.5, float),
        lam=_get(values, "lambda", 1.0, float),
        c_F=_get(values, "cf", 1.0, float),
        n=int(n),
        seed=_get(values, "seed", 0, int),
    )


def _degree_source(args, values):
    if getattr(args, "degrees", None):
        return load_degrees(args.degrees)
    params = _model(values)
    if _get(values, "case", "I", str) == "II":
        return iid_degrees(params, stream(params.seed, 0, Phase.DEGREES))
    return quantile_degrees(params)


def _percolation_p(args, values, degrees) -> float:
    if getattr(args, "p", None) is not None:
        return args.p
    if "p_exponent" in values:
        return float(degrees.n) ** (-float(values["p_exponent"]))
    return critical_p(_get(values, "lambda", 1.0, float), criticality_parameter(degrees.d))


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_gen_degrees(args, values) -> int:
    params = _model(values)
    if _get(values, "case", "I", str) == "II":
        seq = iid_degrees(params, stream(params.seed, 0, Phase.DEGREES))
    else:
        seq = quantile_degrees(params)
    out = values.get("out")
    if out:
        save_degrees(out, seq)
    _emit({"n": seq.n, "total": seq.total, "mu": seq.mu, "d1": int(seq.d[0]), "out": out})
    return EXIT_OK


def cmd_percolate(args, values) -> int:
    degrees = _degree_source(args, values)
    p = _percolation_p(args, values, degrees)
    rng = stream(_get(values, "seed", 0, int), 0, Phase.PERCOLATE)
    fn = percolate_fountoulakis if args.method == "fountoulakis" else percolate_retain
    outcome = fn(degrees, p, rng)
    out = values.get("out")
    if out:
        write_edgelist(out, outcome.graph)
    _emit({"n": degrees.n, "p": p, "edges": outcome.graph.num_edges, "dummy": outcome.dummy, "out": out})
    return EXIT_OK


def cmd_explore(args, values) -> int:
    degrees = _degree_source(args, values)
    p = _percolation_p(args, values, degrees)
    seed = _get(values, "seed", 0, int)
    outcome = percolate_retain(degrees, p, stream(seed, 0, Phase.PERCOLATE))
    trace = explore(outcome, stream(seed, 0, Phase.EXPLORE))
    records = components_from_trace(trace, with_diameter=True, keep_vertices=False)
    records = sorted((r for r in records if r.size > 0), key=lambda r: (-r.size, -r.surplus))
    if args.trace:
        write_trace_csv(args.trace, trace)
    out = values.get("out")
    if out:
        if (args.format or "csv") == "csv":
            write_components_csv(out, records)
        else:
            with open(out, "w") as fh:
                for r in records:
                    fh.write(json.dumps({"size": r.size, "edges": r.edges, "surplus": r.surplus,
                                         "diameter": r.diameter, "exact": r.diameter_exact,
                                         "hubs": r.contains_hubs}, sort_keys=True) + "\n")
    _emit({"n": degrees.n, "p": p, "components": len(records),
           "largest": [r.size for r in records[:3]], "out": out})
    return EXIT_OK


def cmd_limit_sim(args, values) -> int:
    params = _model(values)
    mu = args.mu if args.mu is not None else quantile_degrees(params).mu
    T = _get(values, "horizon", 30.0, float)
    max_tail = _get(values, "max_tail", 1e-3, float)
    theta = theta_limits(params, 1)
    theta = theta.with_K(theta.K_for_tail(max_tail))
    reps = _get(values, "reps", 1, int)
    rows = []
    for r in range(reps):
        path = simulate_limit_path(theta, params.lam, mu, T, stream(params.seed, r, Phase.LIMIT), max_tail=max_tail)
        table = mark_surplus(excursion_table(path), path.mark_rate, stream(params.seed, r, Phase.MARKS))
        if reps == 1 and values.get("out") and (args.format or "csv") == "csv":
            write_excursions_csv(values["out"], table)
        for rank, k in enumerate(table.ranked()[: args.top].tolist(), 1):
            rows.append({"rep": r, "rank": rank, "l": float(table.l[k]), "r": float(table.r[k]),
                         "length": float(table.length[k]), "area": float(table.area[k]),
                         "marks": int(table.marks[k]), "open": bool(table.open[k])})
    out = values.get("out")
    if out and not (reps == 1 and (args.format or "csv") == "csv"):
        with open(out, "w") as fh:
            if (args.format or "jsonl") == "jsonl":
                fh.writelines(json.dumps(row, sort_keys=True) + "\n" for row in rows)
            else:
                keys = list(rows[0]) if rows else []
                fh.write(",".join(keys) + "\n")
                fh.writelines(",".join(repr(row[k]) for k in keys) + "\n" for row in rows)
    gam = [row["length"] for row in rows if row["rank"] == 1]
    _emit({"paths": reps, "K": theta.K, "mu": mu, "gamma1_mean": float(np.mean(gam)) if gam else None, "out": out})
    return EXIT_OK


def cmd_experiment(args, values) -> int:
    if args.experiment:
        values["experiment"] = args.experiment
    values.pop("format", None)
    out = values.pop("out", None)
    cfg = build_config(values)
    report = run_experiment(cfg)
    if out:
        report.write(out, args.format or "jsonl")
    print(report.summary_table())
    return EXIT_OK if report.passed else EXIT_FAIL


_COMMANDS = {
    "gen-degrees": cmd_gen_degrees,
    "percolate": cmd_percolate,
    "explore": cmd_explore,
    "limit-sim": cmd_limit_sim,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args, _settings(args))
    except (SfpercError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
