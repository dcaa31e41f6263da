"""Experiment orchestration: replicate scheduling, per-replicate rows and summaries.

Each experiment maps ``(n, replicate)`` to one JSON-serializable row using
only the random streams keyed by ``(seed, n, replicate)``, so any row can be
replayed in isolation and partial results merge in any order. Summaries
carry the pass/fail checks behind the command line exit code.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np

from .degrees import DegreeSequence, iid_degrees, quantile_degrees, theta_limits
from .errors import ParameterError
from .explore import component_table, components_from_trace, explore, max_diameter
from .graph import percolate_retain
from .limit import excursion_table, mark_surplus, simulate_limit_path, z_limit
from .nearcritical import (
    hub_edge_count,
    kappa,
    subcritical_prediction,
    supercritical_fixed_point,
    supercritical_prediction,
)
from .params import ModelParams, critical_p, criticality_parameter, exponents
from .rng import Phase, stream
from .stats import fit_exponent, ks_distance
from .unionfind import union_find_components

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "Report",
    "run_experiment",
    "replay_row",
    "merge_rows",
    "load_config",
]

EXPERIMENTS = (
    "critical_window",
    "diameter",
    "subcritical",
    "supercritical",
    "limit_compare",
    "hub_poisson",
    "oracle_suite",
)

# acceptance tolerances per experiment
TOL = {
    "critical_slope": 0.08,
    "diameter_ratio": 1.8,
    "diameter_r2": 0.8,
    "subcritical_rel": 0.15,
    "subcritical_surplus_frac": 0.95,
    "hub_containment": 0.80,
    "supercritical_rel": 0.20,
    "giant_ratio": 0.1,
    "ks": 0.12,
    "surplus_rel": 0.20,
    "hub_rel": 0.10,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment over an ``n`` ladder.

    ``p_exponent`` sets ``p_n = n**-p_exponent`` in the sub/supercritical
    experiments (defaults ``(alpha+eta)/2`` and ``eta/2``); the other
    experiments run at ``p_c(lam) = lam/nu_n`` with ``lam = model.lam``.
    """

    experiment: str
    model: ModelParams = field(default_factory=lambda: ModelParams(tau=2.5))
    ladder: tuple = (1 << 14,)
    replicates: int = 10
    p_exponent: Optional[float] = None
    out: Optional[str] = None
    seed: int = 0
    case: str = "I"
    horizon: float = 30.0
    max_tail: float = 1e-3
    limit_paths: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ParameterError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.replicates < 1:
            raise ParameterError("replicates must be at least 1")
        ladder = tuple(int(x) for x in self.ladder)
        if not ladder or list(ladder) != sorted(ladder) or len(set(ladder)) != len(ladder):
            raise ParameterError("ladder must be nonempty and strictly ascending")
        if ladder[0] < 2:
            raise ParameterError("ladder sizes must be at least 2")
        object.__setattr__(self, "ladder", ladder)
        if self.case not in ("I", "II"):
            raise ParameterError("case must be 'I' or 'II'")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")

    @property
    def n_limit_paths(self) -> int:
        return self.limit_paths if self.limit_paths is not None else self.replicates

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ladder"] = list(self.ladder)
        return d


@dataclass
class Report:
    config: ExperimentConfig
    rows: list
    summary: dict
    checks: dict
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.rows)

    def csv(self) -> str:
        keys = sorted({k for r in self.rows for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r)
        return buf.getvalue()

    def write(self, path, fmt: str = "jsonl") -> Path:
        """Rows to ``path``; summary and checks to ``<path>.summary.json``."""
        path = Path(path)
        if fmt == "jsonl":
            path.write_text(self.jsonl())
        elif fmt == "csv":
            path.write_text(self.csv())
        else:
            raise ParameterError(f"unknown format {fmt!r}")
        meta = {
            "config": self.config.as_dict(),
            "summary": self.summary,
            "checks": self.checks,
            "passed": self.passed,
            "warnings": self.warnings,
        }
        side = path.with_name(path.name + ".summary.json")
        side.write_text(json.dumps(meta, sort_keys=True, indent=1, default=_jsonable) + "\n")
        return side

    def summary_table(self) -> str:
        lines = [f"experiment: {self.config.experiment}  rows: {len(self.rows)}"]
        for key, val in _flatten(self.summary):
            lines.append(f"  {key:<40} {_fmt(val)}")
        for key, ok in self.checks.items():
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] {key}")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        return "\n".join(lines)


def _flatten(d, prefix=""):
    for k, v in d.items():
        if isinstance(v, dict):
            yield from _flatten(v, f"{prefix}{k}.")
        else:
            yield f"{prefix}{k}", v


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and v and isinstance(v[0], float):
        return "[" + ", ".join(f"{x:.4g}" for x in v) + "]"
    return str(v)


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def _clean(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, np.generic):
            v = v.item()
        out[k] = v
    return out


# per-n context ------------------------------------------------------------


@lru_cache(maxsize=8)
def _quantile_sequence(tau: float, c_F: float, n: int) -> DegreeSequence:
    return quantile_degrees(ModelParams(tau=tau, c_F=c_F, n=n))


def _degrees(cfg: ExperimentConfig, n: int, rep: int) -> DegreeSequence:
    m = cfg.model
    if cfg.case == "I":
        return _quantile_sequence(m.tau, m.c_F, n)
    params = ModelParams(tau=m.tau, lam=m.lam, c_F=m.c_F, n=n, seed=cfg.seed)
    return iid_degrees(params, stream(cfg.seed, rep, Phase.DEGREES, n))


def _p_exponent(cfg: ExperimentConfig) -> float:
    if cfg.p_exponent is not None:
        return cfg.p_exponent
    ex = exponents(cfg.model.tau)
    if cfg.experiment == "subcritical":
        return (ex.alpha + ex.eta) / 2.0
    return ex.eta / 2.0


def _probability(cfg: ExperimentConfig, degrees: DegreeSequence) -> float:
    if cfg.experiment in ("subcritical", "supercritical"):
        return float(degrees.n) ** (-_p_exponent(cfg))
    return critical_p(cfg.model.lam, criticality_parameter(degrees.d))


def _top(values: np.ndarray, k: int) -> list:
    out = values[:k].tolist()
    return out + [0] * (k - len(out))


# replicate kernels --------------------------------------------------------


def _graph_components(cfg, n, rep):
    degrees = _degrees(cfg, n, rep)
    p = _probability(cfg, degrees)
    out = percolate_retain(degrees, p, stream(cfg.seed, rep, Phase.PERCOLATE, n))
    return degrees, p, out, component_table(out.graph)


def _row_critical(cfg, n, rep):
    degrees, p, out, table = _graph_components(cfg, n, rep)
    order = table.order()
    sizes, surplus = table.sizes[order], table.surplus[order]
    rho = exponents(cfg.model.tau).rho
    c = _top(sizes, 3)
    s = _top(surplus, 3)
    return {
        "C1": c[0], "C2": c[1], "C3": c[2],
        "S1": s[0], "S2": s[1], "S3": s[2],
        "C1_scaled": c[0] * float(n) ** (-rho),
        "p": p,
        "dummy": out.dummy,
    }


def _row_diameter(cfg, n, rep):
    degrees, p, out, table = _graph_components(cfg, n, rep)
    diam, exact = max_diameter(out.graph, table)
    return {"diameter": diam, "exact": exact, "C1": int(table.sizes.max(initial=0)), "p": p}


def _row_subcritical(cfg, n, rep):
    degrees, p, out, table = _graph_components(cfg, n, rep)
    order = table.order()
    rank = np.empty(order.size, dtype=np.int64)
    rank[order] = np.arange(1, order.size + 1)
    alpha = exponents(cfg.model.tau).alpha
    scale = float(n) ** alpha * p
    c = _top(table.sizes[order], 3)
    s = _top(table.surplus[order], 3)
    row = {f"C{i + 1}": c[i] for i in range(3)}
    row.update({f"S{i + 1}": s[i] for i in range(3)})
    row.update({f"R{i + 1}": c[i] / scale for i in range(3)})
    row.update({f"hub{i}_rank": int(rank[table.labels[i - 1]]) for i in (1, 2)})
    row["p"] = p
    return row


def _row_supercritical(cfg, n, rep):
    degrees, p, out, table = _graph_components(cfg, n, rep)
    order = table.order()
    c = _top(table.sizes[order], 2)
    e1 = int(table.edges[order[0]]) if order.size else 0
    e = 1.0 / (3.0 - cfg.model.tau)
    return {
        "C1": c[0], "C2": c[1], "E1": e1,
        "C1_scaled": c[0] / (float(n) * p**e),
        "C2_over_C1": c[1] / c[0] if c[0] else 0.0,
        "p": p,
    }


def _row_hub(cfg, n, rep):
    degrees, p, out, table = _graph_components(cfg, n, rep)
    return {
        "count12": hub_edge_count(out, 1, 2),
        "count13": hub_edge_count(out, 1, 3),
        "same12": bool(table.labels[0] == table.labels[1]),
        "p": p,
    }


def _row_oracle(cfg, n, rep):
    """Exact identities on one small percolated instance."""
    m = cfg.model
    params = ModelParams(tau=m.tau, c_F=m.c_F, n=n, seed=cfg.seed)
    rng = stream(cfg.seed, rep, Phase.PERCOLATE, n)
    degrees = quantile_degrees(params) if rep % 2 == 0 else iid_degrees(params, stream(cfg.seed, rep, Phase.DEGREES, n))
    p = float(rng.uniform(0.2, 1.0))
    out = percolate_retain(degrees, p, rng)
    trace = explore(out.retained_degrees, stream(cfg.seed, rep, Phase.EXPLORE, n))
    g = trace.graph
    recs = components_from_trace(trace)
    ell = int(out.retained_degrees.sum())

    flags = np.cumsum(trace.surplus_flag.astype(np.int64))
    bounds = np.concatenate([[0], trace.tau])
    flag_counts = flags[bounds[1:]] - flags[bounds[:-1]]
    explored = [r for r in recs if r.size > 0]

    u, v = g.edges()
    uf = {frozenset(c) for c in union_find_components(n, u, v)}
    ex = {frozenset(r.vertices.tolist()) for r in recs}
    table = component_table(g)
    fast = sorted(zip(table.sizes.tolist(), table.edges.tolist()))
    slow = sorted((r.size, r.edges) for r in recs)

    # the same identities along the pairing drawn by the percolation step
    trace2 = explore(out.graph, stream(cfg.seed, rep, Phase.EXPLORE, n))
    u2, v2 = out.graph.edges()
    uf2 = {frozenset(c) for c in union_find_components(n, u2, v2)}
    ex2 = {frozenset(r.vertices.tolist()) for r in components_from_trace(trace2)}
    return {
        "p": p,
        "involution": bool(g.check_involution() and out.graph.check_involution()),
        "handshake": bool(sum(r.edges for r in recs) * 2 == ell and g.num_edges * 2 == ell),
        "surplus_identity": bool(
            all(r.surplus == r.edges - r.size + 1 for r in explored)
            and np.array_equal(flag_counts, [r.surplus for r in explored])
        ),
        "union_find": bool(uf == ex and uf2 == ex2),
        "fast_route": bool(fast == slow),
    }


_ROWS = {
    "critical_window": _row_critical,
    "diameter": _row_diameter,
    "subcritical": _row_subcritical,
    "supercritical": _row_supercritical,
    "hub_poisson": _row_hub,
    "oracle_suite": _row_oracle,
    "limit_compare": _row_critical,
}


@lru_cache(maxsize=4)
def _limit_context(cfg: ExperimentConfig):
    n = cfg.ladder[-1]
    degrees = _degrees(cfg, n, 0)
    theta = theta_limits(cfg.model, 1)
    theta = theta.with_K(theta.K_for_tail(cfg.max_tail))
    return theta, degrees.mu


def _row_limit(cfg, rep, theta, mu):
    path = simulate_limit_path(
        theta, cfg.model.lam, mu, cfg.horizon, stream(cfg.seed, rep, Phase.LIMIT), max_tail=cfg.max_tail
    )
    table = mark_surplus(excursion_table(path), path.mark_rate, stream(cfg.seed, rep, Phase.MARKS))
    z = z_limit(table, 2)
    g = z.x.tolist() + [0.0] * (2 - len(z))
    marks = z.y.tolist() + [0] * (2 - len(z))
    return {
        "gamma1": g[0], "gamma2": g[1], "N1": int(marks[0]), "N2": int(marks[1]),
        "truncated": bool(z.truncated),
    }


def replay_row(cfg: ExperimentConfig, n: int, rep: int, kind: str = "graph") -> dict:
    """Regenerate one row from ``(seed, n, replicate)`` alone."""
    if kind == "limit":
        theta, mu = _limit_context(cfg)
        body = _row_limit(cfg, rep, theta, mu)
    else:
        body = _ROWS[cfg.experiment](cfg, n, rep)
    row = {"experiment": cfg.experiment, "seed": cfg.seed, "n": int(n), "rep": int(rep), "kind": kind}
    row.update(body)
    if kind == "limit":
        row["p"] = None
    return _clean(row)


def _task(args):
    cfg, n, rep, kind = args
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        row = replay_row(cfg, n, rep, kind)
    return row, [str(w.message) for w in caught]


def merge_rows(*parts) -> list:
    """Concatenate row lists into the canonical ``(kind, n, rep)`` order."""
    rows = [r for part in parts for r in part]
    return sorted(rows, key=lambda r: (r["kind"], r["n"], r["rep"]))


def _tasks(cfg: ExperimentConfig) -> list:
    tasks = [(cfg, n, r, "graph") for n in cfg.ladder for r in range(cfg.replicates)]
    if cfg.experiment == "limit_compare":
        tasks += [(cfg, cfg.ladder[-1], r, "limit") for r in range(cfg.n_limit_paths)]
    return tasks


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Run every replicate, summarize, and write the rows if ``cfg.out`` is set."""
    tasks = _tasks(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * cfg.workers))))
    else:
        results = [_task(t) for t in tasks]
    rows = merge_rows([r for r, _ in results])
    warn = sorted({w for _, ws in results for w in ws})
    summary, checks = _SUMMARIES[cfg.experiment](cfg, rows)
    report = Report(cfg, rows, summary, checks, warn)
    if cfg.out:
        report.write(cfg.out)
    return report


# summaries ----------------------------------------------------------------


def _by_n(rows, kind="graph"):
    out = {}
    for r in rows:
        if r["kind"] == kind:
            out.setdefault(r["n"], []).append(r)
    return out


def _col(rows, key) -> np.ndarray:
    return np.array([r[key] for r in rows], dtype=np.float64)


def _describe(x: np.ndarray) -> dict:
    q = np.quantile(x, [0.1, 0.5, 0.9])
    return {
        "mean": float(x.mean()),
        "sem": float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan"),
        "q10": float(q[0]), "median": float(q[1]), "q90": float(q[2]),
    }


def _summary_critical(cfg, rows):
    groups = _by_n(rows)
    rho = exponents(cfg.model.tau).rho
    summary = {"rho": rho, "per_n": {str(n): _describe(_col(g, "C1")) for n, g in groups.items()}}
    checks = {}
    if len(groups) >= 3:
        fit = fit_exponent([(n, _col(g, "C1").mean()) for n, g in groups.items()])
        summary["slope"], summary["slope_stderr"] = fit.slope, fit.stderr
        checks["critical_slope"] = abs(fit.slope - rho) <= TOL["critical_slope"]
    return summary, checks


def _summary_diameter(cfg, rows):
    groups = _by_n(rows)
    med = {n: float(np.median(_col(g, "diameter"))) for n, g in groups.items()}
    summary = {
        "per_n": {str(n): _describe(_col(g, "diameter")) for n, g in groups.items()},
        "all_exact": all(r["exact"] for r in rows),
    }
    checks = {}
    n0 = cfg.ladder[0]
    if 16 * n0 in med:
        ratio = med[16 * n0] / med[n0]
        summary["ratio_16n"] = ratio
        checks["diameter_ratio"] = ratio < TOL["diameter_ratio"]
    if len(groups) >= 3:
        fit = fit_exponent([(n, _col(g, "diameter").mean()) for n, g in groups.items()], mode="log")
        summary["log_slope"], summary["r_squared"] = fit.slope, fit.r_squared
        checks["diameter_r2"] = fit.r_squared > TOL["diameter_r2"]
    return summary, checks


def _summary_subcritical(cfg, rows):
    summary, checks = {}, {}
    for n, g in _by_n(rows).items():
        degrees = _degrees(cfg, n, 0)
        theta = theta_limits(cfg.model, 10)
        p = float(np.mean(_col(g, "p")))
        pc = critical_p(cfg.model.lam, criticality_parameter(degrees.d)) if cfg.case == "I" else None
        pred = subcritical_prediction(theta, n, p, p_c=pc)
        rel = [float(_col(g, f"R{i}").mean() / theta.values(i)) for i in (1, 2, 3)]
        zero = float(np.mean([r["S1"] == r["S2"] == r["S3"] == 0 for r in g]))
        hubs = [float(np.mean([r[f"hub{i}_rank"] == i for r in g])) for i in (1, 2)]
        summary[str(n)] = {
            "ratio_to_theta": rel,
            "surplus_zero_frac": zero,
            "hub_containment": hubs,
            "prediction": pred.as_dict(),
        }
        key = f"n={n}:"
        checks[key + "ratios"] = all(abs(x - 1.0) <= TOL["subcritical_rel"] for x in rel)
        checks[key + "surplus"] = zero >= TOL["subcritical_surplus_frac"]
        checks[key + "hubs"] = all(h >= TOL["hub_containment"] for h in hubs)
    return summary, checks


def _summary_supercritical(cfg, rows):
    summary, checks = {}, {}
    k = kappa(cfg.model.c_F, cfg.model.tau)
    for n, g in _by_n(rows).items():
        degrees = _degrees(cfg, n, 0)
        p = float(np.mean(_col(g, "p")))
        pc = critical_p(cfg.model.lam, criticality_parameter(degrees.d)) if cfg.case == "I" else None
        pred = supercritical_prediction(degrees.mu, k, cfg.model.tau, n, p, p_c=pc)
        base = float(n) * p ** (1.0 / (3.0 - cfg.model.tau))
        target = pred.get("C1") / base
        mean = float(_col(g, "C1_scaled").mean())
        ratio_med = float(np.median(_col(g, "C2_over_C1")))
        fp_size, fp_edges = supercritical_fixed_point(degrees, p)
        summary[str(n)] = {
            "C1_scaled": _describe(_col(g, "C1_scaled")),
            "target": target,
            "target_laplace": pred.get("C1_laplace") / base,
            "fixed_point": fp_size / base,
            "fixed_point_edges": fp_edges / base,
            "E1_scaled_mean": float(_col(g, "E1").mean() / base),
            "C2_over_C1_median": ratio_med,
            "kappa": k,
            "mu": degrees.mu,
        }
        key = f"n={n}:"
        checks[key + "giant"] = abs(mean / target - 1.0) <= TOL["supercritical_rel"]
        checks[key + "second"] = ratio_med < TOL["giant_ratio"]
    return summary, checks


def _summary_limit(cfg, rows):
    n = cfg.ladder[-1]
    graph = [r for r in rows if r["kind"] == "graph" and r["n"] == n]
    lim = [r for r in rows if r["kind"] == "limit"]
    emp, gam = _col(graph, "C1_scaled"), _col(lim, "gamma1")
    ks = ks_distance(emp, gam)
    s_graph, s_lim = float(_col(graph, "S1").mean()), float(_col(lim, "N1").mean())
    summary = {
        "n": n,
        "C1_scaled": _describe(emp),
        "gamma1": _describe(gam),
        "ks": ks,
        "surplus_graph_mean": s_graph,
        "marks_limit_mean": s_lim,
        "truncated_paths": int(sum(r["truncated"] for r in lim)),
    }
    checks = {
        "ks": ks < TOL["ks"],
        "surplus": s_lim > 0 and abs(s_graph / s_lim - 1.0) <= TOL["surplus_rel"],
    }
    return summary, checks


def _summary_hub(cfg, rows):
    summary, checks = {}, {}
    for n, g in _by_n(rows).items():
        degrees = _degrees(cfg, n, 0)
        theta = theta_limits(cfg.model, 3)
        lam = cfg.model.lam
        t1, t2 = theta.values(1), theta.values(2)
        target = lam * t1 * t2 / degrees.mu
        mean = float(_col(g, "count12").mean())
        summary[str(n)] = {
            "count12": _describe(_col(g, "count12")),
            "target": target,
            "target_norm": lam * t1 * t2 / theta.l2_norm_sq,
            "same12_frac": float(np.mean([r["same12"] for r in g])),
        }
        checks[f"n={n}:count12"] = abs(mean / target - 1.0) <= TOL["hub_rel"]
    return summary, checks


def _summary_oracle(cfg, rows):
    keys = ("involution", "handshake", "surplus_identity", "union_find", "fast_route")
    summary = {k: int(sum(r[k] for r in rows)) for k in keys}
    summary["replicates"] = len(rows)
    return summary, {k: summary[k] == len(rows) for k in keys}


_SUMMARIES = {
    "critical_window": _summary_critical,
    "diameter": _summary_diameter,
    "subcritical": _summary_subcritical,
    "supercritical": _summary_supercritical,
    "limit_compare": _summary_limit,
    "hub_poisson": _summary_hub,
    "oracle_suite": _summary_oracle,
}


# config files -------------------------------------------------------------

_MODEL_KEYS = {"tau": float, "lam": float, "lambda": float, "c_F": float, "cf": float}
_CONFIG_KEYS = {
    "experiment": str,
    "replicates": int,
    "reps": int,
    "p_exponent": float,
    "out": str,
    "seed": int,
    "case": str,
    "horizon": float,
    "max_tail": float,
    "limit_paths": int,
    "workers": int,
}


def parse_config_text(text: str) -> dict:
    """``key=value`` lines (``#`` comments) into a flat dict of strings."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def build_config(values: dict) -> ExperimentConfig:
    """Typed :class:`ExperimentConfig` from a flat ``key -> str|value`` mapping."""
    model, kw = {}, {}
    for key, val in values.items():
        if val is None:
            continue
        if key in _MODEL_KEYS:
            name = {"lambda": "lam", "cf": "c_F"}.get(key, key)
            model[name] = float(val)
        elif key in ("n", "ladder"):
            items = val if isinstance(val, (list, tuple)) else str(val).replace(",", " ").split()
            kw["ladder"] = tuple(sorted(int(float(x)) for x in items))
        elif key in _CONFIG_KEYS:
            name = "replicates" if key == "reps" else key
            kw[name] = _CONFIG_KEYS[key](val)
        else:
            raise ParameterError(f"unknown config key {key!r}")
    if "experiment" not in kw:
        raise ParameterError("config needs an experiment id")
    model.setdefault("tau", 2.5)
    seed = kw.get("seed", 0)
    n0 = kw.get("ladder", (1 << 14,))[0]
    kw["model"] = ModelParams(n=n0, seed=seed, **model)
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    return build_config(parse_config_text(Path(path).read_text()))
