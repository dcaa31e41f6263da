"""Configuration-model multigraphs and percolation on them.

Half-edges are numbered contiguously per vertex in vertex order, so vertex
``v`` owns half-edges ``offsets[v] .. offsets[v+1]-1`` and the only
per-half-edge state is the matching involution ``partner``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .degrees import DegreeSequence
from .errors import CouplingRegimeError, ParameterError, ParityError

__all__ = [
    "MultiGraph",
    "PercolationMethod",
    "PercolationOutcome",
    "DiagnosticsReport",
    "configuration_model",
    "percolate_retain",
    "percolate_fountoulakis",
    "sandwich_epsilon",
    "percolated_degree_diagnostics",
    "write_edgelist",
    "read_edgelist",
]

DegreesLike = Union[DegreeSequence, np.ndarray, list]


def _as_degree_array(degrees: DegreesLike) -> np.ndarray:
    d = getattr(degrees, "d", degrees)
    d = np.asarray(d, dtype=np.int64)
    if d.ndim != 1:
        raise ParameterError("degrees must be one-dimensional")
    if d.size and d.min() < 0:
        raise ParameterError("degrees must be non-negative")
    return d


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Multigraph on ``n`` vertices given by a perfect matching of half-edges.

    Self-loops (both half-edges on one vertex) and multi-edges are allowed.
    """

    offsets: np.ndarray
    partner: np.ndarray

    def __post_init__(self):
        for name in ("offsets", "partner"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_degrees(cls, degree: np.ndarray, partner: np.ndarray) -> "MultiGraph":
        offsets = np.zeros(len(degree) + 1, dtype=np.int64)
        np.cumsum(degree, out=offsets[1:])
        return cls(offsets, partner)

    @property
    def n(self) -> int:
        return int(self.offsets.size - 1)

    @property
    def num_half_edges(self) -> int:
        return int(self.partner.size)

    @property
    def num_edges(self) -> int:
        return self.num_half_edges // 2

    @cached_property
    def degree(self) -> np.ndarray:
        return np.diff(self.offsets)

    @cached_property
    def owner(self) -> np.ndarray:
        """Vertex owning each half-edge."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degree)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays ``(u, v)``, one entry per edge, ordered by the lower half-edge."""
        h = np.flatnonzero(np.arange(self.num_half_edges) < self.partner)
        return self.owner[h], self.owner[self.partner[h]]

    def adjacency(self) -> list[list[int]]:
        """Neighbour lists with multiplicity; a self-loop lists the vertex twice."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        own = self.owner.tolist()
        for h, g in enumerate(self.partner.tolist()):
            adj[own[h]].append(own[g])
        return adj

    def check_involution(self) -> bool:
        idx = np.arange(self.num_half_edges)
        part = self.partner
        if part.size == 0:
            return True
        if part.min() < 0 or part.max() >= part.size:
            return False
        return bool(np.all(part[part] == idx) and np.all(part != idx))

    def edge_multiset(self) -> list[tuple[int, int]]:
        u, v = self.edges()
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((hi, lo))
        return list(zip(lo[order].tolist(), hi[order].tolist()))


def _uniform_matching(degree: np.ndarray, rng: np.random.Generator) -> MultiGraph:
    total = int(degree.sum())
    if total % 2:
        raise ParityError(f"odd number of half-edges ({total})")
    perm = rng.permutation(total)
    partner = np.empty(total, dtype=np.int64)
    a, b = perm[0::2], perm[1::2]
    partner[a] = b
    partner[b] = a
    return MultiGraph.from_degrees(degree, partner)


def configuration_model(degrees: DegreesLike, rng: np.random.Generator) -> MultiGraph:
    """Uniform perfect matching of all half-edges (shuffle, then pair neighbours)."""
    return _uniform_matching(_as_degree_array(degrees), rng)


class PercolationMethod(str, enum.Enum):
    RETAIN = "RetainAlgo1"
    FOUNTOULAKIS = "FountoulakisAlgo2"


@dataclass(frozen=True, eq=False)
class PercolationOutcome:
    graph: MultiGraph
    retained_degrees: np.ndarray
    method: PercolationMethod
    p: float
    dummy: bool = False
    X: Optional[int] = None

    @property
    def ell_tilde(self) -> int:
        return int(self.retained_degrees.sum())


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p!r}")
    return p


def percolate_retain(degrees: DegreesLike, p: float, rng: np.random.Generator) -> PercolationOutcome:
    """Keep each half-edge independently with probability ``p``, then match uniformly.

    An odd number of retained half-edges gets one dummy half-edge on vertex 1
    (index 0).
    """
    p = _check_p(p)
    d = _as_degree_array(degrees)
    dt = rng.binomial(d, p).astype(np.int64)
    dummy = bool(dt.sum() % 2)
    if dummy:
        dt[0] += 1
    graph = _uniform_matching(dt, rng)
    dt.setflags(write=False)
    return PercolationOutcome(graph, dt, PercolationMethod.RETAIN, p, dummy=dummy)


def percolate_fountoulakis(degrees: DegreesLike, p: float, rng: np.random.Generator) -> PercolationOutcome:
    """Draw ``X ~ Bin(ell_n/2, p)``, keep a uniform ``2X``-subset of half-edges, match it uniformly.

    The result has the law of bond percolation on ``CM_n(d)``.
    """
    p = _check_p(p)
    d = _as_degree_array(degrees)
    total = int(d.sum())
    if total % 2:
        raise ParityError(f"odd number of half-edges ({total})")
    X = int(rng.binomial(total // 2, p))
    chosen = rng.choice(total, size=2 * X, replace=False)
    offsets = np.zeros(d.size + 1, dtype=np.int64)
    np.cumsum(d, out=offsets[1:])
    owner = np.searchsorted(offsets, chosen, side="right") - 1
    dt = np.bincount(owner, minlength=d.size).astype(np.int64)
    # relabel chosen half-edges contiguously per vertex, keep the random order for pairing
    new_label = np.empty(2 * X, dtype=np.int64)
    new_label[np.argsort(chosen, kind="stable")] = np.arange(2 * X)
    a, b = new_label[0::2], new_label[1::2]
    partner = np.empty(2 * X, dtype=np.int64)
    partner[a] = b
    partner[b] = a
    dt.setflags(write=False)
    return PercolationOutcome(
        MultiGraph.from_degrees(dt, partner), dt, PercolationMethod.FOUNTOULAKIS, p, X=X
    )


def sandwich_epsilon(n: int, ell_n: int, p: float) -> float:
    """Slack ``log(n) / sqrt(ell_n p)`` for the two-sided half-edge-count coupling.

    It exceeds the required rate ``sqrt(log(n) / (ell_n p))`` by ``sqrt(log n)``
    and vanishes when ``ell_n p >> (log n)**2``. A ``RuntimeWarning`` flags
    ``ell_n p <= log n``, where the required rate itself is not small.
    """
    if n < 2:
        raise ParameterError("n must be at least 2")
    mass = ell_n * p
    if not mass > 0:
        raise CouplingRegimeError("ell_n * p must be positive")
    logn = math.log(n)
    if mass <= logn:
        warnings.warn(
            f"ell_n*p = {mass:.4g} is not large compared with log(n) = {logn:.4g}",
            RuntimeWarning,
            stacklevel=2,
        )
    eps = logn / math.sqrt(mass)
    if eps >= 1.0:
        raise CouplingRegimeError(f"epsilon_n = {eps:.4g} >= 1: coupling regime violated")
    return eps


@dataclass
class DiagnosticsReport:
    """Percolated-degree statistics compared with their ``p``-scaled originals."""

    nu_tilde: float
    nu_ratio: float
    hub_ratios: np.ndarray
    ell_ratio: float
    tail_stat: float
    degenerate: bool
    flags: dict = field(default_factory=dict)


def percolated_degree_diagnostics(
    outcome: PercolationOutcome, degrees: DegreesLike, p: float, *, hubs: int = 10, K: int = 10
) -> DiagnosticsReport:
    d = _as_degree_array(degrees).astype(np.float64)
    dt = outcome.retained_degrees.astype(np.float64)
    ell_t = float(dt.sum())
    if ell_t == 0 or p == 0:
        nan = float("nan")
        return DiagnosticsReport(nan, nan, np.full(min(hubs, d.size), nan), nan, nan, True)
    nu_t = float((dt * (dt - 1)).sum() / ell_t)
    nu = float((d * (d - 1)).sum() / d.sum())
    m = min(hubs, d.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        hub = dt[:m] / (p * d[:m])
    tail = float((dt[K:] * (dt[K:] - 1)).sum() / ell_t)
    return DiagnosticsReport(
        nu_tilde=nu_t,
        nu_ratio=nu_t / (p * nu) if nu > 0 else float("nan"),
        hub_ratios=hub,
        ell_ratio=ell_t / (p * d.sum()),
        tail_stat=tail,
        degenerate=False,
    )


def write_edgelist(path, graph: MultiGraph) -> None:
    """Header ``n m`` followed by ``u v`` lines (``u <= v``, lexicographic, 0-based)."""
    lines = [f"{graph.n} {graph.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in graph.edge_multiset())
    Path(path).write_text("\n".join(lines) + "\n")


def read_edgelist(path) -> MultiGraph:
    rows = Path(path).read_text().split("\n")
    n, m = (int(x) for x in rows[0].split())
    body = [r for r in rows[1:] if r.strip()]
    if len(body) != m:
        raise ParameterError(f"header announces {m} edges, found {len(body)}")
    ends = np.array([[int(x) for x in r.split()] for r in body], dtype=np.int64).reshape(-1)
    if ends.size and (ends.min() < 0 or ends.max() >= n):
        raise ParameterError("vertex id out of range")
    degree = np.bincount(ends, minlength=n).astype(np.int64)
    # position j of the endpoint list becomes half-edge label[j]
    label = np.empty(ends.size, dtype=np.int64)
    label[np.argsort(ends, kind="stable")] = np.arange(ends.size)
    partner = np.empty(ends.size, dtype=np.int64)
    partner[label[0::2]] = label[1::2]
    partner[label[1::2]] = label[0::2]
    return MultiGraph.from_degrees(degree, partner)
