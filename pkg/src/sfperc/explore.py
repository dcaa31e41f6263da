"""Breadth-first exploration of a percolated configuration model.

The walk ``S(l) = S(l-1) + d_(l) J_l - 2`` is generated together with the
matching: each active half-edge is paired with a uniformly chosen alive
half-edge at the moment it is explored. Component ``k`` is finished at the
first time ``S`` hits ``-2k``.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import IncompleteTraceError, ParameterError
from .graph import MultiGraph, PercolationOutcome

__all__ = [
    "ExplorationTrace",
    "ComponentRecord",
    "ComponentTable",
    "ZVector",
    "explore",
    "components_from_trace",
    "component_table",
    "diameter",
    "max_diameter",
    "z_vector",
    "d_U",
    "rescaled_walk",
    "surplus_process",
    "write_trace_csv",
    "write_components_csv",
]

HUB_COUNT = 10
EXACT_DIAMETER_LIMIT = 10_000


@dataclass(frozen=True, eq=False)
class ExplorationTrace:
    """Exploration walk and the multigraph realized while exploring.

    Arrays are indexed by step ``l = 0..L``; step 0 is the initial state
    ``S(0) = 0`` with no vertex.
    """

    S: np.ndarray
    J: np.ndarray
    vertex: np.ndarray
    surplus_flag: np.ndarray
    tau: np.ndarray
    graph: MultiGraph
    retained_degrees: np.ndarray
    complete: bool = True

    @property
    def length(self) -> int:
        return int(self.S.size - 1)

    @property
    def surplus_times(self) -> np.ndarray:
        return np.flatnonzero(self.surplus_flag)

    def discovered_count(self, l) -> np.ndarray:
        """Number of vertices discovered by step ``l`` (``sum_i I_i(l)``)."""
        c = np.cumsum(self.J)
        return c[np.minimum(np.asarray(l, dtype=np.int64), self.length)]


@dataclass
class ComponentRecord:
    size: int
    edges: int
    surplus: int
    diameter: Optional[int] = None
    diameter_exact: bool = True
    contains_hubs: list = field(default_factory=list)
    vertices: Optional[np.ndarray] = None


def explore(
    source: Union[PercolationOutcome, MultiGraph, Sequence[int], np.ndarray],
    rng: Optional[np.random.Generator] = None,
) -> ExplorationTrace:
    """Run the breadth-first exploration.

    Parameters
    ----------
    source
        A :class:`PercolationOutcome` or a retained-degree sequence: the
        matching is drawn during the exploration using ``rng`` and returned
        as ``trace.graph``. A :class:`MultiGraph` is explored along its
        existing pairing instead (``rng`` then only picks component roots).
    rng
        Random generator.
    """
    fixed: Optional[MultiGraph] = None
    if isinstance(source, PercolationOutcome):
        deg = np.asarray(source.retained_degrees, dtype=np.int64)
    elif isinstance(source, MultiGraph):
        fixed = source
        deg = np.asarray(source.degree, dtype=np.int64)
    else:
        deg = np.asarray(source, dtype=np.int64)
    if rng is None:
        rng = np.random.default_rng()
    n = int(deg.size)
    L = int(deg.sum())
    if L % 2:
        raise ParameterError(f"odd number of half-edges ({L})")
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=offsets[1:])
    owner = np.repeat(np.arange(n), deg).tolist()
    degl = deg.tolist()
    cursor = offsets[:-1].tolist()
    fixed_partner = None if fixed is None else fixed.partner.tolist()

    pool = list(range(L))
    pos = list(range(L))
    alive = bytearray(b"\x01") * L
    discovered = bytearray(n)
    active = [0] * n
    partner = [-1] * L
    queue: deque = deque()

    # at most one draw per component root and one per pairing
    draws = rng.random(L + 1).tolist()
    di = 0

    S_out = [0]
    J_out = [False]
    V_out = [-1]
    SP_out = [False]
    tau: list[int] = []
    S = 0
    step = 0

    def kill(h):
        i = pos[h]
        last = pool.pop()
        if last != h:
            pool[i] = last
            pos[last] = i
        alive[h] = 0

    while pool:
        step += 1
        while queue and active[queue[0]] == 0:
            queue.popleft()
        if not queue:
            h = pool[int(draws[di] * len(pool))]
            di += 1
            v = owner[h]
            discovered[v] = 1
            active[v] = degl[v]
            queue.append(v)
            S += degl[v] - 2
            S_out.append(S)
            J_out.append(True)
            V_out.append(v)
            SP_out.append(False)
            continue
        v = queue[0]
        e = cursor[v]
        while not alive[e]:
            e += 1
        cursor[v] = e + 1
        kill(e)
        active[v] -= 1
        if fixed_partner is None:
            f = pool[int(draws[di] * len(pool))]
            di += 1
        else:
            f = fixed_partner[e]
        kill(f)
        partner[e] = f
        partner[f] = e
        w = owner[f]
        if not discovered[w]:
            discovered[w] = 1
            active[w] = degl[w] - 1
            if active[w]:
                queue.append(w)
            S += degl[w] - 2
            J_out.append(True)
            V_out.append(w)
            SP_out.append(False)
        else:
            active[w] -= 1
            S -= 2
            J_out.append(False)
            V_out.append(-1)
            SP_out.append(True)
        S_out.append(S)
        if S == -2 * (len(tau) + 1):
            tau.append(step)

    graph = fixed if fixed is not None else MultiGraph(offsets, np.asarray(partner, dtype=np.int64))
    return ExplorationTrace(
        S=np.asarray(S_out, dtype=np.int64),
        J=np.asarray(J_out, dtype=bool),
        vertex=np.asarray(V_out, dtype=np.int64),
        surplus_flag=np.asarray(SP_out, dtype=bool),
        tau=np.asarray(tau, dtype=np.int64),
        graph=graph,
        retained_degrees=deg,
        complete=True,
    )


def components_from_trace(
    trace: ExplorationTrace,
    outcome: Optional[PercolationOutcome] = None,
    *,
    with_diameter: bool = False,
    keep_vertices: bool = True,
) -> list[ComponentRecord]:
    """One record per explored component, then one size-0 record per degree-zero vertex."""
    if not trace.complete or (trace.length and trace.S[-1] != -2 * trace.tau.size):
        raise IncompleteTraceError("trace does not end at a component boundary")
    deg = trace.retained_degrees if outcome is None else outcome.retained_degrees
    L = int(np.sum(deg))
    if trace.length != trace.tau.size + L // 2:
        raise IncompleteTraceError("trace did not kill every half-edge")
    adj = _neighbour_arrays(trace.graph) if with_diameter else None
    records = []
    start = 0
    J = trace.J
    for t in trace.tau.tolist():
        seg = slice(start + 1, t + 1)
        verts = trace.vertex[seg][J[seg]]
        size = int(verts.size)
        edges = t - start - 1
        rec = ComponentRecord(
            size=size,
            edges=edges,
            surplus=edges - size + 1,
            contains_hubs=sorted(int(v) for v in verts if v < HUB_COUNT),
            vertices=np.sort(verts) if keep_vertices else None,
        )
        if with_diameter:
            rec.diameter, rec.diameter_exact = diameter(
                trace.graph, verts, surplus=rec.surplus, _adj=adj
            )
        records.append(rec)
        start = t
    for v in np.flatnonzero(np.asarray(deg) == 0).tolist():
        records.append(
            ComponentRecord(
                size=0,
                edges=0,
                surplus=0,
                diameter=0 if with_diameter else None,
                contains_hubs=[v] if v < HUB_COUNT else [],
                vertices=np.array([v]) if keep_vertices else None,
            )
        )
    return records


@dataclass(frozen=True, eq=False)
class ComponentTable:
    """Vectorized component statistics of a multigraph.

    ``labels[v]`` is the component id of vertex ``v``; components made of a
    single degree-zero vertex have ``sizes == 0`` by convention.
    """

    labels: np.ndarray
    sizes: np.ndarray
    edges: np.ndarray

    @property
    def surplus(self) -> np.ndarray:
        return np.where(self.sizes > 0, self.edges - self.sizes + 1, 0)

    def order(self) -> np.ndarray:
        """Component ids by size descending, surplus descending on ties."""
        return np.lexsort((-self.surplus, -self.sizes))

    def records(self) -> list[ComponentRecord]:
        return [
            ComponentRecord(size=int(s), edges=int(e), surplus=int(sp))
            for s, e, sp in zip(self.sizes, self.edges, self.surplus)
        ]


def component_table(graph: MultiGraph) -> ComponentTable:
    """Connected components through a sparse-graph traversal (no exploration walk)."""
    n = graph.n
    u, v = graph.edges()
    adj = sparse.coo_matrix((np.ones(u.size, dtype=np.int8), (u, v)), shape=(n, n)).tocsr()
    ncomp, labels = csgraph.connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    edges = np.bincount(labels[u], minlength=ncomp)
    isolated = graph.degree == 0
    sizes = sizes - np.bincount(labels[isolated], minlength=ncomp)
    return ComponentTable(labels=labels, sizes=sizes, edges=edges)


def _neighbour_arrays(graph: MultiGraph):
    owner = graph.owner
    return graph.offsets.tolist(), owner[graph.partner].tolist()


def _bfs_far(start, offsets, nbr, dist):
    """BFS from ``start``; returns (farthest vertex, eccentricity, visited list)."""
    dist[start] = 0
    order = [start]
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        dx = dist[x] + 1
        for y in nbr[offsets[x] : offsets[x + 1]]:
            if y not in dist:
                dist[y] = dx
                order.append(y)
    far = order[-1]
    return far, dist[far], order


def diameter(
    graph: MultiGraph,
    component: Iterable[int],
    *,
    surplus: Optional[int] = None,
    exact_limit: int = EXACT_DIAMETER_LIMIT,
    _adj=None,
) -> tuple[int, bool]:
    """Diameter of a connected vertex set; returns ``(value, exact)``.

    Trees (zero surplus) use a double sweep, which is exact on trees.
    Other components up to ``exact_limit`` vertices run a BFS from every
    vertex; larger ones fall back to the double-sweep lower bound.
    """
    verts = list(component)
    if len(verts) <= 1:
        return 0, True
    offsets, nbr = _adj if _adj is not None else _neighbour_arrays(graph)
    far, _, _ = _bfs_far(verts[0], offsets, nbr, {})
    _, ecc, _ = _bfs_far(far, offsets, nbr, {})
    if surplus == 0:
        return int(ecc), True
    if len(verts) > exact_limit:
        return int(ecc), False
    best = ecc
    for s in verts:
        _, e, _ = _bfs_far(s, offsets, nbr, {})
        if e > best:
            best = e
    return int(best), True


def max_diameter(graph: MultiGraph, table: Optional[ComponentTable] = None, *, min_size: int = 2) -> tuple[int, bool]:
    """``max`` of the component diameters, with a joint exactness flag."""
    if table is None:
        table = component_table(graph)
    adj = _neighbour_arrays(graph)
    order = np.argsort(table.labels, kind="stable")
    bounds = np.searchsorted(table.labels[order], np.arange(table.sizes.size + 1))
    best, exact = 0, True
    surplus = table.surplus
    for c in np.flatnonzero(table.sizes >= min_size).tolist():
        verts = order[bounds[c] : bounds[c + 1]].tolist()
        dval, ok = diameter(graph, verts, surplus=int(surplus[c]), _adj=adj)
        exact &= ok
        best = max(best, dval)
    return best, exact


@dataclass(frozen=True, eq=False)
class ZVector:
    """Pairs ``(x_i, y_i)``: x non-increasing, ties broken by y non-increasing."""

    x: np.ndarray
    y: np.ndarray
    truncated: bool = False

    def __len__(self):
        return int(self.x.size)

    def entries(self) -> list[tuple[float, int]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    @classmethod
    def from_pairs(cls, x, y) -> "ZVector":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        order = np.lexsort((-y, -x))
        return cls(x[order], y[order])


def z_vector(records, n: int, rho: float) -> ZVector:
    """Rescaled ``(n**-rho |C|, surplus)`` pairs in U0-ordering, dropping size-0 components.

    ``records`` is a list of :class:`ComponentRecord` or a :class:`ComponentTable`.
    """
    if isinstance(records, ComponentTable):
        sizes, surplus = records.sizes, records.surplus
    else:
        sizes = np.array([r.size for r in records], dtype=np.int64)
        surplus = np.array([r.surplus for r in records], dtype=np.int64)
    keep = sizes > 0
    return ZVector.from_pairs(sizes[keep] * float(n) ** (-rho), surplus[keep])


def d_U(a: ZVector, b: ZVector) -> float:
    """``sqrt(sum (x1-x2)^2) + sum |x1 y1 - x2 y2|`` after zero padding."""
    m = max(len(a), len(b))
    xa, ya, xb, yb = (np.zeros(m) for _ in range(4))
    xa[: len(a)], ya[: len(a)] = a.x, a.y
    xb[: len(b)], yb[: len(b)] = b.x, b.y
    return float(np.sqrt(np.sum((xa - xb) ** 2)) + np.sum(np.abs(xa * ya - xb * yb)))


def rescaled_walk(trace: ExplorationTrace, n: int, rho: float, grid) -> tuple[np.ndarray, bool]:
    """``n**-rho S(floor(t n**rho))`` on ``grid``; grid points past the trace are dropped and flagged."""
    if trace.length == 0:
        raise ParameterError("empty trace")
    scale = float(n) ** rho
    idx = np.floor(np.asarray(grid, dtype=np.float64) * scale + 1e-9).astype(np.int64)
    ok = idx <= trace.length
    return trace.S[idx[ok]] / scale, bool(not ok.all())


def surplus_process(trace: ExplorationTrace, n: int = 1, rho: float = 0.0, grid=None) -> np.ndarray:
    """Surplus edges discovered up to each step, or at ``floor(u n**rho)`` for ``u`` in ``grid``."""
    N = np.cumsum(trace.surplus_flag.astype(np.int64))
    if grid is None:
        return N
    idx = np.floor(np.asarray(grid, dtype=np.float64) * float(n) ** rho + 1e-9).astype(np.int64)
    return N[np.minimum(idx, trace.length)]


def write_trace_csv(path, trace: ExplorationTrace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "S", "J", "vertex", "surplus_flag"])
        for row in zip(
            range(trace.S.size),
            trace.S.tolist(),
            trace.J.astype(int).tolist(),
            trace.vertex.tolist(),
            trace.surplus_flag.astype(int).tolist(),
        ):
            w.writerow(row)


def write_components_csv(path, records: Sequence[ComponentRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["size", "edges", "surplus", "diameter", "exact_flag", "hub_list"])
        for r in records:
            w.writerow(
                [
                    r.size,
                    r.edges,
                    r.surplus,
                    "" if r.diameter is None else r.diameter,
                    int(r.diameter_exact),
                    ";".join(str(h) for h in r.contains_hubs),
                ]
            )
