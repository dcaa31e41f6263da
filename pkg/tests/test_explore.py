import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bfs_components, brute_diameter, walk_by_definition
from sfperc.degrees import quantile_degrees
from sfperc.errors import IncompleteTraceError, ParameterError
from sfperc.explore import (
    ComponentRecord,
    ZVector,
    component_table,
    components_from_trace,
    d_U,
    diameter,
    explore,
    max_diameter,
    rescaled_walk,
    surplus_process,
    write_components_csv,
    write_trace_csv,
    z_vector,
)
from sfperc.graph import MultiGraph, configuration_model, percolate_retain
from sfperc.params import ModelParams, critical_p, criticality_parameter, exponents
from sfperc.rng import stream

even_degrees = st.lists(st.integers(min_value=0, max_value=6), min_size=1, max_size=40).filter(
    lambda d: sum(d) % 2 == 0
)


def graph_from_edges(n, edges):
    """Multigraph whose half-edges are paired along ``edges`` in order."""
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    offsets = np.concatenate([[0], np.cumsum(deg)])
    cursor = offsets[:-1].copy()
    partner = np.empty(offsets[-1], dtype=np.int64)
    for u, v in edges:
        a = cursor[u]
        cursor[u] += 1
        b = cursor[v]
        cursor[v] += 1
        partner[a], partner[b] = b, a
    return MultiGraph(offsets, partner)


def test_single_self_loop():
    tr = explore([2], stream(1))
    assert tr.S.tolist() == [0, 0, -2]
    assert tr.tau.tolist() == [2]
    (rec,) = components_from_trace(tr)
    assert (rec.size, rec.edges, rec.surplus) == (1, 1, 1)


def test_single_edge():
    tr = explore([1, 1], stream(1))
    assert tr.S.tolist() == [0, -1, -2]
    assert tr.tau.tolist() == [2]
    (rec,) = components_from_trace(tr)
    assert (rec.size, rec.edges, rec.surplus) == (2, 1, 0)


def test_degree_zero_vertices_only():
    tr = explore([0, 0], stream(1))
    assert tr.length == 0
    recs = components_from_trace(tr)
    assert [r.size for r in recs] == [0, 0]


def test_odd_total_rejected():
    with pytest.raises(ParameterError):
        explore([1, 2], stream(1))


def test_triangle_and_path():
    tri = graph_from_edges(3, [(0, 1), (1, 2), (2, 0)])
    (rec,) = components_from_trace(explore(tri, stream(2)))
    assert (rec.size, rec.edges, rec.surplus) == (3, 3, 1)
    path = graph_from_edges(3, [(0, 1), (0, 2)])
    (rec,) = components_from_trace(explore(path, stream(2)))
    assert (rec.size, rec.edges, rec.surplus) == (3, 2, 0)


def test_incomplete_trace_is_rejected():
    tr = explore([1, 1, 2], stream(3))
    cut = type(tr)(
        S=tr.S[:-1], J=tr.J[:-1], vertex=tr.vertex[:-1], surplus_flag=tr.surplus_flag[:-1],
        tau=tr.tau[:-1], graph=tr.graph, retained_degrees=tr.retained_degrees,
    )
    with pytest.raises(IncompleteTraceError):
        components_from_trace(cut)


@settings(max_examples=150, deadline=None)
@given(even_degrees, st.integers(min_value=0, max_value=2**32))
def test_walk_identity_and_oracle_components(d, seed):
    tr = explore(d, np.random.default_rng(seed))
    # increments follow the defining recursion
    assert tr.S.tolist() == walk_by_definition(tr.J.tolist(), tr.vertex.tolist(), d)
    # tau_k is the first hitting time of -2k
    for k, t in enumerate(tr.tau.tolist(), 1):
        assert tr.S[t] == -2 * k
        assert np.all(tr.S[:t] > -2 * k)
    recs = components_from_trace(tr)
    u, v = tr.graph.edges()
    oracle = {c for c in bfs_components(len(d), list(zip(u.tolist(), v.tolist()))) if any(d[x] for x in c)}
    assert {frozenset(r.vertices.tolist()) for r in recs if r.size > 0} == oracle
    assert sum(r.edges for r in recs) == sum(d) // 2
    for r in recs:
        assert r.surplus >= 0
        if r.size:
            assert r.surplus == r.edges - r.size + 1
    assert sum(r.size == 0 for r in recs) == sum(x == 0 for x in d)


@settings(max_examples=100, deadline=None)
@given(even_degrees, st.integers(min_value=0, max_value=2**32))
def test_fixed_graph_exploration_matches_component_table(d, seed):
    g = configuration_model(d, np.random.default_rng(seed))
    tr = explore(g, np.random.default_rng(seed + 1))
    assert tr.graph is g
    recs = components_from_trace(tr)
    table = component_table(g)
    got = sorted((r.size, r.edges, r.surplus) for r in recs)
    want = sorted(zip(table.sizes.tolist(), table.edges.tolist(), table.surplus.tolist()))
    assert got == want


def test_explore_realizes_uniform_matching():
    draws = 30_000
    counts = Counter()
    rng = stream(4)
    for _ in range(draws):
        counts[int(explore([2, 1, 1], rng).graph.partner[0])] += 1
    assert len(counts) == 3
    sigma = math.sqrt(draws * (1 / 3) * (2 / 3))
    assert all(abs(c - draws / 3) < 3 * sigma for c in counts.values())


def test_diameter_examples():
    edge = graph_from_edges(2, [(0, 1)])
    assert diameter(edge, [0, 1]) == (1, True)
    path = graph_from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    assert diameter(path, range(5), surplus=0) == (4, True)
    pend = [(0, 1), (1, 2), (2, 0), (2, 3)]
    g = graph_from_edges(4, pend)
    assert diameter(g, range(4), surplus=1) == (brute_diameter(4, pend, range(4)), True) == (2, True)


def test_diameter_falls_back_to_flagged_lower_bound():
    cycle = [(i, (i + 1) % 30) for i in range(30)]
    g = graph_from_edges(30, cycle)
    val, exact = diameter(g, range(30), surplus=1, exact_limit=10)
    assert not exact and val <= 15
    assert diameter(g, range(30), surplus=1) == (15, True)


@settings(max_examples=60, deadline=None)
@given(even_degrees, st.integers(min_value=0, max_value=2**32))
def test_max_diameter_matches_brute_force(d, seed):
    g = configuration_model(d, np.random.default_rng(seed))
    u, v = g.edges()
    edges = list(zip(u.tolist(), v.tolist()))
    want = max(
        (brute_diameter(len(d), edges, sorted(c)) for c in bfs_components(len(d), edges) if len(c) > 1),
        default=0,
    )
    assert max_diameter(g) == (want, True)


def test_z_vector_examples():
    recs = [ComponentRecord(5, 4, 0), ComponentRecord(5, 6, 2), ComponentRecord(3, 3, 1), ComponentRecord(0, 0, 0)]
    z = z_vector(recs, 1000, 1 / 3)
    assert [(round(x, 12), y) for x, y in z.entries()] == [(0.5, 2), (0.5, 0), (0.3, 1)]
    assert len(z_vector([], 10, 0.5)) == 0
    assert z_vector([ComponentRecord(3, 3, 1)], 27, 1 / 3).entries() == [(pytest.approx(1.0), 1)]


def test_d_U_examples():
    a = ZVector.from_pairs([0.5, 0.3], [2, 0])
    b = ZVector.from_pairs([0.4], [1])
    assert d_U(a, a) == 0
    assert d_U(ZVector.from_pairs([1], [1]), ZVector.from_pairs([0], [0])) == 2
    assert d_U(a, b) == pytest.approx(math.sqrt(0.1) + 0.6)
    assert round(d_U(a, b), 4) == 0.9162


@settings(max_examples=100)
@given(
    st.lists(st.tuples(st.floats(0, 10), st.integers(0, 5)), max_size=8),
    st.lists(st.tuples(st.floats(0, 10), st.integers(0, 5)), max_size=8),
)
def test_d_U_symmetric_and_nonnegative(pa, pb):
    a = ZVector.from_pairs([p[0] for p in pa], [p[1] for p in pa])
    b = ZVector.from_pairs([p[0] for p in pb], [p[1] for p in pb])
    assert d_U(a, b) == pytest.approx(d_U(b, a))
    assert d_U(a, b) >= 0
    assert np.all(np.diff(a.x) <= 0)
    ties = np.flatnonzero(np.diff(a.x) == 0)
    assert np.all(a.y[ties] >= a.y[ties + 1])


def test_rescaled_walk():
    tr = explore([1, 1], stream(1))
    vals, trunc = rescaled_walk(tr, 1, 0.0, [0, 1, 2])
    assert vals.tolist() == [0, -1, -2] and not trunc
    vals, trunc = rescaled_walk(tr, 1, 0.0, [0, 1, 2, 3])
    assert vals.size == 3 and trunc
    tr = explore([3, 3, 2, 2, 1, 1], stream(5))
    vals, _ = rescaled_walk(tr, 16, 0.5, [1.0, 1.1, 1.2])
    assert vals[0] == vals[1] == vals[2] == tr.S[4] / 4
    with pytest.raises(ParameterError):
        rescaled_walk(explore([0], stream(1)), 1, 0.0, [0])


def test_surplus_process():
    tree = graph_from_edges(4, [(0, 1), (1, 2), (1, 3)])
    assert not surplus_process(explore(tree, stream(1))).any()
    tri = graph_from_edges(3, [(0, 1), (1, 2), (2, 0)])
    tr = explore(tri, stream(1))
    N = surplus_process(tr)
    assert N[-1] == 1
    (jump,) = np.flatnonzero(np.diff(N)) + 1
    assert tr.surplus_flag[jump] and not tr.J[jump]


@settings(max_examples=100, deadline=None)
@given(even_degrees, st.integers(min_value=0, max_value=2**32))
def test_surplus_process_final_value(d, seed):
    tr = explore(d, np.random.default_rng(seed))
    N = surplus_process(tr)
    assert np.all(np.diff(N) >= 0)
    assert N[-1] == sum(r.surplus for r in components_from_trace(tr) if r.size)


def test_csv_exports(tmp_path):
    tr = explore([2, 1, 1, 0], stream(6))
    write_trace_csv(tmp_path / "t.csv", tr)
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "step,S,J,vertex,surplus_flag" and len(lines) == tr.length + 2
    recs = components_from_trace(tr, with_diameter=True)
    write_components_csv(tmp_path / "c.csv", recs)
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "size,edges,surplus,diameter,exact_flag,hub_list"
    assert len(lines) == len(recs) + 1


@pytest.mark.slow
def test_discovery_drift_at_criticality():
    n = 10**6
    d = quantile_degrees(ModelParams(tau=2.5, n=n))
    p = critical_p(1.0, criticality_parameter(d.d))
    scale = float(n) ** exponents(2.5).rho
    step = int(math.floor(scale + 1e-9))
    ok = []
    for r in range(100):
        tr = explore(percolate_retain(d, p, stream(12, r, 1)), stream(12, r, 2))
        ok.append(abs(int(tr.discovered_count(step)) - scale) / scale < 0.1)
    assert np.mean(ok) >= 0.9
