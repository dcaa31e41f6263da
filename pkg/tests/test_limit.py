import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import grid_area, sequential_excursions
from sfperc.degrees import ThetaSequence, theta_limits
from sfperc.errors import ParameterError, TruncationError
from sfperc.limit import (
    ExcursionTable,
    LimitPath,
    density_condition_diagnostic,
    excursion_area,
    excursion_table,
    excursions,
    expected_jump_mass,
    mark_positions,
    mark_surplus,
    reflect,
    simulate_limit_path,
    write_excursions_csv,
    write_path_csv,
    z_limit,
)
from sfperc.params import ModelParams
from sfperc.rng import stream


def make_path(times, jumps, T=10.0, slope=1.0):
    times = np.asarray(times, dtype=float)
    order = np.argsort(times, kind="stable")
    return LimitPath(times[order], np.asarray(jumps, dtype=float)[order], T, slope, 1, 0.0, 1.0, 1.0, 1.0, 1.0)


jump_lists = st.lists(
    st.tuples(st.floats(1e-6, 9.0, allow_nan=False), st.floats(0.01, 3.0, allow_nan=False)), max_size=12
)


def test_pure_drift():
    path = make_path([], [])
    assert path.value([0.0, 2.5, 10.0]).tolist() == [0.0, -2.5, -10.0]
    assert excursions(path) == []
    assert not np.any(reflect(path)(np.linspace(0, 10, 11)))


def test_single_jump_value_and_reflection():
    path = make_path([1.0], [3.0])
    assert path.value(1.5) == pytest.approx(3.0 - 1.5)
    refl = reflect(path)
    assert refl(1.0) == pytest.approx(3.0)
    assert refl(0.5) == 0.0


def test_single_jump_excursion():
    (exc,) = excursions(make_path([1.0], [2.0]))
    assert (exc.l, exc.r, exc.length, exc.area, exc.open) == (1.0, 3.0, 2.0, 2.0, False)


@pytest.mark.parametrize("h", [0.5, 1.0, 2.5])
def test_triangle_area(h):
    (exc,) = excursions(make_path([1.0], [h]))
    assert exc.length == pytest.approx(h)
    assert exc.area == pytest.approx(h**2 / 2)


def test_stacked_jumps():
    path = make_path([1.0, 1.5], [1.0, 1.0])
    (exc,) = excursions(path)
    # height 1 leaves 0.5 at t=1.5, the second jump lifts it to 1.5, which drains by t=3
    assert (exc.l, exc.r, exc.length) == (1.0, 3.0, 2.0)
    assert exc.area == pytest.approx(0.375 + 1.125)
    assert exc.area == pytest.approx(grid_area(path.value, exc.l, exc.r), abs=1e-4)
    assert excursion_area(exc, path) == (pytest.approx(exc.area), False)


def test_open_excursion_partial_area():
    path = make_path([9.0], [2.0], T=10.0)
    (exc,) = excursions(path)
    assert exc.open and exc.r == 11.0
    area, partial = excursion_area(exc, path)
    assert partial and area == pytest.approx(2.0 - 0.5)
    assert exc.area == pytest.approx(area)


@settings(max_examples=200, deadline=None)
@given(jump_lists)
def test_excursions_match_sequential_scan(jumps):
    path = make_path([j[0] for j in jumps], [j[1] for j in jumps])
    want = sequential_excursions(path.times.tolist(), path.jumps.tolist(), 1.0, path.T)
    # a jump exactly at a closing time is a null event where both readings agree on the path
    assume(all(np.min(np.abs(path.times - r)) > 1e-9 for _, r, _ in want))
    tab = excursion_table(path)
    assert len(tab) == len(want)
    for k, (l, r, is_open) in enumerate(want):
        assert tab.l[k] == pytest.approx(l)
        assert tab.r[k] == pytest.approx(r)
        assert bool(tab.open[k]) == is_open
    assert np.all(tab.length > 0) and np.all(tab.area > 0)
    refl = reflect(path)
    grid = np.linspace(0, path.T, 501)
    assert np.all(refl(grid) >= -1e-12)
    closed = ~tab.open
    assert np.allclose(refl(tab.r[closed]), 0.0, atol=1e-9)
    assert np.all(np.diff(tab.l) > 0)
    assert np.all(tab.r[:-1] <= tab.l[1:] + 1e-12)


@settings(max_examples=25, deadline=None)
@given(jump_lists)
def test_areas_match_grid_integration(jumps):
    path = make_path([j[0] for j in jumps], [j[1] for j in jumps], T=40.0)
    for exc in excursions(path):
        assert exc.area == pytest.approx(grid_area(path.value, exc.l, exc.r), rel=1e-4, abs=1e-6)
        assert excursion_area(exc, path)[0] == pytest.approx(exc.area)


def test_area_additive_over_split():
    path = make_path([1.0, 1.5], [1.0, 1.0])
    (exc,) = excursions(path)
    refl = reflect(path)
    parts = [np.linspace(exc.l, 2.0, 100_001), np.linspace(2.0, 2.5, 100_001), np.linspace(2.5, exc.r, 100_001)]
    total = sum(float(np.trapezoid(refl(g), g)) for g in parts)
    assert total == pytest.approx(exc.area, abs=1e-4)


def test_ties_broken_by_earlier_start():
    path = make_path([1.0, 5.0], [2.0, 2.0])
    ex = excursions(path)
    assert [e.l for e in ex] == [1.0, 5.0]


@settings(max_examples=50, deadline=None)
@given(jump_lists)
def test_total_variation_identity(jumps):
    assume(len({j[0] for j in jumps}) == len(jumps))
    path = make_path([j[0] for j in jumps], [j[1] for j in jumps])
    knots = np.concatenate([[0.0], path.times, [path.T]])
    left = path.value(knots[1:]) - np.concatenate([path.jumps, [0.0]])
    right = path.value(knots[:-1])
    tv = np.sum(np.abs(left - right)) + path.jumps.sum()
    assert tv == pytest.approx(path.total_variation(), rel=1e-12)


def test_truncation_error_suggests_K():
    theta = theta_limits(ModelParams(tau=2.5), 100)
    with pytest.raises(TruncationError, match="K >="):
        simulate_limit_path(theta, 1.0, 3.6, 30.0, stream(1))
    with pytest.raises(ParameterError):
        simulate_limit_path(theta, -1.0, 3.6, 30.0, stream(1), max_tail=1.0)


def test_quiet_clocks_give_pure_drift():
    theta = ThetaSequence(scale=1.0, alpha=2 / 3, K=10)
    path = simulate_limit_path(theta, 1.0, 1e15, 5.0, stream(2), max_tail=1.0)
    assert path.times.size == 0
    assert path.value(5.0) == -5.0


def test_compensated_drift():
    theta = ThetaSequence(scale=1.0, alpha=2 / 3, K=100)
    path = simulate_limit_path(theta, 1.0, 3.6, 5.0, stream(2), max_tail=1.0, compensate=True)
    assert path.slope == pytest.approx(1.0 - theta.tail_sq / theta.l2_norm_sq)


def test_ringing_counts_match_probabilities():
    # exercises the thinned sampler beyond the directly drawn clocks
    theta = ThetaSequence(scale=1.0, alpha=2 / 3, K=200_000)
    mu, T = 3.6, 5.0
    i = np.arange(1, theta.K + 1)
    q = -np.expm1(-theta.values(i) * T / mu)
    counts = np.array(
        [simulate_limit_path(theta, 1.0, mu, T, stream(3, r), max_tail=1.0).times.size for r in range(400)]
    )
    assert abs(counts.mean() - q.sum()) < 3 * math.sqrt(np.sum(q * (1 - q)) / counts.size)
    tail = np.array(
        [np.sum(simulate_limit_path(theta, 1.0, mu, T, stream(3, r), max_tail=1.0).jumps
                < theta.values(1 << 14) * 1.0 * mu / theta.l2_norm_sq) for r in range(400)]
    )
    q_tail = q[1 << 14:]
    assert abs(tail.mean() - q_tail.sum()) < 3 * math.sqrt(np.sum(q_tail * (1 - q_tail)) / tail.size)


def test_expected_jump_mass_matches_direct_sum():
    theta = ThetaSequence(scale=1.0, alpha=2 / 3, K=5000)
    mu = 3.6
    th = theta.theta
    direct = (mu / theta.l2_norm_sq) * math.fsum((th * -np.expm1(-th / mu)).tolist())
    assert expected_jump_mass(theta, 1.0, mu, 1.0) == pytest.approx(direct, rel=1e-12)
    big = theta.with_K(3_000_000)
    i = np.arange(1, big.K + 1, dtype=np.float64)
    th = big.values(i)
    direct = (mu / big.l2_norm_sq) * float(np.sum(th * -np.expm1(-th / mu)))
    assert expected_jump_mass(big, 1.0, mu, 1.0) == pytest.approx(direct, rel=1e-6)


def test_mean_path_value_matches_expectation():
    theta = ThetaSequence(scale=1.0, alpha=2 / 3, K=3000)
    mu = 3.6
    vals = np.array(
        [float(simulate_limit_path(theta, 1.0, mu, 2.0, stream(4, r), max_tail=1.0).value(1.0)) + 1.0
         for r in range(4000)]
    )
    target = expected_jump_mass(theta, 1.0, mu, 1.0)
    assert abs(vals.mean() - target) < 3 * vals.std(ddof=1) / math.sqrt(vals.size)


def _table(area, l=None):
    area = np.asarray(area, dtype=float)
    l = np.arange(area.size, dtype=float) if l is None else np.asarray(l, dtype=float)
    return ExcursionTable(l, l + 1.0, area, np.zeros(area.size, bool), np.arange(area.size))


def test_marks_poisson_mean():
    tab = mark_surplus(_table(np.full(100_000, 2.0)), 1.0, stream(5))
    assert abs(tab.marks.mean() - 2.0) < 0.015
    assert not mark_surplus(_table(np.zeros(1000)), 5.0, stream(5)).marks.any()


def test_mark_positions_inside_excursion():
    path = make_path([1.0, 1.5], [1.0, 1.0])
    tab = excursion_table(path)
    tab = ExcursionTable(tab.l, tab.r, tab.area, tab.open, tab.first_jump, np.array([2000]))
    pos = mark_positions(path, tab, 0, stream(6))
    assert pos.size == 2000 and pos.min() >= 1.0 and pos.max() <= 3.0
    # density is proportional to the reflected path: mass on [1, 1.5] is 0.375 of 1.5
    frac = np.mean(pos < 1.5)
    assert abs(frac - 0.25) < 3 * math.sqrt(0.25 * 0.75 / pos.size)
    with pytest.raises(ParameterError):
        mark_positions(path, excursion_table(path), 0, stream(6))


def test_z_limit_ordering():
    tab = ExcursionTable(np.array([0.0]), np.array([2.0]), np.array([2.0]), np.array([False]),
                         np.array([0]), np.array([1]))
    z = z_limit(tab, 1)
    assert z.entries() == [(2.0, 1)] and not z.truncated
    tab = ExcursionTable(np.array([0.0, 3.0, 6.0]), np.array([1.0, 4.0, 8.0]), np.ones(3),
                         np.zeros(3, bool), np.arange(3), np.array([0, 4, 1]))
    assert z_limit(tab, 3).entries() == [(2.0, 1), (1.0, 4), (1.0, 0)]
    assert z_limit(tab, 5).truncated


def test_density_condition():
    th = theta_limits(ModelParams(tau=2.5), 1)
    ok = density_condition_diagnostic(th, 1.0, 1e3)
    assert ok.converged and ok.tail_value < 1e-6 and np.isfinite(ok.integral)
    bad = density_condition_diagnostic(ThetaSequence(scale=1.0, alpha=1.0, K=1), 1.0, 1e3)
    assert not bad.converged and bad.tail_value > 0.1
    with pytest.raises(ParameterError):
        density_condition_diagnostic(th, 0.0, 1e3)


@settings(max_examples=50)
@given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 10), st.floats(0.01, 10))
def test_M_non_increasing(v1, v2, t1, t2):
    th = ThetaSequence(scale=1.0, alpha=2 / 3, K=1)

    def M(v, t):
        j0 = max(1.0, math.ceil((th.scale * max(v, t)) ** (1 / th.alpha) - 1e-12))
        return th.power_sum(3.0, j0)

    assert M(max(v1, v2), t1) <= M(min(v1, v2), t1)
    assert M(v1, max(t1, t2)) <= M(v1, min(t1, t2))


def test_csv_exports(tmp_path):
    path = make_path([1.0, 1.5, 6.0], [1.0, 1.0, 0.5])
    write_path_csv(tmp_path / "p.csv", path)
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "jump_time,jump_size"
    tab = mark_surplus(excursion_table(path), 1.0, stream(7))
    write_excursions_csv(tmp_path / "e.csv", tab)
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "l,r,length,area,marks,open_flag" and len(lines) == 3
