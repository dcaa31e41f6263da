"""The limiting exploration process and its excursions.

``S(t) = c * sum_i theta_i 1{xi_i <= t} - t`` with ``c = lam*mu/||theta||^2``
and independent clocks ``xi_i ~ Exp(theta_i/mu)``. Between clock rings the
path is affine with slope ``-1``, so running minima, excursion endpoints and
excursion areas are all computed in closed form from the jump list.

Only clocks ringing before the horizon ``T`` matter. The first
``EXACT_CLOCKS`` clocks are drawn directly; for the rest, the set of
indices that ring before ``T`` is drawn by blockwise thinning (each clock
rings independently with probability ``1 - exp(-theta_i T/mu)``) and the
ring time is then drawn from the truncated exponential.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .degrees import ThetaSequence
from .errors import ParameterError, TruncationError
from .explore import ZVector

__all__ = [
    "LimitPath",
    "Excursion",
    "ExcursionTable",
    "DensityDiagnostic",
    "simulate_limit_path",
    "reflect",
    "excursion_table",
    "excursions",
    "excursion_area",
    "mark_surplus",
    "mark_positions",
    "z_limit",
    "expected_jump_mass",
    "density_condition_diagnostic",
    "write_path_csv",
    "write_excursions_csv",
]

EXACT_CLOCKS = 1 << 14
TAIL_THRESHOLD = 1e-3


@dataclass(frozen=True, eq=False)
class LimitPath:
    """Jump times/sizes of one sample path on ``[0, T]`` with drift ``-slope``."""

    times: np.ndarray
    jumps: np.ndarray
    T: float
    slope: float
    K: int
    tail_sq: float
    scale: float
    lam: float
    mu: float
    l2_norm_sq: float

    def value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        csum = np.concatenate([[0.0], np.cumsum(self.jumps)])
        return csum[np.searchsorted(self.times, t, side="right")] - self.slope * t

    def total_variation(self) -> float:
        return float(self.jumps.sum() + self.slope * self.T)

    @property
    def mark_rate(self) -> float:
        """Surplus-mark intensity per unit area under the reflected path."""
        return self.l2_norm_sq / (self.lam * self.mu**2)


def _sample_ringing(theta: ThetaSequence, mu: float, T: float, rng: np.random.Generator):
    """Indices (1-based) of clocks ringing before ``T`` and their ring times."""
    K = theta.K
    k0 = min(K, EXACT_CLOCKS)
    idx0 = np.arange(1, k0 + 1)
    xi = rng.exponential(mu / theta.values(idx0))
    hit = xi <= T
    idx_parts = [idx0[hit]]
    time_parts = [xi[hit]]
    a = k0 + 1
    while a <= K:
        b = min(2 * a, K + 1)
        # ringing probability is decreasing in i: thin from the block maximum
        q_max = -math.expm1(-theta.values(a) * T / mu)
        m = rng.binomial(b - a, q_max)
        if m:
            cand = a + rng.choice(b - a, size=m, replace=False)
            q = -np.expm1(-theta.values(cand) * T / mu)
            keep = rng.random(m) * q_max < q
            cand, q = cand[keep], q[keep]
            u = rng.random(cand.size)
            idx_parts.append(cand)
            time_parts.append(-(mu / theta.values(cand)) * np.log1p(-u * q))
        a = b
    idx = np.concatenate(idx_parts)
    times = np.concatenate(time_parts)
    return idx, times


def simulate_limit_path(
    theta: ThetaSequence,
    lam: float,
    mu: float,
    T: float,
    rng: np.random.Generator,
    *,
    compensate: bool = False,
    max_tail: float = TAIL_THRESHOLD,
) -> LimitPath:
    """Sample ``S`` on ``[0, T]`` using clocks ``1..theta.K``.

    ``compensate=True`` replaces the neglected clocks by their mean linear
    drift ``(lam/||theta||^2) * sum_{i>K} theta_i^2`` per unit time.

    Raises
    ------
    TruncationError
        If ``sum_{i>K} theta_i^2 / ||theta||^2 >= max_tail``.
    """
    if not (lam > 0 and mu > 0 and T > 0):
        raise ParameterError("lam, mu and T must be positive")
    norm = theta.l2_norm_sq
    tail = theta.tail_sq
    if tail / norm >= max_tail:
        raise TruncationError(
            f"tail mass {tail / norm:.3g} >= {max_tail:g}; use K >= {theta.K_for_tail(max_tail)}"
        )
    scale = lam * mu / norm
    idx, times = _sample_ringing(theta, mu, T, rng)
    order = np.argsort(times, kind="stable")
    times = times[order]
    jumps = scale * theta.values(idx[order])
    slope = 1.0 - (lam / norm) * tail if compensate else 1.0
    return LimitPath(times, jumps, float(T), slope, theta.K, tail, scale, lam, mu, norm)


def reflect(path: LimitPath):
    """Evaluator ``t -> S(t) - min_{u <= t} S(u)`` (exact)."""
    pre = np.concatenate([[0.0], np.cumsum(path.jumps)])[:-1] - path.slope * path.times
    runmin = np.minimum.accumulate(np.minimum(pre, 0.0)) if pre.size else pre

    def refl(t):
        t = np.asarray(t, dtype=np.float64)
        j = np.searchsorted(path.times, t, side="right")
        past = np.where(j > 0, runmin[np.maximum(j - 1, 0)] if runmin.size else 0.0, 0.0)
        val = path.value(t)
        return val - np.minimum(np.minimum(past, 0.0), val)

    return refl


@dataclass(frozen=True, eq=False)
class ExcursionTable:
    """Excursions in time order. ``first_jump[k]`` indexes ``path.times``."""

    l: np.ndarray
    r: np.ndarray
    area: np.ndarray
    open: np.ndarray
    first_jump: np.ndarray
    marks: Optional[np.ndarray] = None

    @property
    def length(self) -> np.ndarray:
        return self.r - self.l

    def __len__(self):
        return int(self.l.size)

    def ranked(self) -> np.ndarray:
        """Indices by length descending, earlier start first on ties."""
        return np.lexsort((self.l, -self.length))


def excursion_table(path: LimitPath) -> ExcursionTable:
    """Decompose the path into excursions above its running minimum.

    An excursion starts at a jump that happens while the path sits at its
    running minimum and ends where the affine segment returns to that level:
    ``r = l + (jump mass accumulated in the excursion) / slope``.
    Open excursions (``r > T``) carry the partial area up to ``T``.
    """
    t, h, s = path.times, path.jumps, path.slope
    if t.size == 0:
        e = np.empty(0)
        return ExcursionTable(e, e, e, np.empty(0, bool), np.empty(0, np.int64))
    csum = np.cumsum(h)
    cprev = csum - h
    pre = cprev - s * t
    prev_min = np.minimum.accumulate(np.concatenate([[0.0], pre[:-1]]))
    prev_min = np.minimum(prev_min, 0.0)
    start = pre <= prev_min
    starts = np.flatnonzero(start)
    grp = np.cumsum(start) - 1
    mass_end = np.append(cprev[starts[1:]], csum[-1])
    l = t[starts]
    r = l + (mass_end - cprev[starts]) / s
    is_open = r > path.T
    r_eff = np.minimum(r, path.T)
    area = np.bincount(grp, weights=h * (r_eff[grp] - t), minlength=starts.size)
    area -= 0.5 * s * (r_eff - l) ** 2
    return ExcursionTable(l=l, r=r, area=area, open=is_open, first_jump=starts)


@dataclass
class Excursion:
    l: float
    r: float
    length: float
    area: float
    marks: Optional[int] = None
    open: bool = False


def excursions(path: LimitPath) -> list[Excursion]:
    """Excursions sorted by length (descending, earlier start on ties)."""
    tab = excursion_table(path)
    out = []
    for k in tab.ranked().tolist():
        out.append(
            Excursion(
                l=float(tab.l[k]),
                r=float(tab.r[k]),
                length=float(tab.r[k] - tab.l[k]),
                area=float(tab.area[k]),
                marks=None if tab.marks is None else int(tab.marks[k]),
                open=bool(tab.open[k]),
            )
        )
    return out


def excursion_area(exc: Excursion, path: LimitPath) -> tuple[float, bool]:
    """Trapezoid sum of the reflected path over ``exc``; the flag is True when only a partial area is available."""
    t, h, s = path.times, path.jumps, path.slope
    end = min(exc.r, path.T)
    lo = np.searchsorted(t, exc.l, side="left")
    hi = np.searchsorted(t, end, side="left")
    heights_t = np.append(t[lo:hi], end)
    area = 0.0
    y = 0.0
    for k in range(lo, hi):
        y += h[k]
        dt = heights_t[k - lo + 1] - t[k]
        area += y * dt - 0.5 * s * dt * dt
        y -= s * dt
    return float(area), bool(exc.r > path.T)


def mark_surplus(table: ExcursionTable, rate: float, rng: np.random.Generator) -> ExcursionTable:
    """Attach ``N_k ~ Poisson(rate * area_k)`` to each excursion.

    ``rate`` is ``||theta||^2 / (lam mu^2)`` (see :attr:`LimitPath.mark_rate`).
    """
    marks = rng.poisson(rate * np.maximum(table.area, 0.0))
    return ExcursionTable(table.l, table.r, table.area, table.open, table.first_jump, marks)


def mark_positions(path: LimitPath, table: ExcursionTable, k: int, rng: np.random.Generator) -> np.ndarray:
    """Times of the marks in excursion ``k``: i.i.d. with density proportional to the reflected path.

    Uses inversion of the piecewise-quadratic cumulative area.
    """
    if table.marks is None:
        raise ParameterError("excursions are not marked yet")
    m = int(table.marks[k])
    if m == 0:
        return np.empty(0)
    s = path.slope
    lo = table.first_jump[k]
    end = min(table.r[k], path.T)
    hi = np.searchsorted(path.times, end, side="left")
    seg_t = path.times[lo:hi]
    seg_end = np.append(seg_t[1:], end)
    heights = np.empty(seg_t.size)
    y = 0.0
    for j in range(seg_t.size):
        y += path.jumps[lo + j]
        heights[j] = y
        y -= s * (seg_end[j] - seg_t[j])
    dt = seg_end - seg_t
    seg_area = heights * dt - 0.5 * s * dt**2
    cum = np.concatenate([[0.0], np.cumsum(seg_area)])
    target = rng.random(m) * cum[-1]
    j = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, seg_t.size - 1)
    rem = target - cum[j]
    y0 = heights[j]
    x = (y0 - np.sqrt(np.maximum(y0**2 - 2.0 * s * rem, 0.0))) / s
    return np.sort(seg_t[j] + x)


def z_limit(table: ExcursionTable, m: int) -> ZVector:
    """Top-``m`` closed excursions as ``(length, marks)`` pairs in U0-ordering.

    ``ZVector.truncated`` is set when fewer than ``m`` closed excursions
    exist or when the open excursion could outrank a returned one.
    """
    if table.marks is None:
        raise ParameterError("excursions are not marked yet")
    closed = ~table.open
    length = table.length[closed]
    marks = table.marks[closed]
    order = np.lexsort((table.l[closed], -marks, -length))[:m]
    truncated = order.size < m
    if table.open.any() and order.size:
        # an open excursion is at least as long as its part inside the horizon
        truncated |= bool(np.max(table.length[table.open]) > length[order][-1])
    return ZVector(length[order], marks[order].astype(np.int64), truncated=bool(truncated))


def _series(f, K: int, direct: int = 1 << 20) -> float:
    """``sum_{i=1}^K f(i)``: direct up to ``direct``, midpoint-integral tail beyond."""
    m = min(K, direct)
    i = np.arange(1, m + 1, dtype=np.float64)
    total = float(np.sum(f(i)))
    if K > m:
        tail, _ = integrate.quad(lambda x: float(f(np.array([x]))[0]), m + 0.5, K + 0.5, limit=200)
        total += tail
    return total


def expected_jump_mass(theta: ThetaSequence, lam: float, mu: float, t: float) -> float:
    """``E[S(t)] + t = (lam mu/||theta||^2) sum_{i<=K} theta_i (1 - exp(-theta_i t/mu))``."""
    scale = lam * mu / theta.l2_norm_sq

    def f(i):
        th = theta.values(i)
        return th * -np.expm1(-th * t / mu)

    return scale * _series(f, theta.K)


@dataclass
class DensityDiagnostic:
    integral: float
    tail_value: float
    converged: bool
    v: np.ndarray
    integrand: np.ndarray


def density_condition_diagnostic(
    theta: ThetaSequence, t: float, V_max: float, *, v_min: float = 1e-3, num: int = 4000, tol: float = 1e-6
) -> DensityDiagnostic:
    """Quadrature of ``exp(-t v^2 M_t(v))`` on a log grid of ``[v_min, V_max]``.

    ``M_t(v)`` sums ``theta_j^3`` over ``j`` with ``v theta_j <= 1`` and
    ``t theta_j <= 1``, taken over the full infinite sequence. The integrand
    value at ``V_max`` serves as convergence indicator.
    """
    if not t > 0:
        raise ParameterError("t must be positive")
    v = np.geomspace(v_min, V_max, num)
    bound = np.maximum(v, t)
    # theta_j <= 1/bound  <=>  j >= (scale*bound)^(1/alpha)
    j0 = np.maximum(1.0, np.ceil((theta.scale * bound) ** (1.0 / theta.alpha) - 1e-12))
    M = np.array([theta.power_sum(3.0, j) for j in j0])
    g = np.exp(-t * v**2 * M)
    integral = float(integrate.trapezoid(g * v, np.log(v)))
    return DensityDiagnostic(integral, float(g[-1]), bool(g[-1] < tol), v, g)


def write_path_csv(path_file, path: LimitPath) -> None:
    with open(path_file, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["jump_time", "jump_size"])
        for row in zip(path.times.tolist(), path.jumps.tolist()):
            w.writerow([repr(x) for x in row])


def write_excursions_csv(path_file, table: ExcursionTable) -> None:
    with open(path_file, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["l", "r", "length", "area", "marks", "open_flag"])
        marks = table.marks if table.marks is not None else [""] * len(table)
        for k in range(len(table)):
            w.writerow(
                [repr(float(table.l[k])), repr(float(table.r[k])), repr(float(table.r[k] - table.l[k])),
                 repr(float(table.area[k])), marks[k], int(table.open[k])]
            )
