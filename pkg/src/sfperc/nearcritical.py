"""Predictions away from the critical window.

Below the window (``n**-alpha << p << p_c``) the largest components are the
neighbourhoods of the hubs, ``|C_(i)| ~ theta_i n**alpha p``. Above it
(``p_c << p << 1``) a single giant of size ``mu kappa**(1/(3-tau)) n
p**(1/(3-tau))`` appears, where ``kappa`` is the constant in the small-``t``
expansion of the size-biased degree Laplace transform.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .degrees import DegreeSequence, ThetaSequence
from .errors import NumericalError, ParameterError
from .explore import component_table
from .graph import PercolationOutcome
from .params import exponents

__all__ = [
    "Regime",
    "RegimePrediction",
    "kappa",
    "kappa_closed_form",
    "laplace_check",
    "subcritical_prediction",
    "supercritical_prediction",
    "supercritical_fixed_point",
    "hub_edge_count",
    "hub_edge_statistics",
]


class Regime(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"


@dataclass(frozen=True)
class RegimePrediction:
    """Labelled predicted values for one regime at percolation probability ``p_n``.

    ``in_regime`` records whether ``p_n`` is on the correct side of ``p_c``
    (and, below the window, above ``n**-alpha``); it is ``None`` when
    ``p_c`` is unknown.
    """

    regime: Regime
    p_n: float
    values: tuple
    p_c: Optional[float] = None
    lower: Optional[float] = None
    in_regime: Optional[bool] = field(default=None, init=False)

    def __post_init__(self):
        ok = None
        if self.p_c is not None:
            if self.regime is Regime.SUBCRITICAL:
                ok = self.p_n < self.p_c and (self.lower is None or self.p_n > self.lower)
            elif self.regime is Regime.SUPERCRITICAL:
                ok = self.p_c < self.p_n < 1.0
            else:
                ok = True
        object.__setattr__(self, "in_regime", ok)

    def get(self, label: str) -> float:
        for key, val in self.values:
            if key == label:
                return val
        raise KeyError(label)

    def as_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "p_n": self.p_n,
            "p_c": self.p_c,
            "in_regime": self.in_regime,
            **{k: v for k, v in self.values},
        }


def _check_tau(tau: float) -> None:
    if not 2.0 < tau < 3.0:
        raise ParameterError(f"tau must lie in (2, 3), got {tau!r}")


def kappa_closed_form(c_F: float, tau: float) -> float:
    """``-c_F**(tau-1) (tau-1) Gamma(2-tau)``."""
    _check_tau(tau)
    return float(-(c_F ** (tau - 1.0)) * (tau - 1.0) * special.gamma(2.0 - tau))


def kappa(c_F: float, tau: float, *, rtol: float = 1e-8) -> float:
    """``int_0^inf c_F z**-alpha (1 - exp(-c_F z**-alpha)) dz`` by quadrature.

    With ``u = c_F z**-alpha`` the integral becomes
    ``(tau-1) c_F**(tau-1) int_0^inf u**(1-tau) (1 - e**-u) du``. On ``[0, 1]``
    the integrand is ``u**(2-tau)`` times the smooth ``(1-e**-u)/u``
    (algebraic-weight quadrature); on ``[1, inf)`` the non-decaying part
    ``u**(1-tau)`` integrates to ``1/(tau-2)`` and the rest decays like ``e**-u``.
    """
    _check_tau(tau)
    if not c_F > 0:
        raise ParameterError("c_F must be positive")
    head, err_h = integrate.quad(
        lambda u: -math.expm1(-u) / u if u > 0 else 1.0,
        0.0, 1.0, weight="alg", wvar=(2.0 - tau, 0.0), epsabs=0.0, epsrel=1e-13,
    )
    decay, err_d = integrate.quad(
        lambda u: u ** (1.0 - tau) * math.exp(-u), 1.0, np.inf, epsabs=0.0, epsrel=1e-13
    )
    inner = head + 1.0 / (tau - 2.0) - decay
    if (err_h + err_d) > rtol * abs(inner):
        raise NumericalError(f"kappa quadrature did not reach rtol={rtol:g}")
    return float((tau - 1.0) * c_F ** (tau - 1.0) * inner)


def laplace_check(degrees, p_n: float, t: float, tau: Optional[float] = None) -> float:
    """``(1/ell_n) sum_k d_k (1 - exp(-t_n d_k)) / p_n**((tau-2)/(3-tau))``, ``t_n = t p_n**(1/(3-tau))``.

    The numerator is ``1 - E[exp(-t_n D*)]`` for the size-biased degree ``D*``.
    """
    tau = tau if tau is not None else getattr(degrees, "tau", None)
    if tau is None:
        raise ParameterError("tau is required")
    _check_tau(tau)
    if not 0.0 < p_n < 1.0:
        raise ParameterError("p_n must lie in (0, 1)")
    if t < 0:
        raise ParameterError("t must be non-negative")
    d = np.asarray(getattr(degrees, "d", degrees), dtype=np.int64)
    vals, counts = np.unique(d, return_counts=True)
    w = vals.astype(np.float64) * counts
    t_n = t * p_n ** (1.0 / (3.0 - tau))
    num = float(np.sum(w * -np.expm1(-t_n * vals))) / float(w.sum())
    return num / p_n ** ((tau - 2.0) / (3.0 - tau))


def _warn(msg: str) -> None:
    warnings.warn(msg, RuntimeWarning, stacklevel=3)


def subcritical_prediction(
    theta: ThetaSequence,
    n: int,
    p_n: float,
    alpha: Optional[float] = None,
    *,
    p_c: Optional[float] = None,
    m: int = 10,
) -> RegimePrediction:
    """``|C_(i)| ~ theta_i n**alpha p_n`` for ``i <= m``, all with surplus zero."""
    alpha = theta.alpha if alpha is None else alpha
    lower = float(n) ** (-alpha)
    if p_n <= lower:
        _warn(f"p_n = {p_n:.3g} is not above n^-alpha = {lower:.3g}")
    if p_c is not None and p_n >= p_c:
        _warn(f"p_n = {p_n:.3g} is not below p_c = {p_c:.3g}")
    scale = float(n) ** alpha * p_n
    th = theta.values(np.arange(1, m + 1))
    values = [(f"C{i + 1}", float(scale * th[i])) for i in range(m)]
    values += [(f"surplus{i + 1}", 0.0) for i in range(m)]
    return RegimePrediction(Regime.SUBCRITICAL, float(p_n), tuple(values), p_c=p_c, lower=lower)


def supercritical_prediction(
    mu: float, kappa: float, tau: float, n: int, p_n: float, *, p_c: Optional[float] = None
) -> RegimePrediction:
    """``|C_(1)| ~ E(C_(1)) ~ mu kappa**(1/(3-tau)) n p_n**(1/(3-tau))``; ``|C_(2)|`` is of smaller order.

    ``C1_laplace`` is the same law with ``kappa`` replaced by ``kappa/mu``,
    the constant that the size-biased transform actually carries.
    """
    _check_tau(tau)
    if p_c is not None and not p_c < p_n:
        _warn(f"p_n = {p_n:.3g} is not above p_c = {p_c:.3g}")
    if not p_n < 1.0:
        _warn("p_n must be below one")
    e = 1.0 / (3.0 - tau)
    base = float(n) * p_n**e
    c1 = mu * kappa**e * base
    values = (
        ("C1", c1),
        ("E1", c1),
        ("C2_over_C1", 0.0),
        ("C1_laplace", mu * (kappa / mu) ** e * base),
    )
    return RegimePrediction(Regime.SUPERCRITICAL, float(p_n), values, p_c=p_c)


def supercritical_fixed_point(degrees, p: float) -> tuple[float, float]:
    """Finite-``n`` giant size and edge count for half-edge retention ``p``.

    Solves ``xi = sum_k d_k (1-p+p xi)**(d_k-1) / ell_n`` for the root below one;
    the giant then has ``sum_k (1 - (1-p+p xi)**d_k)`` vertices and
    ``p ell_n (1 - xi**2) / 2`` edges. Returns ``(0, 0)`` when there is no such root.
    """
    d = np.asarray(getattr(degrees, "d", degrees), dtype=np.int64)
    vals, counts = np.unique(d[d > 0], return_counts=True)
    v = vals.astype(np.float64)
    ell = float(np.sum(v * counts))

    def f(xi):
        return float(np.sum(counts * v * (1.0 - p + p * xi) ** (v - 1.0))) / ell - xi

    hi = 1.0 - 1e-12
    if f(hi) >= 0.0:
        step = 1e-6
        while step < 1.0 and f(1.0 - step) >= 0.0:
            step *= 2.0
        if step >= 1.0:
            return 0.0, 0.0
        hi = 1.0 - step
    xi = optimize.brentq(f, 0.0, hi, xtol=1e-15)
    size = float(np.sum(counts * -np.expm1(v * np.log1p(-p * (1.0 - xi)))))
    edges = 0.5 * p * ell * (1.0 - xi * xi)
    return size, edges


def hub_edge_count(outcome: PercolationOutcome, i: int, j: int) -> int:
    """Number of edges between vertices ``i`` and ``j`` (1-based hub indices)."""
    g = outcome.graph
    a, b = i - 1, j - 1
    part = g.partner[g.offsets[a] : g.offsets[a + 1]]
    return int(np.count_nonzero(np.searchsorted(g.offsets, part, side="right") - 1 == b))


def hub_edge_statistics(outcomes: Iterable[PercolationOutcome], i: int, j: int) -> tuple[float, float]:
    """Mean edge count between hubs ``i`` and ``j`` and the fraction of replicates joining them.

    Hub indices are 1-based, so ``(1, 2)`` are the two largest-degree vertices.
    """
    if i == j:
        raise ParameterError("hub indices must differ")
    if min(i, j) < 1:
        raise ParameterError("hub indices are 1-based")
    counts, same = [], []
    for out in outcomes:
        counts.append(hub_edge_count(out, i, j))
        labels = component_table(out.graph).labels
        same.append(labels[i - 1] == labels[j - 1])
    if not counts:
        raise ParameterError("no replicates supplied")
    return float(np.mean(counts)), float(np.mean(same))
