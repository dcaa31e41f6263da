"""Power-law degree sequences and their limiting hub weights.

Two constructions are provided for ``P(D > k) = c_F k**-(tau-1)``:

* :func:`quantile_degrees` places ``d_i`` at the generalized inverse of the
  tail function evaluated on the grid ``i/n`` (deterministic).
* :func:`iid_degrees` gives the order statistics of an i.i.d. sample through
  the Gamma-ratio representation ``U_(i) = Gamma_i / Gamma_{n+1}``.

Hubs satisfy ``n**-alpha d_i -> theta_i``; :func:`theta_limits` returns the
limiting weights ``theta_i = c_F**alpha i**-alpha``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .errors import ParameterError
from .params import ModelParams, exponents

__all__ = [
    "CaseTag",
    "DegreeSequence",
    "ThetaSequence",
    "Assumption1Report",
    "tail_inverse",
    "quantile_degrees",
    "iid_degrees",
    "theta_limits",
    "expected_degree",
    "validate_assumption1",
    "save_degrees",
    "load_degrees",
]


class CaseTag(str, enum.Enum):
    QUANTILE_I = "QuantileI"
    IID_II = "IidII"
    USER = "UserSupplied"


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    """Non-increasing degree sequence with even total.

    ``d[0]`` is vertex 1 in the usual 1-based labelling, i.e. the largest hub.
    """

    d: np.ndarray
    case_tag: CaseTag = CaseTag.USER
    tau: Optional[float] = None
    c_F: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        d = np.array(self.d, dtype=np.int64)
        if d.ndim != 1 or d.size == 0:
            raise ParameterError("degree sequence must be a non-empty 1-d array")
        if d.min() < 0:
            raise ParameterError("degrees must be non-negative")
        if np.any(np.diff(d) > 0):
            raise ParameterError("degrees must be sorted non-increasing")
        if d[0] < 1:
            raise ParameterError("largest degree must be at least 1")
        if int(d.sum()) % 2:
            raise ParameterError("total degree must be even")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "case_tag", CaseTag(self.case_tag))

    @classmethod
    def from_degrees(cls, degrees: Sequence[int], *, fix_parity: bool = False, **meta):
        """Sort ``degrees`` non-increasing; optionally add the parity dummy to vertex 1."""
        d = np.sort(np.asarray(degrees, dtype=np.int64))[::-1].copy()
        if fix_parity and d.sum() % 2:
            d[0] += 1
        return cls(d, **meta)

    @property
    def n(self) -> int:
        return int(self.d.size)

    @property
    def total(self) -> int:
        """``ell_n``, the number of half-edges."""
        return int(self.d.sum())

    @property
    def mu(self) -> float:
        """Empirical mean degree ``ell_n / n``."""
        return self.total / self.n

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return (
            np.array_equal(self.d, other.d)
            and self.case_tag == other.case_tag
            and self.tau == other.tau
            and self.c_F == other.c_F
            and self.seed == other.seed
        )

    def __hash__(self):
        return hash((self.d.tobytes(), self.case_tag, self.tau, self.c_F, self.seed))


@dataclass(frozen=True)
class ThetaSequence:
    """Limiting hub weights ``theta_i = scale * i**-alpha`` truncated at ``K``.

    The squared norm over the full infinite sequence is available in closed
    form (Hurwitz zeta), and the truncation tail ``sum_{i>K} theta_i**2`` is
    tracked explicitly.
    """

    scale: float
    alpha: float
    K: int
    mu: Optional[float] = None

    def __post_init__(self):
        if not 0.5 < self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in (1/2, 1], got {self.alpha!r}")
        if self.K < 1:
            raise ParameterError("K must be at least 1")
        if not self.scale > 0:
            raise ParameterError("scale must be positive")

    @property
    def theta(self) -> np.ndarray:
        i = np.arange(1, self.K + 1, dtype=np.float64)
        return self.scale * i ** (-self.alpha)

    def values(self, idx) -> np.ndarray:
        """``theta_i`` at 1-based indices ``idx`` (not limited to ``i <= K``)."""
        return self.scale * np.asarray(idx, dtype=np.float64) ** (-self.alpha)

    def power_sum(self, s: float, start: float = 1) -> float:
        """``sum_{i >= start} theta_i**s`` over the infinite sequence (needs ``s*alpha > 1``)."""
        if s * self.alpha <= 1.0:
            return math.inf
        return float(self.scale**s * special.zeta(s * self.alpha, start))

    @property
    def l2_norm_sq(self) -> float:
        return self.power_sum(2.0, 1)

    @property
    def tail_sq(self) -> float:
        """``sum_{i > K} theta_i**2``."""
        return self.power_sum(2.0, self.K + 1)

    def with_K(self, K: int) -> "ThetaSequence":
        return ThetaSequence(self.scale, self.alpha, int(K), self.mu)

    def K_for_tail(self, rel_tail: float) -> int:
        """Smallest ``K`` with ``tail_sq / l2_norm_sq < rel_tail``."""
        target = rel_tail * self.l2_norm_sq
        # integral bound: sum_{i>K} i^{-2a} <= K^{1-2a}/(2a-1)
        a2 = 2.0 * self.alpha
        K = max(1, int((target / self.scale**2 * (a2 - 1.0)) ** (1.0 / (1.0 - a2))))
        while self.with_K(K).tail_sq >= target:
            K = int(K * 1.1) + 1
        lo, hi = max(1, K // 2), K
        while lo < hi:
            mid = (lo + hi) // 2
            if self.with_K(mid).tail_sq < target:
                hi = mid
            else:
                lo = mid + 1
        return lo


def tail_inverse(x, tau: float, c_F: float) -> np.ndarray:
    """Generalized inverse ``min{k >= 1 : c_F k**-(tau-1) <= x}`` for ``x`` in (0, 1].

    Closed form ``ceil((c_F/x)**(1/(tau-1)))`` followed by a one-step
    correction on both sides of the boundary, so the result is exact up to
    the rounding of the comparison itself.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ParameterError("tail_inverse needs x > 0")
    g = tau - 1.0
    with np.errstate(over="ignore"):
        k = np.ceil((c_F / x) ** (1.0 / g))
    k = np.maximum(k, 1.0)
    # k too small: tail still above x
    too_small = c_F * k ** (-g) > x
    k = np.where(too_small, k + 1.0, k)
    # k - 1 already satisfies the inequality
    km1 = k - 1.0
    ok_lower = (km1 >= 1.0) & (c_F * np.where(km1 >= 1.0, km1, 1.0) ** (-g) <= x)
    k = np.where(ok_lower, km1, k)
    return k.astype(np.int64)


def _finish(d: np.ndarray, tag: CaseTag, params: ModelParams) -> DegreeSequence:
    d = np.sort(d)[::-1].copy()
    if int(d.sum()) % 2:
        d[0] += 1
    return DegreeSequence(d, case_tag=tag, tau=params.tau, c_F=params.c_F, seed=params.seed)


def quantile_degrees(params: ModelParams) -> DegreeSequence:
    """Case I: ``d_i = (1-F)^{-1}(i/n)``, plus a dummy half-edge on vertex 1 if needed."""
    n = params.n
    i = np.arange(1, n + 1, dtype=np.float64)
    return _finish(tail_inverse(i / n, params.tau, params.c_F), CaseTag.QUANTILE_I, params)


def iid_degrees(params: ModelParams, rng: np.random.Generator) -> DegreeSequence:
    """Case II: order statistics of ``n`` i.i.d. draws, ``d_i = (1-F)^{-1}(Gamma_i/Gamma_{n+1})``."""
    n = params.n
    gamma = np.cumsum(rng.standard_exponential(n + 1))
    return _finish(tail_inverse(gamma[:n] / gamma[n], params.tau, params.c_F), CaseTag.IID_II, params)


def theta_limits(params: ModelParams, K: int) -> ThetaSequence:
    """Limiting hub weights ``theta_i = c_F**alpha i**-alpha`` for the power-law cases."""
    alpha = exponents(params.tau).alpha
    return ThetaSequence(scale=params.c_F**alpha, alpha=alpha, K=int(K))


def expected_degree(tau: float, c_F: float) -> float:
    """``E[D] = sum_{k >= 0} P(D > k)`` with ``P(D > k) = min(1, c_F k**-(tau-1))``."""
    g = tau - 1.0
    # indices k >= 1 where the tail is capped at one
    k_cap = int(math.floor(c_F ** (1.0 / g)))
    while k_cap >= 1 and c_F * k_cap ** (-g) < 1.0:
        k_cap -= 1
    while c_F * (k_cap + 1) ** (-g) >= 1.0:
        k_cap += 1
    return 1.0 + k_cap + float(c_F * special.zeta(g, k_cap + 1))


@dataclass
class Assumption1Report:
    """Finite-n diagnostics for the hub and moment conditions."""

    n: int
    alpha: float
    hub_rel_dev: np.ndarray
    max_hub_rel_dev: float
    mu_empirical: float
    mu_limit: Optional[float]
    mu_rel_dev: Optional[float]
    tail_K: list[int]
    tail_stat: list[float]
    passed: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


def validate_assumption1(
    degrees: DegreeSequence,
    theta: ThetaSequence,
    *,
    hubs: int = 10,
    hub_tol: float = 0.05,
    mu_tol: float = 0.02,
    tail_ladder: Sequence[int] = (1, 10, 100, 1000),
    tail_tol: Optional[float] = None,
) -> Assumption1Report:
    """Report how close a realized sequence is to its hub/moment limits. Never raises."""
    n = degrees.n
    alpha = theta.alpha
    d = degrees.d.astype(np.float64)
    m = min(hubs, n, theta.K)
    th = theta.theta[:m]
    dev = np.abs(d[:m] * n ** (-alpha) - th) / th
    mu_emp = degrees.mu
    mu_lim = None
    if degrees.tau is not None and degrees.c_F is not None:
        mu_lim = expected_degree(degrees.tau, degrees.c_F)
    mu_dev = None if mu_lim is None else abs(mu_emp - mu_lim) / mu_lim
    sq = d**2
    csum = np.concatenate([[0.0], np.cumsum(sq[::-1])])[::-1]  # csum[k] = sum_{i>k} d_i^2 (1-based)
    ladder = [int(K) for K in tail_ladder if K < n]
    stats = [float(csum[K] * n ** (-2.0 * alpha)) for K in ladder]
    passed = {"hubs": bool(dev.size == 0 or dev.max() < hub_tol)}
    if mu_dev is not None:
        passed["mu"] = bool(mu_dev < mu_tol)
    if tail_tol is not None and stats:
        passed["tail"] = bool(stats[-1] < tail_tol)
    return Assumption1Report(
        n=n,
        alpha=alpha,
        hub_rel_dev=dev,
        max_hub_rel_dev=float(dev.max()) if dev.size else 0.0,
        mu_empirical=mu_emp,
        mu_limit=mu_lim,
        mu_rel_dev=mu_dev,
        tail_K=ladder,
        tail_stat=stats,
        passed=passed,
    )


def save_degrees(path, seq: DegreeSequence) -> None:
    """One integer per line after a ``#`` header carrying ``n, tau, c_F, case, seed``."""
    header = (
        f"# n={seq.n} tau={'' if seq.tau is None else repr(float(seq.tau))} "
        f"c_F={'' if seq.c_F is None else repr(float(seq.c_F))} "
        f"case={seq.case_tag.value} seed={'' if seq.seed is None else int(seq.seed)}\n"
    )
    with open(path, "w") as fh:
        fh.write(header)
        fh.write("\n".join(str(int(x)) for x in seq.d))
        fh.write("\n")


def load_degrees(path) -> DegreeSequence:
    text = Path(path).read_text().splitlines()
    meta: dict[str, str] = {}
    if text and text[0].startswith("#"):
        for tok in text[0][1:].split():
            key, _, val = tok.partition("=")
            meta[key] = val
        text = text[1:]
    d = np.array([int(s) for s in text if s.strip()], dtype=np.int64)
    if "n" in meta and int(meta["n"]) != d.size:
        raise ParameterError(f"header says n={meta['n']} but file holds {d.size} degrees")
    return DegreeSequence(
        d,
        case_tag=CaseTag(meta.get("case") or CaseTag.USER.value),
        tau=float(meta["tau"]) if meta.get("tau") else None,
        c_F=float(meta["c_F"]) if meta.get("c_F") else None,
        seed=int(meta["seed"]) if meta.get("seed") else None,
    )
