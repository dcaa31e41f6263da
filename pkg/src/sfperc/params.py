"""Model parameters, scaling exponents and the criticality quantities."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import DegenerateInputError, ParameterError, SupercriticalRangeError

__all__ = [
    "ModelParams",
    "Exponents",
    "exponents",
    "criticality_parameter",
    "critical_p",
]


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not 2.0 < tau < 3.0:
        raise ParameterError(f"tau must lie in the open interval (2, 3), got {tau!r}")
    return tau


@dataclass(frozen=True)
class ModelParams:
    """Power-law configuration model parameters.

    Parameters
    ----------
    tau : float
        Power-law exponent of the degree distribution, ``2 < tau < 3``.
    lam : float
        Location inside the critical window, ``p = lam / nu_n``.
    c_F : float
        Tail constant, ``P(D > k) = c_F * k**-(tau - 1)``.
    n : int
        Number of vertices.
    seed : int
        Master seed (64-bit).
    """

    tau: float
    lam: float = 1.0
    c_F: float = 1.0
    n: int = 1000
    seed: int = 0

    def __post_init__(self):
        _check_tau(self.tau)
        if not self.lam > 0:
            raise ParameterError(f"lam must be positive, got {self.lam!r}")
        if not self.c_F > 0:
            raise ParameterError(f"c_F must be positive, got {self.c_F!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")

    @property
    def exponents(self) -> "Exponents":
        return exponents(self.tau)


@dataclass(frozen=True)
class Exponents:
    """Scaling exponents: hub degrees ``n**alpha``, critical sizes ``n**rho``,
    critical window ``p_c ~ n**-eta``."""

    alpha: float
    rho: float
    eta: float


def exponents(tau: float) -> Exponents:
    """Return ``alpha = 1/(tau-1)``, ``rho = (tau-2)/(tau-1)``, ``eta = (3-tau)/(tau-1)``.

    >>> exponents(2.5)
    Exponents(alpha=0.6666666666666666, rho=0.3333333333333333, eta=0.3333333333333333)
    """
    tau = _check_tau(tau)
    return Exponents(
        alpha=1.0 / (tau - 1.0),
        rho=(tau - 2.0) / (tau - 1.0),
        eta=(3.0 - tau) / (tau - 1.0),
    )


def _degree_sums(degrees) -> tuple[int, int]:
    d = getattr(degrees, "d", degrees)
    d = np.asarray(d, dtype=np.int64)
    if d.size and d.min() < 0:
        raise ParameterError("degrees must be non-negative")
    # Python ints: exact regardless of the magnitude of sum d^2.
    total = int(d.sum(dtype=np.int64))
    vals, counts = np.unique(d, return_counts=True)
    second = sum(int(v) * (int(v) - 1) * int(c) for v, c in zip(vals, counts))
    return total, second


def criticality_parameter(degrees: Iterable[int]) -> float:
    """``nu_n = sum d_i (d_i - 1) / sum d_i`` with exact integer accumulation.

    Accepts a :class:`~sfperc.degrees.DegreeSequence` or any integer sequence.
    """
    total, second = _degree_sums(degrees)
    if total == 0:
        raise DegenerateInputError("degree sequence has no half-edges")
    return float(Fraction(second, total))


def critical_p(lam: float, nu_n: float) -> float:
    """Representative critical percolation probability ``lam / nu_n``.

    Raises
    ------
    SupercriticalRangeError
        If ``lam / nu_n > 1``; the value is never clamped.
    """
    if not nu_n > 0:
        raise ParameterError(f"nu_n must be positive, got {nu_n!r}")
    if not lam > 0:
        raise ParameterError(f"lam must be positive, got {lam!r}")
    p = lam / nu_n
    if p > 1.0:
        raise SupercriticalRangeError(
            f"lam/nu_n = {p:.6g} > 1: supercritical beyond the percolation range"
        )
    return p
