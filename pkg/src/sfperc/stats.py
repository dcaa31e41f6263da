"""Summary statistics used by the experiment harness."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = ["ExponentFit", "ks_distance", "fit_exponent"]


def ks_distance(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup_x |F_a(x) - F_b(x)|``."""
    a = np.asarray(sample_a, dtype=np.float64).ravel()
    b = np.asarray(sample_b, dtype=np.float64).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    with warnings.catch_warnings():
        # only the statistic is used; the p-value warns on tiny samples
        warnings.simplefilter("ignore", RuntimeWarning)
        return float(stats.ks_2samp(a, b, method="asymp").statistic)


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    r_squared: float

    def __iter__(self):
        return iter((self.slope, self.stderr))


def fit_exponent(pairs, *, mode: str = "power") -> ExponentFit:
    """Least squares of ``log value`` (``mode="power"``) or ``value`` (``mode="log"``) on ``log n``.

    Unpacks as ``slope, stderr``.
    """
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ValueError("need at least three (n, value) pairs")
    n, y = arr[:, 0], arr[:, 1]
    if np.any(n <= 0):
        raise ValueError("n must be positive")
    if mode == "power":
        if np.any(y <= 0):
            raise ValueError("values must be positive for a power-law fit")
        y = np.log(y)
    elif mode != "log":
        raise ValueError(f"unknown mode {mode!r}")
    res = stats.linregress(np.log(n), y)
    return ExponentFit(float(res.slope), float(res.stderr), float(res.intercept), float(res.rvalue**2))
