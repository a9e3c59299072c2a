"""Empirical CDF and Kolmogorov-Smirnov goodness of fit against a fitted LFR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import kstwo

from . import distribution as dist
from .censoring import MhcSample
from .distribution import LfrParams
from .likelihood import fit_mle

__all__ = [
    "Ecdf",
    "GofReport",
    "ecdf",
    "ks_statistic",
    "kolmogorov_sf",
    "ks_pvalue",
    "ks_test",
    "plot_data",
]


class Ecdf:
    """Right-continuous empirical CDF; ties jump by multiplicity / n."""

    def __init__(self, data):
        x = np.sort(np.asarray(data, dtype=float))
        if x.size == 0:
            raise ValueError("ecdf needs at least one observation")
        self.x = x
        self.n = x.size

    def __call__(self, q):
        out = np.searchsorted(self.x, q, side="right") / self.n
        return float(out) if np.ndim(out) == 0 else out


def ecdf(data) -> Ecdf:
    return Ecdf(data)


def ks_statistic(data, cdf) -> float:
    """Two-sided ``D_n = sup |F_n - F|`` from the sorted-point formula."""
    x = np.sort(np.asarray(data, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("empty data")
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - F)), np.max(np.abs((i - 1) / n - F))))


def kolmogorov_sf(t: float) -> float:
    """``P(K > t)`` for the limiting Kolmogorov distribution.

    Uses ``2 sum (-1)^(k-1) exp(-2 k^2 t^2)`` for ``t >= 1`` and the Jacobi
    theta form of the CDF for small ``t``; both series are summed until the
    terms drop below machine precision.
    """
    if t <= 0:
        return 1.0
    if t < 1.0:
        c = math.sqrt(2.0 * math.pi) / t
        s, k = 0.0, 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * t * t))
            s += term
            if term < 1e-17 * s or k > 1000:
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - c * s))
    s, k = 0.0, 1
    while True:
        term = math.exp(-2.0 * k * k * t * t)
        s += term if k % 2 else -term
        if term < 1e-17:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * s))


def ks_pvalue(d: float, n: int, method: str = "exact") -> float:
    """p-value of the two-sided one-sample K-S statistic.

    ``"exact"`` uses the finite-``n`` null distribution, ``"asymptotic"`` the
    limiting Kolmogorov law evaluated at ``sqrt(n) d``.
    """
    if method == "exact":
        return float(kstwo.sf(d, n))
    if method == "asymptotic":
        return kolmogorov_sf(math.sqrt(n) * d)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class GofReport:
    ks_distance: float
    p_value: float
    n: int
    fitted: LfrParams
    method: str = "exact"

    def __post_init__(self):
        if not (0 <= self.ks_distance <= 1 and 0 <= self.p_value <= 1):
            raise ValueError("K-S distance and p-value must lie in [0, 1]")


def ks_test(data, params: LfrParams | None = None, method: str = "exact") -> GofReport:
    """K-S test of complete ``data`` against an LFR distribution.

    When ``params`` is omitted the complete-data MLE is used.
    """
    x = np.asarray(data, dtype=float)
    if params is None:
        fit = fit_mle(MhcSample.complete(x))
        if not fit.converged:
            raise RuntimeError("complete-data MLE did not converge")
        params = fit.params
    d = ks_statistic(x, lambda v: dist.cdf(params, v))
    return GofReport(d, ks_pvalue(d, x.size, method), int(x.size), params, method)


def plot_data(data, params: LfrParams) -> list[tuple[float, float, float]]:
    """Rows ``(x, ecdf(x), fitted survival(x))`` at each distinct observation."""
    F = ecdf(data)
    xs = np.unique(F.x)
    return [(float(v), F(v), float(dist.survival(params, v))) for v in xs]
