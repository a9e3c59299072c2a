"""Linear failure rate (LFR) lifetime distribution.

The LFR model has hazard ``alpha + beta * x``, so the cumulative hazard is
``alpha * x + beta * x**2 / 2``. Every function here accepts scalars or
arrays and returns ``float`` or ``numpy.ndarray`` accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "LfrParams",
    "cumulative_hazard",
    "pdf",
    "logpdf",
    "cdf",
    "survival",
    "hazard",
    "quantile",
    "sample",
]


class DomainError(ValueError):
    """Argument outside the support of the distribution."""


@dataclass(frozen=True)
class LfrParams:
    """Rate ``alpha`` (1/time) and rate slope ``beta`` (1/time^2), both > 0."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])


def _check_times(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("times must be finite")
    if np.any(arr < 0):
        raise DomainError("times must be >= 0")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def cumulative_hazard(params: LfrParams, x):
    x = _check_times(x)
    return _out(x * (params.alpha + 0.5 * params.beta * x))


def pdf(params: LfrParams, x):
    """Density ``(alpha + beta x) exp(-(alpha x + beta x^2 / 2))``."""
    x = _check_times(x)
    lam = x * (params.alpha + 0.5 * params.beta * x)
    return _out((params.alpha + params.beta * x) * np.exp(-lam))


def logpdf(params: LfrParams, x):
    x = _check_times(x)
    lam = x * (params.alpha + 0.5 * params.beta * x)
    return _out(np.log(params.alpha + params.beta * x) - lam)


def cdf(params: LfrParams, x):
    x = _check_times(x)
    lam = x * (params.alpha + 0.5 * params.beta * x)
    return _out(-np.expm1(-lam))


def survival(params: LfrParams, x):
    x = _check_times(x)
    lam = x * (params.alpha + 0.5 * params.beta * x)
    return _out(np.exp(-lam))


def hazard(params: LfrParams, x):
    x = _check_times(x)
    return _out(params.alpha + params.beta * x)


def quantile(params: LfrParams, u):
    """Inverse of :func:`cdf` for ``0 <= u < 1``.

    Solves ``alpha x + beta x^2 / 2 = t`` with ``t = -log1p(-u)`` using the
    rationalised root ``2 t / (alpha + sqrt(alpha^2 + 2 beta t))``. Unlike
    ``(-alpha + sqrt(...)) / beta`` it does not cancel when ``beta t`` is
    small relative to ``alpha^2``.
    """
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)) or np.any(u < 0) or np.any(u >= 1):
        raise DomainError("probabilities must lie in [0, 1)")
    t = -np.log1p(-u)
    a, b = params.alpha, params.beta
    return _out(2.0 * t / (a + np.sqrt(a * a + 2.0 * b * t)))


def sample(params: LfrParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. lifetimes by inversion, returned sorted ascending."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = rng.random(n)
    return np.sort(quantile(params, u))
