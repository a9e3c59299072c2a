"""Two-sample Bayesian prediction of future order statistics.

For a future sample of size ``m`` the s-th order statistic ``Y_{s:m}`` has,
for fixed parameters, density ``s C(m, s) F^(s-1) (1-F)^(m-s) f`` and CDF
``I_F(s, m-s+1)`` (regularised incomplete beta). Predictive quantities
average these over posterior draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec
from scipy.optimize import brentq
from scipy.special import betainc, betaincinv, gammaln

from .bayes import PosteriorChain
from .distribution import DomainError, LfrParams

__all__ = [
    "PredictionRequest",
    "PredictionResult",
    "QuadratureError",
    "order_stat_log_density",
    "order_stat_cdf",
    "predictive_density",
    "point_predictor",
    "predictive_cdf",
    "prediction_interval",
    "predict",
    "prediction_table",
]

# Upper integration limit: this quantile of the order statistic, per draw.
_TAIL = 1e-9


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class PredictionRequest:
    s: int
    m_future: int
    level: float
    chain: PosteriorChain

    def __post_init__(self):
        _check_rank(self.s, self.m_future)
        if not 0 < self.level < 1:
            raise ValueError("level must lie in (0, 1)")


@dataclass(frozen=True)
class PredictionResult:
    s: int
    m_future: int
    point: float
    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")

    @property
    def length(self) -> float:
        return self.upper - self.lower


def _check_rank(s, m):
    if not (isinstance(s, (int, np.integer)) and isinstance(m, (int, np.integer))):
        raise DomainError("rank and size must be integers")
    if not 1 <= s <= m:
        raise DomainError(f"need 1 <= s <= m, got s={s}, m={m}")


def _draws(chain_or_params):
    if isinstance(chain_or_params, LfrParams):
        return np.array([chain_or_params.alpha]), np.array([chain_or_params.beta])
    return np.asarray(chain_or_params.alpha), np.asarray(chain_or_params.beta)


def _log_density(a, b, s, m, y):
    lam = y * (a + 0.5 * b * y)
    out = (
        math.log(s)
        + gammaln(m + 1) - gammaln(s + 1) - gammaln(m - s + 1)
        + np.log(a + b * y)
        - lam * (m - s + 1)
    )
    if s > 1:
        with np.errstate(divide="ignore"):
            out = out + (s - 1) * np.log(-np.expm1(-lam))
    return out


def _lfr_quantile(a, b, u):
    t = -np.log1p(-u)
    return 2.0 * t / (a + np.sqrt(a * a + 2.0 * b * t))


def _os_quantile(a, b, s, m, p):
    """Quantile of ``Y_{s:m}`` for each draw."""
    return _lfr_quantile(a, b, betaincinv(s, m - s + 1, p))


def order_stat_log_density(params: LfrParams, s: int, m_future: int, y):
    """Log-density of the s-th smallest of ``m_future`` i.i.d. LFR lifetimes."""
    _check_rank(s, m_future)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(~np.isfinite(y)):
        raise DomainError("y must be finite and >= 0")
    out = _log_density(params.alpha, params.beta, s, m_future, y)
    return float(out) if out.ndim == 0 else out


def order_stat_cdf(params: LfrParams, s: int, m_future: int, y):
    """``P(Y_{s:m} <= y)``, the binomial tail ``sum_{k>=s} C(m,k) F^k (1-F)^(m-k)``."""
    _check_rank(s, m_future)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("y must be >= 0")
    F = -np.expm1(-y * (params.alpha + 0.5 * params.beta * y))
    out = betainc(s, m_future - s + 1, F)
    return float(out) if out.ndim == 0 else out


def predictive_density(chain: PosteriorChain, s: int, m_future: int, y):
    """Posterior-averaged density of ``Y_{s:m}`` at ``y`` (scalar or array)."""
    _check_rank(s, m_future)
    a, b = _draws(chain)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("y must be >= 0")
    dens = np.exp(_log_density(a[:, None], b[:, None], s, m_future, y.reshape(1, -1)))
    out = dens.mean(axis=0)
    return float(out[0]) if y.ndim == 0 else out.reshape(y.shape)


def predictive_cdf(chain: PosteriorChain, s: int, m_future: int, y):
    _check_rank(s, m_future)
    a, b = _draws(chain)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("y must be >= 0")
    yy = y.reshape(1, -1)
    F = -np.expm1(-yy * (a[:, None] + 0.5 * b[:, None] * yy))
    out = betainc(s, m_future - s + 1, F).mean(axis=0)
    return float(out[0]) if y.ndim == 0 else out.reshape(y.shape)


def point_predictor(chain: PosteriorChain, s: int, m_future: int, epsabs: float = 1e-8) -> float:
    """Predictive mean of ``Y_{s:m}`` (the squared-error-loss predictor).

    Each draw's mean ``int_0^q y g(y) dy`` is integrated adaptively up to
    that draw's ``1 - 1e-9`` order-statistic quantile ``q``; all draws share
    one vector-valued quadrature after rescaling to ``[0, 1]``.
    """
    _check_rank(s, m_future)
    a, b = _draws(chain)
    q = _os_quantile(a, b, s, m_future, 1.0 - _TAIL)

    def integrand(t):
        y = q * t
        return q * y * np.exp(_log_density(a, b, s, m_future, y))

    res, err, info = quad_vec(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=1e-10, norm="max", full_output=True)
    if not info.success:
        raise QuadratureError(f"quadrature did not converge (error estimate {err:.3g})")
    return float(np.mean(res))


def prediction_interval(chain: PosteriorChain, s: int, m_future: int, level: float = 0.95) -> tuple[float, float]:
    """Equal-tail predictive interval ``[L, U]``.

    Solves ``G*(L) = gamma/2`` and ``G*(U) = 1 - gamma/2`` where ``G*`` is the
    predictive CDF and ``gamma = 1 - level``. The root of the mixture lies
    between the smallest and largest per-draw quantiles, which gives an exact
    bracket.
    """
    _check_rank(s, m_future)
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    a, b = _draws(chain)
    gamma = 1.0 - level
    bounds = []
    for p in (gamma / 2.0, 1.0 - gamma / 2.0):
        q = _os_quantile(a, b, s, m_future, p)
        lo, hi = float(q.min()), float(q.max())
        if hi - lo <= 1e-15 * max(hi, 1.0):
            bounds.append(lo)
            continue
        f = lambda y: predictive_cdf(chain, s, m_future, y) - p
        bounds.append(brentq(f, lo, hi, xtol=1e-14, rtol=1e-13, maxiter=200))
    return bounds[0], bounds[1]


def predict(chain: PosteriorChain, s: int, m_future: int, level: float = 0.95) -> PredictionResult:
    lower, upper = prediction_interval(chain, s, m_future, level)
    point = point_predictor(chain, s, m_future)
    return PredictionResult(s, m_future, point, max(lower, 0.0), upper, level)


def prediction_table(chain: PosteriorChain, m_future: int, level: float = 0.95, ranks=None) -> list[PredictionResult]:
    ranks = range(1, m_future + 1) if ranks is None else ranks
    return [predict(chain, int(s), m_future, level) for s in ranks]
