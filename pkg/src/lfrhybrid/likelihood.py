"""Censored-data likelihood, Newton-Raphson MLE and Wald intervals."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import _kernels
from .censoring import MhcSample, require_valid
from .distribution import LfrParams

__all__ = [
    "MleFit",
    "ConfidenceInterval",
    "SingularInformationError",
    "NonPositiveDefiniteError",
    "log_likelihood",
    "score",
    "hessian",
    "default_init",
    "fit_mle",
    "normal_quantile",
    "confidence_intervals",
]

log = logging.getLogger(__name__)

# A Newton step may shrink a parameter to at most this fraction of its value.
_SHRINK = 0.1


class SingularInformationError(np.linalg.LinAlgError):
    def __init__(self, message, condition):
        super().__init__(f"{message} (condition number {condition:.3g})")
        self.condition = condition


class NonPositiveDefiniteError(ValueError):
    """The estimated covariance has a non-positive variance."""


def _arrays(sample: MhcSample):
    return (
        np.ascontiguousarray(sample.times, dtype=np.float64),
        np.ascontiguousarray(sample.gaps, dtype=np.int64),
        float(sample.n_surviving),
    )


def log_likelihood(params: LfrParams, sample: MhcSample) -> float:
    """Log-likelihood of ``params`` up to an additive constant.

    Returns ``-inf`` when an unrecorded-failure gap has zero probability
    mass, which only happens between tied observations.
    """
    t, g, s = _arrays(sample)
    return float(_kernels.loglik(params.alpha, params.beta, t, g, s))


def _derivatives(alpha, beta, sample):
    t, g, s = _arrays(sample)
    return _kernels.loglik_derivatives(float(alpha), float(beta), t, g, s)


def score(params: LfrParams, sample: MhcSample) -> np.ndarray:
    """Gradient of :func:`log_likelihood` with respect to ``(alpha, beta)``."""
    return _derivatives(params.alpha, params.beta, sample)[1].copy()


def hessian(params: LfrParams, sample: MhcSample) -> np.ndarray:
    return _derivatives(params.alpha, params.beta, sample)[2].copy()


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class MleFit:
    """Result of :func:`fit_mle`.

    ``observed_info`` is the negative Hessian at the estimate and ``cov`` its
    inverse. Both are NaN-filled when the fit did not converge to a point
    with a regular Hessian.
    """

    params: LfrParams
    loglik: float
    score_norm: float
    observed_info: np.ndarray
    cov: np.ndarray
    iterations: int
    converged: bool

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def beta(self) -> float:
        return self.params.beta

    @property
    def se(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))


def default_init(sample: MhcSample) -> LfrParams:
    """Exponential moment start ``alpha = 1/mean``, ``beta = 1e-3 alpha / mean``."""
    mean = float(np.mean(sample.times))
    a0 = 1.0 / mean
    return LfrParams(a0, 1e-3 * a0 / mean)


def _newton_direction(p, g, h):
    """Newton direction ``-H^{-1} g``, falling back to scaled gradient ascent.

    The log-likelihood is concave in ``(alpha, beta)`` so the Newton
    direction is an ascent direction whenever ``H`` is non-singular.
    """
    try:
        delta = -np.linalg.solve(h, g)
    except np.linalg.LinAlgError:
        delta = None
    if delta is None or not np.all(np.isfinite(delta)) or g @ delta <= 0:
        delta = g * p * p
    return delta


def _max_step(p, delta):
    """Largest step keeping every parameter above a tenth of its value."""
    shrinking = delta < 0
    if not np.any(shrinking):
        return 1.0
    return min(1.0, float(np.min((1.0 - _SHRINK) * p[shrinking] / -delta[shrinking])))


def fit_mle(
    sample: MhcSample,
    init: LfrParams | None = None,
    tol: float = 1e-8,
    max_iter: int = 100,
) -> MleFit:
    """Maximise the censored log-likelihood by Newton-Raphson.

    Steps along the Newton direction in ``(alpha, beta)``, shortened so that
    neither parameter falls below a tenth of its current value and then
    halved until the log-likelihood does not decrease. Converged means the
    sup-norm of the score is below ``tol``; an estimate drifting to the
    ``beta = 0`` boundary is reported as not converged. Raises
    :class:`SingularInformationError` if the information matrix at a
    converged estimate cannot be inverted.
    """
    require_valid(sample)
    start = init or default_init(sample)
    p = start.as_array()
    val, g, h = _derivatives(p[0], p[1], sample)
    if not np.isfinite(val):
        raise ValueError("log-likelihood is not finite at the initial point")

    converged = False
    it = 0
    while it < max_iter:
        if np.max(np.abs(g)) < tol:
            converged = True
            break
        it += 1
        delta = _newton_direction(p, g, h)
        t = _max_step(p, delta)
        while t >= 1e-14:
            cand = p + t * delta
            new = _derivatives(cand[0], cand[1], sample)
            if np.isfinite(new[0]) and new[0] >= val - 1e-12 * abs(val):
                break
            t *= 0.5
        else:
            log.debug("line search stalled at iteration %d", it)
            break
        p = cand
        val, g, h = new
    converged = converged or bool(np.max(np.abs(g)) < tol)

    params = LfrParams(float(p[0]), float(p[1]))
    info = -h
    cov = np.full((2, 2), np.nan)
    if converged:
        cond = np.linalg.cond(info)
        if not np.isfinite(cond) or cond > 1e14:
            raise SingularInformationError("observed information is singular", cond)
        cov = np.linalg.inv(info)
        cov = 0.5 * (cov + cov.T)
    else:
        log.info("Newton-Raphson did not converge after %d iterations", it)
    return MleFit(
        params=params,
        loglik=float(val),
        score_norm=float(np.max(np.abs(g))),
        observed_info=info,
        cov=cov,
        iterations=it,
        converged=converged,
    )


def normal_quantile(p):
    """Standard normal inverse CDF."""
    return ndtri(p)


def confidence_intervals(fit: MleFit, gamma: float = 0.05) -> tuple[ConfidenceInterval, ConfidenceInterval]:
    """Two-sided ``100(1 - gamma)%`` Wald intervals for ``alpha`` and ``beta``.

    Intervals are not truncated at zero.
    """
    if not fit.converged:
        raise ValueError("confidence intervals need a converged fit")
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    var = np.diag(fit.cov)
    if np.any(~(var > 0)):
        raise NonPositiveDefiniteError(f"non-positive variance estimate {var}")
    z = float(normal_quantile(1.0 - gamma / 2.0))
    out = []
    for est, v in zip((fit.alpha, fit.beta), var):
        half = z * math.sqrt(v)
        out.append(ConfidenceInterval(est - half, est + half, 1.0 - gamma))
    return out[0], out[1]
