"""Bayesian estimation under independent Jeffreys priors ``1/alpha`` and ``1/beta``.

The joint posterior is sampled by Metropolis-Hastings within Gibbs: each
sweep updates ``alpha`` given ``beta`` and then ``beta`` given the new
``alpha``, each with a normal random-walk proposal. Both conditional
acceptance ratios are evaluated on the joint log-posterior, whose factors
that do not involve the updated parameter cancel.

Note that these priors make the posterior improper: the likelihood stays
positive as either parameter tends to zero while the prior mass there
diverges logarithmically. Chains therefore drift slowly towards the axes
and posterior summaries depend on run length.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .censoring import MhcSample, require_valid
from .distribution import LfrParams
from .likelihood import ConfidenceInterval, MleFit, fit_mle, log_likelihood

__all__ = [
    "McmcConfig",
    "PosteriorChain",
    "log_prior",
    "log_posterior",
    "acceptance_probability",
    "run_mh_within_gibbs",
    "sel_estimate",
    "credible_interval",
    "chain_to_csv",
    "chain_summary",
]


@dataclass(frozen=True)
class McmcConfig:
    """Sampler settings.

    Proposal standard deviations left as ``None`` are taken from the MLE
    asymptotic standard errors; a missing ``init`` starts at the MLE.
    """

    n_iter: int = 11000
    burn_in: int = 1000
    proposal_sd_alpha: float | None = None
    proposal_sd_beta: float | None = None
    seed: int = 0
    init: LfrParams | None = None

    def __post_init__(self):
        if not 0 <= self.burn_in < self.n_iter:
            raise ValueError(f"need 0 <= burn_in < n_iter, got {self.burn_in}, {self.n_iter}")
        for sd in (self.proposal_sd_alpha, self.proposal_sd_beta):
            if sd is not None and not (sd > 0 and math.isfinite(sd)):
                raise ValueError("proposal standard deviations must be finite and > 0")


@dataclass(frozen=True)
class PosteriorChain:
    alpha_draws: np.ndarray
    beta_draws: np.ndarray
    burn_in: int
    acceptance_rate_alpha: float
    acceptance_rate_beta: float
    proposal_sd: tuple[float, float] = (math.nan, math.nan)
    seed: int | None = None

    def __post_init__(self):
        a = np.array(self.alpha_draws, dtype=float)
        b = np.array(self.beta_draws, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("alpha and beta draws must be 1-d and equally long")
        if not 0 <= self.burn_in < len(a):
            raise ValueError("burn-in must leave at least one draw")
        if np.any(a <= 0) or np.any(b <= 0):
            raise ValueError("posterior draws must be positive")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "alpha_draws", a)
        object.__setattr__(self, "beta_draws", b)

    @classmethod
    def constant(cls, params: LfrParams, length: int = 1) -> "PosteriorChain":
        return cls(np.full(length, params.alpha), np.full(length, params.beta), 0, 0.0, 0.0)

    @classmethod
    def from_draws(cls, alpha, beta, burn_in: int = 0) -> "PosteriorChain":
        return cls(np.asarray(alpha, float), np.asarray(beta, float), burn_in, math.nan, math.nan)

    @property
    def n_iter(self) -> int:
        return len(self.alpha_draws)

    @property
    def alpha(self) -> np.ndarray:
        """Post-burn-in ``alpha`` draws."""
        return self.alpha_draws[self.burn_in:]

    @property
    def beta(self) -> np.ndarray:
        return self.beta_draws[self.burn_in:]


def log_prior(params: LfrParams) -> float:
    return -math.log(params.alpha) - math.log(params.beta)


def log_posterior(params: LfrParams, sample: MhcSample) -> float:
    """Unnormalised log-posterior, log-likelihood plus ``-log alpha - log beta``."""
    return log_likelihood(params, sample) + log_prior(params)


def acceptance_probability(log_target_current: float, log_target_proposal: float) -> float:
    """Metropolis acceptance probability for a symmetric proposal."""
    if log_target_proposal == -math.inf:
        return 0.0
    return min(1.0, math.exp(min(0.0, log_target_proposal - log_target_current)))


def run_mh_within_gibbs(
    sample: MhcSample,
    config: McmcConfig = McmcConfig(),
    mle: MleFit | None = None,
) -> PosteriorChain:
    """Sample the joint posterior.

    Parameters
    ----------
    sample : MhcSample
        Censored data.
    config : McmcConfig
        Chain length, burn-in, proposal scales, seed and start.
    mle : MleFit, optional
        A precomputed fit, used for the default start and proposal scales.

    Returns
    -------
    PosteriorChain
        ``config.n_iter`` draws. Proposals at or below zero are rejected.
    """
    require_valid(sample)
    init, sd_a, sd_b = config.init, config.proposal_sd_alpha, config.proposal_sd_beta
    if init is None or sd_a is None or sd_b is None:
        mle = mle or fit_mle(sample)
        if not mle.converged:
            raise ValueError("MLE did not converge; supply init and proposal scales explicitly")
        se = mle.se
        init = init or mle.params
        sd_a = sd_a if sd_a is not None else float(se[0])
        sd_b = sd_b if sd_b is not None else float(se[1])
    if not math.isfinite(log_posterior(init, sample)):
        raise ValueError(f"log-posterior is -inf at the initial point {init}")

    rng = np.random.default_rng(config.seed)
    normals = rng.standard_normal((config.n_iter, 2))
    uniforms = rng.random((config.n_iter, 2))
    draws, acc_a, acc_b = _kernels.mh_within_gibbs(
        np.ascontiguousarray(sample.times, dtype=np.float64),
        np.ascontiguousarray(sample.gaps, dtype=np.int64),
        float(sample.n_surviving),
        init.alpha,
        init.beta,
        float(sd_a),
        float(sd_b),
        normals,
        uniforms,
    )
    return PosteriorChain(
        draws[:, 0].copy(),
        draws[:, 1].copy(),
        config.burn_in,
        acc_a / config.n_iter,
        acc_b / config.n_iter,
        proposal_sd=(float(sd_a), float(sd_b)),
        seed=config.seed,
    )


def sel_estimate(chain: PosteriorChain) -> LfrParams:
    """Bayes estimates under squared-error loss: post-burn-in means."""
    if len(chain.alpha) == 0:
        raise ValueError("empty post-burn-in segment")
    # centring on the first draw keeps a constant chain exact
    a, b = chain.alpha, chain.beta
    return LfrParams(float(a[0] + np.mean(a - a[0])), float(b[0] + np.mean(b - b[0])))


def _order_index(x):
    # guards against 0.95 * 100 = 94.99999999999999 style rounding
    return math.ceil(x - 1e-9)


def credible_interval(chain: PosteriorChain, which: str, level: float = 0.95) -> ConfidenceInterval:
    """Equal-tail interval from the sorted post-burn-in draws.

    With ``K`` draws and ``level = 1 - v`` the bounds are the order
    statistics at 1-based positions ``ceil(K v / 2)`` and ``ceil(K (1 - v/2))``,
    clamped to ``[1, K]``.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    if which not in ("alpha", "beta"):
        raise ValueError("which must be 'alpha' or 'beta'")
    draws = np.sort(getattr(chain, which))
    k = len(draws)
    v = 1.0 - level
    lo = min(max(_order_index(k * v / 2), 1), k)
    hi = min(max(_order_index(k * (1 - v / 2)), 1), k)
    return ConfidenceInterval(float(draws[lo - 1]), float(draws[hi - 1]), level)


def chain_to_csv(chain: PosteriorChain) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "alpha", "beta"])
    for i, (a, b) in enumerate(zip(chain.alpha_draws, chain.beta_draws), start=1):
        w.writerow([i, repr(float(a)), repr(float(b))])
    return buf.getvalue()


def chain_summary(chain: PosteriorChain, level: float = 0.95) -> dict:
    sel = sel_estimate(chain)
    ci_a = credible_interval(chain, "alpha", level)
    ci_b = credible_interval(chain, "beta", level)
    return {
        "sel": {"alpha": sel.alpha, "beta": sel.beta},
        "ci": {
            "level": level,
            "alpha": [ci_a.lower, ci_a.upper],
            "beta": [ci_b.lower, ci_b.upper],
        },
        "acceptance": {"alpha": chain.acceptance_rate_alpha, "beta": chain.acceptance_rate_beta},
        "N": chain.n_iter,
        "M": chain.burn_in,
        "seed": chain.seed,
    }
