from __future__ import annotations

import math

import numpy as np
import pytest

from lfrhybrid import _kernels
from lfrhybrid import distribution as dist
from lfrhybrid.bayes import (
    McmcConfig,
    PosteriorChain,
    acceptance_probability,
    chain_summary,
    chain_to_csv,
    credible_interval,
    log_posterior,
    run_mh_within_gibbs,
    sel_estimate,
)
from lfrhybrid.censoring import MhcSample
from lfrhybrid.distribution import LfrParams
from lfrhybrid.likelihood import fit_mle, log_likelihood


def test_prior_is_additive(aircraft):
    for a, b in [(0.2, 0.02), (1.3, 4.0), (0.01, 1e-5)]:
        p = LfrParams(a, b)
        diff = log_posterior(p, aircraft) - log_likelihood(p, aircraft)
        assert diff == pytest.approx(-math.log(a) - math.log(b), rel=1e-12)


def test_posterior_has_no_interior_mode(aircraft):
    # 200 x 200 grid: the maximum sits on the small-beta edge, the prior mass
    # there diverging while the likelihood stays bounded away from zero
    a_grid = np.linspace(0.05, 0.6, 200)
    b_grid = np.geomspace(1e-4, 0.1, 200)
    vals = np.array([[log_posterior(LfrParams(a, b), aircraft) for b in b_grid] for a in a_grid])
    _, j = np.unravel_index(np.argmax(vals), vals.shape)
    assert j == 0
    profile = vals.max(axis=0)
    assert np.all(np.diff(profile) < 0)


def test_acceptance_probability():
    assert acceptance_probability(-3.0, -3.0) == 1.0
    assert acceptance_probability(-3.0, -1.0) == 1.0
    assert acceptance_probability(-1.0, -3.0) == pytest.approx(math.exp(-2.0))
    assert acceptance_probability(-1.0, -math.inf) == 0.0


def test_same_seed_identical_chains(aircraft, aircraft_fit):
    c1 = run_mh_within_gibbs(aircraft, McmcConfig(n_iter=3000, burn_in=500, seed=42), mle=aircraft_fit)
    c2 = run_mh_within_gibbs(aircraft, McmcConfig(n_iter=3000, burn_in=500, seed=42))
    assert c1.alpha_draws.tobytes() == c2.alpha_draws.tobytes()
    assert c1.beta_draws.tobytes() == c2.beta_draws.tobytes()
    assert chain_to_csv(c1) == chain_to_csv(c2)
    c3 = run_mh_within_gibbs(aircraft, McmcConfig(n_iter=3000, burn_in=500, seed=43), mle=aircraft_fit)
    assert c3.alpha_draws.tobytes() != c1.alpha_draws.tobytes()


def test_chain_properties(aircraft_chain):
    c = aircraft_chain
    assert c.n_iter == 11000 and len(c.alpha) == 10000
    assert np.all(c.alpha_draws > 0) and np.all(c.beta_draws > 0)
    assert 0 <= c.acceptance_rate_alpha <= 1 and 0 <= c.acceptance_rate_beta <= 1
    assert c.proposal_sd[0] > 0


def test_never_accepts_non_positive_values(aircraft):
    # huge proposal scales make most proposals negative
    cfg = McmcConfig(n_iter=2000, burn_in=0, proposal_sd_alpha=5.0, proposal_sd_beta=5.0, seed=1, init=LfrParams(0.2, 0.02))
    c = run_mh_within_gibbs(aircraft, cfg)
    assert np.all(c.alpha_draws > 0) and np.all(c.beta_draws > 0)


def test_minus_inf_start_rejected():
    s = MhcSample([2.0, 3.0, 4.0], [0, 0, 0], 3)
    cfg = McmcConfig(n_iter=10, burn_in=0, proposal_sd_alpha=0.1, proposal_sd_beta=0.1, init=LfrParams(1e308, 1e308))
    with pytest.raises(ValueError):
        run_mh_within_gibbs(s, cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        McmcConfig(n_iter=100, burn_in=100)
    with pytest.raises(ValueError):
        McmcConfig(proposal_sd_alpha=-1.0)


def test_two_point_detailed_balance(aircraft):
    # force proposals between two states x and y and compare the empirical
    # probability flows pi(x) P(x->y) and pi(y) P(y->x)
    x, y = LfrParams(0.20, 0.03), LfrParams(0.26, 0.03)
    t = np.ascontiguousarray(aircraft.times)
    g = np.ascontiguousarray(aircraft.gaps, dtype=np.int64)
    s = float(aircraft.n_surviving)
    sd = 0.05
    z = (y.alpha - x.alpha) / sd
    rng = np.random.default_rng(0)
    trials = 40_000

    def rate(start, step):
        normals = np.zeros((1, 2))
        normals[0, 0] = step
        hits = 0
        for u in rng.random(trials):
            draws, _, _ = _kernels.mh_within_gibbs(t, g, s, start.alpha, start.beta, sd, sd, normals, np.array([[u, 0.5]]))
            hits += draws[0, 0] != start.alpha
        return hits / trials

    pi_x = math.exp(log_posterior(x, aircraft))
    pi_y = math.exp(log_posterior(y, aircraft))
    flow_xy = pi_x * rate(x, z)
    flow_yx = pi_y * rate(y, -z)
    assert flow_xy == pytest.approx(flow_yx, rel=0.02)


def test_sampler_targets_posterior_when_concentrated():
    # with n = 2000 the posterior is far from the axes, so its mean can be
    # computed on a grid and compared with the chain
    x = dist.sample(LfrParams(2.0, 5.0), np.random.default_rng(17), 2000)
    s = MhcSample.complete(x)
    fit = fit_mle(s)
    se = fit.se
    a_grid = fit.alpha + se[0] * np.linspace(-6, 6, 121)
    b_grid = fit.beta + se[1] * np.linspace(-6, 6, 121)
    lp = np.array([[log_posterior(LfrParams(a, b), s) for b in b_grid] for a in a_grid])
    w = np.exp(lp - lp.max())
    w /= w.sum()
    mean_a = float((w.sum(axis=1) * a_grid).sum())
    mean_b = float((w.sum(axis=0) * b_grid).sum())
    chain = run_mh_within_gibbs(s, McmcConfig(n_iter=41000, burn_in=1000, seed=3), mle=fit)
    sel = sel_estimate(chain)
    assert abs(sel.alpha - mean_a) < 0.1 * se[0]
    assert abs(sel.beta - mean_b) < 0.1 * se[1]


def test_sel_constant_chain():
    c = PosteriorChain.constant(LfrParams(0.3, 0.04), 50)
    assert sel_estimate(c) == LfrParams(0.3, 0.04)
    ci = credible_interval(c, "beta", 0.95)
    assert ci.lower == ci.upper == 0.04


def test_credible_interval_index_rule():
    draws = np.arange(1.0, 101.0)
    c = PosteriorChain.from_draws(draws[::-1], draws)
    ci = credible_interval(c, "alpha", 0.90)
    assert (ci.lower, ci.upper) == (5.0, 95.0)
    ci = credible_interval(c, "beta", 0.95)
    assert (ci.lower, ci.upper) == (3.0, 98.0)
    with pytest.raises(ValueError):
        credible_interval(c, "alpha", 1.0)
    with pytest.raises(ValueError):
        credible_interval(c, "gamma", 0.9)


def test_credible_interval_contains_sel(aircraft_chain):
    sel = sel_estimate(aircraft_chain)
    assert credible_interval(aircraft_chain, "alpha").contains(sel.alpha)
    assert credible_interval(aircraft_chain, "beta").contains(sel.beta)


def test_burn_in_excluded():
    a = np.r_[np.full(10, 100.0), np.ones(90)]
    c = PosteriorChain.from_draws(a, np.ones(100), burn_in=10)
    assert sel_estimate(c).alpha == 1.0


def test_chain_exports(aircraft_chain):
    text = chain_to_csv(aircraft_chain)
    lines = text.splitlines()
    assert lines[0] == "iteration,alpha,beta"
    assert len(lines) == 11001
    doc = chain_summary(aircraft_chain)
    assert doc["N"] == 11000 and doc["M"] == 1000 and doc["seed"] == 0
    assert doc["ci"]["alpha"][0] <= doc["sel"]["alpha"] <= doc["ci"]["alpha"][1]
