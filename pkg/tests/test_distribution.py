from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from lfrhybrid import distribution as dist
from lfrhybrid.distribution import DomainError, LfrParams

# 40-digit evaluations of the closed forms
PDF_AT_1 = 0.1920013649776859173
CDF_2_5_AT_HALF = 0.8030883247958059499
MEAN_2_5 = 0.3102958189807206594

params_st = st.builds(
    LfrParams,
    st.floats(0.01, 20.0),
    st.floats(1e-6, 50.0),
)


def test_params_validation():
    with pytest.raises(DomainError):
        LfrParams(0.0, 1.0)
    with pytest.raises(DomainError):
        LfrParams(1.0, -1.0)
    with pytest.raises(DomainError):
        LfrParams(float("nan"), 1.0)
    with pytest.raises(DomainError):
        LfrParams(1.0, math.inf)


def test_pdf_at_origin():
    assert dist.pdf(LfrParams(1.0, 1e-12), 0.0) == pytest.approx(1.0, abs=1e-9)
    assert dist.pdf(LfrParams(2.0, 5.0), 0.0) == 2.0


def test_pdf_high_precision_value():
    assert dist.pdf(LfrParams(0.215785, 0.0255161), 1.0) == pytest.approx(PDF_AT_1, rel=1e-14)


def test_cdf_values():
    p = LfrParams(2.0, 5.0)
    assert dist.cdf(p, 0.0) == 0.0
    assert dist.cdf(p, 0.5) == pytest.approx(CDF_2_5_AT_HALF, rel=1e-14)
    assert dist.cdf(LfrParams(1.0, 1e-12), math.log(2)) == pytest.approx(0.5, abs=1e-9)


def test_hazard_and_survival():
    p = LfrParams(2.0, 5.0)
    assert dist.hazard(p, 0.0) == 2.0
    assert dist.hazard(p, 1.0) == 7.0
    assert dist.survival(LfrParams(1.0, 1e-12), math.log(2)) == pytest.approx(0.5, abs=1e-9)
    x = np.linspace(0, 3, 31)
    np.testing.assert_allclose(dist.hazard(p, x), dist.pdf(p, x) / dist.survival(p, x), rtol=1e-12)


def test_domain_errors():
    p = LfrParams(1.0, 1.0)
    for f in (dist.pdf, dist.cdf, dist.survival, dist.hazard):
        with pytest.raises(DomainError):
            f(p, -0.1)
    with pytest.raises(DomainError):
        dist.pdf(p, math.inf)
    for u in (-0.1, 1.0, 1.5):
        with pytest.raises(DomainError):
            dist.quantile(p, u)


def test_array_in_array_out():
    p = LfrParams(1.0, 1.0)
    assert isinstance(dist.pdf(p, 1.0), float)
    assert dist.cdf(p, np.array([0.5, 1.0])).shape == (2,)


@pytest.mark.parametrize("p", [LfrParams(2, 5), LfrParams(0.215785, 0.0255161), LfrParams(1, 1e-12)])
def test_pdf_normalises(p):
    total, _ = integrate.quad(lambda x: dist.pdf(p, x), 0, np.inf, epsabs=1e-12, limit=200)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_pdf_is_cdf_derivative():
    p = LfrParams(2.0, 5.0)
    x = np.linspace(0.01, 1.5, 25)
    h = 1e-6
    fd = (dist.cdf(p, x + h) - dist.cdf(p, x - h)) / (2 * h)
    np.testing.assert_allclose(fd, dist.pdf(p, x), rtol=1e-7)


def test_quantile_fixed_points():
    p = LfrParams(3.0, 2.0)
    assert dist.quantile(p, 0.0) == 0.0
    assert dist.quantile(LfrParams(1.0, 1e-12), 0.5) == pytest.approx(math.log(2), abs=1e-6)


@pytest.mark.parametrize("p", [LfrParams(2, 5), LfrParams(0.215785, 0.0255161), LfrParams(1, 1e-12), LfrParams(1e-3, 40)])
def test_quantile_roundtrip_grid(p):
    u = np.linspace(0.01, 0.99, 99)
    np.testing.assert_allclose(dist.cdf(p, dist.quantile(p, u)), u, atol=1e-8)


def test_quantile_tiny_beta_accuracy():
    # exact root is -log(1-u)/alpha minus a beta-order correction
    p = LfrParams(1.0, 1e-14)
    u = np.array([1e-12, 1e-6, 0.3, 0.999999])
    t = -np.log1p(-u)
    np.testing.assert_allclose(dist.quantile(p, u), t, rtol=1e-12)


@settings(max_examples=200, deadline=None)
@given(params_st, st.floats(1e-10, 1 - 1e-10))
def test_quantile_inverts_cdf(p, u):
    x = dist.quantile(p, u)
    assert x >= 0
    assert dist.cdf(p, x) == pytest.approx(u, rel=1e-9, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(params_st, st.floats(0.0, 50.0), st.floats(0.0, 50.0))
def test_cdf_monotone(p, a, b):
    lo, hi = sorted((a, b))
    assert dist.cdf(p, lo) <= dist.cdf(p, hi)
    assert dist.cdf(p, lo) + dist.survival(p, lo) == pytest.approx(1.0)


def test_sample_deterministic_and_sorted():
    p = LfrParams(2.0, 5.0)
    a = dist.sample(p, np.random.default_rng(7), 5)
    b = dist.sample(p, np.random.default_rng(7), 5)
    assert a.tobytes() == b.tobytes()
    assert np.all(np.diff(a) >= 0)


def test_sample_matches_cdf():
    p = LfrParams(2.0, 5.0)
    x = dist.sample(p, np.random.default_rng(12345), 50_000)
    res = stats.kstest(x, lambda v: dist.cdf(p, v))
    assert res.pvalue > 0.01


def test_sample_mean_matches_survival_integral():
    p = LfrParams(2.0, 5.0)
    x = dist.sample(p, np.random.default_rng(99), 1_000_000)
    mean, _ = integrate.quad(lambda v: dist.survival(p, v), 0, np.inf)
    assert mean == pytest.approx(MEAN_2_5, rel=1e-8)
    assert x.mean() == pytest.approx(mean, rel=0.01)
