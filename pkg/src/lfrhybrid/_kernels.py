"""Compiled log-likelihood kernels shared by the MLE and MCMC code.

With ``x_0 = 0`` and ``L(x) = alpha x + beta x^2 / 2`` the censored
log-likelihood is

    sum_i [log(alpha + beta x_i) - L(x_i)]
  + sum_i R_i [-L(x_{i-1}) + log(1 - exp(-(L(x_i) - L(x_{i-1}))))]
  - n_surv L(x_m)

which is the product of densities, inter-observation masses and the
survivor term written so that no difference of nearly equal survival
probabilities is ever formed.
"""

import math

import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True)
def loglik(alpha, beta, times, gaps, n_surv):
    if not (alpha > 0.0 and beta > 0.0):
        return NEG_INF
    total = 0.0
    prev = 0.0
    lam = 0.0
    for i in range(times.shape[0]):
        x = times[i]
        lam = x * (alpha + 0.5 * beta * x)
        total += math.log(alpha + beta * x) - lam
        r = gaps[i]
        if r > 0:
            delta = lam - prev
            if delta <= 0.0:
                return NEG_INF
            total += r * (math.log(-math.expm1(-delta)) - prev)
        prev = lam
    return total - n_surv * lam


@njit(cache=True)
def loglik_derivatives(alpha, beta, times, gaps, n_surv):
    """Value, gradient (2,) and Hessian (2, 2) in natural parameters."""
    grad = np.zeros(2)
    hess = np.zeros((2, 2))
    total = 0.0
    prev = 0.0
    pu0 = 0.0
    pu1 = 0.0
    lam = 0.0
    u0 = 0.0
    u1 = 0.0
    for i in range(times.shape[0]):
        x = times[i]
        u0 = x
        u1 = 0.5 * x * x
        lam = alpha * u0 + beta * u1
        h = alpha + beta * x
        total += math.log(h) - lam
        grad[0] += 1.0 / h - u0
        grad[1] += x / h - u1
        ih2 = 1.0 / (h * h)
        hess[0, 0] -= ih2
        hess[0, 1] -= x * ih2
        hess[1, 1] -= x * x * ih2
        r = gaps[i]
        if r > 0:
            delta = lam - prev
            if delta <= 0.0:
                grad[:] = np.nan
                hess[:, :] = np.nan
                return NEG_INF, grad, hess
            em = math.expm1(delta)
            d1 = 1.0 / em
            d2 = -1.0 / (em * -math.expm1(-delta))
            w0 = u0 - pu0
            w1 = u1 - pu1
            total += r * (math.log(-math.expm1(-delta)) - prev)
            grad[0] += r * (d1 * w0 - pu0)
            grad[1] += r * (d1 * w1 - pu1)
            hess[0, 0] += r * d2 * w0 * w0
            hess[0, 1] += r * d2 * w0 * w1
            hess[1, 1] += r * d2 * w1 * w1
        prev = lam
        pu0 = u0
        pu1 = u1
    total -= n_surv * lam
    grad[0] -= n_surv * u0
    grad[1] -= n_surv * u1
    hess[1, 0] = hess[0, 1]
    return total, grad, hess


@njit(cache=True)
def mh_within_gibbs(times, gaps, n_surv, alpha0, beta0, sd_alpha, sd_beta, normals, uniforms):
    """Componentwise random-walk Metropolis on the Jeffreys-prior posterior.

    ``normals`` and ``uniforms`` have shape (N, 2) and are drawn by the
    caller so the chain is a pure function of the seed.
    """
    n_iter = normals.shape[0]
    out = np.empty((n_iter, 2))
    a = alpha0
    b = beta0
    cur = loglik(a, b, times, gaps, n_surv) - math.log(a) - math.log(b)
    acc_a = 0
    acc_b = 0
    for j in range(n_iter):
        prop = a + sd_alpha * normals[j, 0]
        if prop > 0.0:
            new = loglik(prop, b, times, gaps, n_surv) - math.log(prop) - math.log(b)
            if math.log(uniforms[j, 0]) < new - cur:
                a = prop
                cur = new
                acc_a += 1
        prop = b + sd_beta * normals[j, 1]
        if prop > 0.0:
            new = loglik(a, prop, times, gaps, n_surv) - math.log(a) - math.log(prop)
            if math.log(uniforms[j, 1]) < new - cur:
                b = prop
                cur = new
                acc_b += 1
        out[j, 0] = a
        out[j, 1] = b
    return out, acc_a, acc_b
