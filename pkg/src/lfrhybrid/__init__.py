"""Linear failure rate lifetimes under multiply Type-II hybrid censoring.

Maximum likelihood and Bayesian (MCMC) estimation, two-sample prediction of
future order statistics, Kolmogorov-Smirnov goodness of fit and a Monte Carlo
study engine.
"""

from __future__ import annotations

from .bayes import McmcConfig, PosteriorChain, credible_interval, run_mh_within_gibbs, sel_estimate
from .censoring import CensoringScheme, MhcSample, apply_scheme, validate
from .distribution import DomainError, LfrParams
from .gof import GofReport, ks_test
from .likelihood import MleFit, confidence_intervals, fit_mle, log_likelihood
from .prediction import PredictionResult, predict, prediction_interval, point_predictor
from .simulation import StudyConfig, StudyResult, run_study

__all__ = [
    "LfrParams",
    "DomainError",
    "CensoringScheme",
    "MhcSample",
    "apply_scheme",
    "validate",
    "MleFit",
    "log_likelihood",
    "fit_mle",
    "confidence_intervals",
    "McmcConfig",
    "PosteriorChain",
    "run_mh_within_gibbs",
    "sel_estimate",
    "credible_interval",
    "PredictionResult",
    "point_predictor",
    "prediction_interval",
    "predict",
    "GofReport",
    "ks_test",
    "StudyConfig",
    "StudyResult",
    "run_study",
]
