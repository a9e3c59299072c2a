from __future__ import annotations

import numpy as np
import pytest

from lfrhybrid import datasets
from lfrhybrid.bayes import McmcConfig, run_mh_within_gibbs
from lfrhybrid.likelihood import fit_mle


@pytest.fixture(scope="session")
def aircraft():
    return datasets.censored_sample("aircraft")


@pytest.fixture(scope="session")
def leukemia():
    return datasets.censored_sample("leukemia")


@pytest.fixture(scope="session")
def aircraft_fit(aircraft):
    return fit_mle(aircraft)


@pytest.fixture(scope="session")
def aircraft_chain(aircraft, aircraft_fit):
    return run_mh_within_gibbs(aircraft, McmcConfig(seed=0), mle=aircraft_fit)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
