"""Bundled real-data fixtures.

``aircraft``
    29 times (operating days) between successive failures of the air
    conditioning equipment of an aircraft.
``leukemia``
    Survival times (years) after diagnosis of 43 patients with a kind of
    leukemia.

Each comes with the multiply Type-II hybrid censored sub-sample used in the
worked examples (23 and 33 observed failures) and the removal scheme that
produces it from the complete data.

The aircraft removal vector is the one that actually yields the reference
23-value sub-sample: ``R = (0,1,0,1,0,0,0,1,0,2,0,1,0,...)``. The vector
usually quoted with that example selects a different subset.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .censoring import CensoringScheme, MhcSample, apply_scheme, read_csv

__all__ = ["DATASETS", "data_path", "complete_times", "scheme", "censored_sample"]

DATASETS = ("aircraft", "leukemia")

# Removal vector printed for the aircraft example; kept for reference only.
QUOTED_AIRCRAFT_REMOVALS = (0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 1) + (0,) * 12


def data_path(filename: str):
    return resources.files("lfrhybrid") / "data" / filename


def _check(name):
    if name not in DATASETS:
        raise KeyError(f"unknown dataset {name!r}; choose from {DATASETS}")


def complete_times(name: str) -> np.ndarray:
    _check(name)
    with resources.as_file(data_path(f"{name}.csv")) as p:
        times, _ = read_csv(p)
    return times


def scheme(name: str) -> CensoringScheme:
    _check(name)
    spec = json.loads(data_path(f"{name}_scheme.json").read_text())
    return CensoringScheme(spec["n"], spec["r"], spec["T"], tuple(spec["removals"]))


def censored_sample(name: str) -> MhcSample:
    """The reference censored sub-sample, built by censoring the complete data."""
    return apply_scheme(complete_times(name), scheme(name))
