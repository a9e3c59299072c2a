from __future__ import annotations

import io

import numpy as np
import pytest

from lfrhybrid import datasets
from lfrhybrid.censoring import (
    CensoringScheme,
    InfeasibleSchemeError,
    InvalidSampleError,
    MhcSample,
    ParseError,
    apply_scheme,
    read_csv,
    require_valid,
    sample_from_json,
    sample_to_json,
    validate,
)


def _reference(name):
    with datasets.data_path(f"{name}_censored.csv").open() as fh:
        return read_csv(fh)


@pytest.mark.parametrize("name, m, n", [("aircraft", 23, 29), ("leukemia", 33, 43)])
def test_scheme_reproduces_reference_subsample(name, m, n):
    sample = datasets.censored_sample(name)
    times, gaps = _reference(name)
    assert sample.m == m and sample.n == n
    np.testing.assert_array_equal(sample.times, times)
    np.testing.assert_array_equal(sample.gaps, gaps)
    assert sample.case == "I"


def test_aircraft_validation_counts(aircraft):
    report = validate(aircraft)
    assert report.ok
    assert aircraft.gaps.sum() == 6
    assert aircraft.a_m == 29
    assert aircraft.n_surviving == 0


def test_no_censoring_returns_complete_sample():
    x = np.sort(np.random.default_rng(1).exponential(size=12))
    s = apply_scheme(x, CensoringScheme(12, 12, x[-1] + 1.0, ()))
    np.testing.assert_array_equal(s.times, x)
    assert not s.gaps.any()


def test_case_two_stops_at_rth_failure():
    x = np.arange(1.0, 11.0)
    s = apply_scheme(x, CensoringScheme.from_sparse(10, 3, 2.5, {2: 1}))
    # retained positions 1, 3, 4; the third is at 4.0 >= T
    assert s.case == "II"
    np.testing.assert_array_equal(s.times, [1.0, 3.0, 4.0])
    np.testing.assert_array_equal(s.gaps, [0, 1, 0])


def test_case_one_continues_to_T():
    x = np.arange(1.0, 11.0)
    s = apply_scheme(x, CensoringScheme.from_sparse(10, 2, 6.5, {2: 1}))
    assert s.case == "I"
    np.testing.assert_array_equal(s.times, [1.0, 3.0, 4.0, 5.0, 6.0])
    assert s.n_surviving == 4


def test_infeasible_scheme():
    with pytest.raises(InfeasibleSchemeError):
        CensoringScheme(5, 4, 1.0, (0, 2))
    with pytest.raises(InfeasibleSchemeError):
        CensoringScheme.from_index(30, 2, 3.0, {2: 2})


def test_from_index():
    s = CensoringScheme.from_index(30, 10, 3.0, {2: 2, 5: 1})
    assert s.r == 7
    assert s.removal(2) == 2 and s.removal(5) == 1 and s.removal(3) == 0


def test_validation_messages():
    bad_gap = MhcSample([1.0, 2.0, 3.0], [0, -1, 0], 5)
    assert "negative gap" in validate(bad_gap).failures
    single = MhcSample([1.0], [0], 3)
    assert "m >= 2 required" in validate(single).failures
    too_many = MhcSample([1.0, 2.0], [3, 3], 5)
    assert any("exceeds n" in f for f in validate(too_many).failures)
    with pytest.raises(InvalidSampleError):
        require_valid(single)


def test_tied_observations_with_gap_flagged():
    s = MhcSample([1.0, 1.0, 2.0], [0, 1, 0], 4)
    assert not validate(s).ok
    assert validate(MhcSample([1.0, 1.0, 2.0], [0, 0, 1], 4)).ok


def test_sample_is_read_only():
    s = MhcSample([1.0, 2.0], [0, 0], 2)
    with pytest.raises(ValueError):
        s.times[0] = 3.0


def test_read_csv_variants():
    t, g = read_csv(io.StringIO("time\n1.5\n2.5\n"))
    np.testing.assert_array_equal(t, [1.5, 2.5])
    assert g is None
    t, g = read_csv(io.StringIO("time,gap\n1.5,0\n2.5,2\n"))
    np.testing.assert_array_equal(g, [0, 2])
    t, g = read_csv(io.StringIO("1\n2\n"))
    np.testing.assert_array_equal(t, [1.0, 2.0])


@pytest.mark.parametrize("text", ["", "time\n", "time\nx\n", "value\n1\n", "time,gap\n1,0.5\n", "time\nnan\n"])
def test_read_csv_rejects(text):
    with pytest.raises(ParseError):
        read_csv(io.StringIO(text))


def test_json_roundtrip(aircraft):
    assert sample_from_json(sample_to_json(aircraft)) == aircraft
    with pytest.raises(ParseError):
        sample_from_json({"gaps": [0]})


def test_quoted_aircraft_vector_selects_other_subset():
    s = datasets.scheme("aircraft")
    quoted = CensoringScheme(s.n, s.r, s.T, datasets.QUOTED_AIRCRAFT_REMOVALS[: s.r])
    other = apply_scheme(datasets.complete_times("aircraft"), quoted)
    times, _ = _reference("aircraft")
    assert not np.array_equal(other.times, times)
