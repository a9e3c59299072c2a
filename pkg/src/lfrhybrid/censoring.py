"""Multiply Type-II hybrid censored samples.

A complete ordered sample of ``n`` lifetimes is reduced in two ways. A
removal pattern ``R_1, R_2, ...`` says how many order statistics go
unrecorded immediately before each retained one, and the test stops at
``max(x_{a_r:n}, T)`` where ``a_r`` is the position of the r-th retained
failure.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "CensoringScheme",
    "MhcSample",
    "ValidationReport",
    "InfeasibleSchemeError",
    "InvalidSampleError",
    "ParseError",
    "apply_scheme",
    "validate",
    "require_valid",
    "read_csv",
    "sample_from_json",
    "sample_to_json",
]


class InfeasibleSchemeError(ValueError):
    """Removals exhaust the sample before ``r`` failures are retained."""


class InvalidSampleError(ValueError):
    """A censored sample breaks one of its structural invariants."""


class ParseError(ValueError):
    """Input data could not be parsed."""


@dataclass(frozen=True)
class CensoringScheme:
    """Design of a multiply Type-II hybrid censored life test.

    Parameters
    ----------
    n : int
        Units placed on test.
    r : int
        Pre-determined number of retained failures.
    T : float
        Pre-specified termination time (``math.inf`` disables it).
    removals : tuple of int
        ``R_1, R_2, ...``; positions past the end of the tuple are zero.
    """

    n: int
    r: int
    T: float
    removals: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "removals", tuple(int(v) for v in self.removals))
        if not 1 <= self.r <= self.n:
            raise ValueError(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if not self.T > 0:
            raise ValueError("T must be > 0")
        if any(v < 0 for v in self.removals):
            raise ValueError("removal counts must be >= 0")
        if self.r + sum(self.removals[: self.r]) > self.n:
            raise InfeasibleSchemeError("r + sum(R_1..R_r) exceeds n")

    def removal(self, i: int) -> int:
        """``R_i`` with 1-based ``i``."""
        return self.removals[i - 1] if i <= len(self.removals) else 0

    @classmethod
    def from_sparse(cls, n, r, T, sparse: dict[int, int]) -> "CensoringScheme":
        """Build from ``{i: R_i}`` with all other ``R_i`` zero."""
        if not sparse:
            return cls(n, r, T, ())
        k = max(sparse)
        return cls(n, r, T, tuple(int(sparse.get(i, 0)) for i in range(1, k + 1)))

    @classmethod
    def from_index(cls, n, a_r, T, sparse: dict[int, int]) -> "CensoringScheme":
        """Build from ``a_r``, the complete-sample position of the r-th retained failure."""
        pos = 0
        for i in range(1, n + 1):
            pos += sparse.get(i, 0) + 1
            if pos == a_r:
                return cls.from_sparse(n, i, T, sparse)
            if pos > a_r:
                break
        raise InfeasibleSchemeError(f"position {a_r} is an unrecorded failure under {sparse}")


@dataclass(frozen=True)
class MhcSample:
    """Observed part of a multiply Type-II hybrid censored test.

    ``times[i]`` is ``x_{a_{i+1}:n}`` and ``gaps[i]`` is ``R_{i+1}``, the number
    of unrecorded failures between it and the previous observation. ``case``
    is ``"I"`` (stopped at T), ``"II"`` (stopped at the r-th failure) or
    ``None`` when the termination branch is unknown.
    """

    times: np.ndarray
    gaps: np.ndarray
    n: int
    case: str | None = None

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        g = np.array(self.gaps, dtype=np.int64) if len(self.gaps) else np.zeros(0, np.int64)
        t.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "gaps", g)
        object.__setattr__(self, "n", int(self.n))

    @property
    def m(self) -> int:
        return len(self.times)

    @property
    def a_m(self) -> int:
        """Complete-sample position of the last observed failure."""
        return int(self.m + self.gaps.sum())

    @property
    def n_surviving(self) -> int:
        """Units still running at the last observed failure, ``n - a_m``."""
        return self.n - self.a_m

    @classmethod
    def complete(cls, times: Iterable[float]) -> "MhcSample":
        t = np.sort(np.asarray(list(times), dtype=float))
        return cls(t, np.zeros(len(t), dtype=np.int64), len(t), None)

    def __eq__(self, other):
        if not isinstance(other, MhcSample):
            return NotImplemented
        return (
            self.n == other.n
            and self.case == other.case
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.gaps, other.gaps)
        )

    __hash__ = None


def apply_scheme(complete: Sequence[float], scheme: CensoringScheme) -> MhcSample:
    """Censor an ordered complete sample according to ``scheme``.

    Removals are positional: ``R_i`` order statistics are skipped before the
    i-th retained one. If the r-th retained failure is at or after ``T`` the
    test stops there (Case II, ``m = r``); otherwise every retained failure
    not exceeding ``T`` is kept (Case I, ``m = d >= r``).
    """
    x = np.asarray(complete, dtype=float)
    if x.ndim != 1 or len(x) != scheme.n:
        raise ValueError(f"expected {scheme.n} complete times, got {len(x)}")
    if np.any(np.diff(x) < 0):
        raise ValueError("complete sample must be sorted ascending")

    positions, gaps = [], []
    pos, i = 0, 1
    while True:
        g = scheme.removal(i)
        pos += g + 1
        if pos > scheme.n:
            break
        positions.append(pos - 1)
        gaps.append(g)
        i += 1
    if len(positions) < scheme.r:
        raise InfeasibleSchemeError(
            f"only {len(positions)} failures retained before removals exhaust n={scheme.n}; r={scheme.r}"
        )

    retained = x[positions]
    if retained[scheme.r - 1] >= scheme.T:
        m, case = scheme.r, "II"
    else:
        m, case = int(np.searchsorted(retained, scheme.T, side="right")), "I"
    return MhcSample(retained[:m], np.asarray(gaps[:m]), scheme.n, case)


@dataclass
class ValidationReport:
    checks: list[tuple[str, bool, str]]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    @property
    def failures(self) -> list[str]:
        return [msg for _, passed, msg in self.checks if not passed]

    def __bool__(self):
        return self.ok


def validate(sample: MhcSample) -> ValidationReport:
    """Check every structural invariant of ``sample`` without raising."""
    t, g = sample.times, sample.gaps
    checks = []

    def add(name, passed, msg):
        checks.append((name, bool(passed), "ok" if passed else msg))

    add("length", len(t) == len(g), f"{len(t)} times but {len(g)} gaps")
    add("min_size", len(t) >= 2, "m >= 2 required")
    add("finite", np.all(np.isfinite(t)), "non-finite time")
    add("positive", np.all(t > 0), "times must be > 0")
    add("ordered", np.all(np.diff(t) >= 0), "times must be non-decreasing")
    add("gap_sign", np.all(g >= 0), "negative gap")
    a_m = len(t) + int(g.sum()) if len(t) == len(g) else -1
    add("a_m", 0 <= a_m <= sample.n, f"a_m = m + sum(R) = {a_m} exceeds n = {sample.n}")
    if len(t) == len(g) and len(t) >= 2:
        tied = (np.diff(t) == 0) & (g[1:] > 0)
        add("gap_mass", not np.any(tied), "unrecorded failures between tied observations have zero probability")
    return ValidationReport(checks)


def require_valid(sample: MhcSample) -> MhcSample:
    report = validate(sample)
    if not report.ok:
        raise InvalidSampleError("; ".join(report.failures))
    return sample


def _parse_rows(rows: list[list[str]]):
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("no data rows")
    header = [c.strip().lower() for c in rows[0]]
    try:
        float(header[0])
        names = ["time", "gap"][: len(rows[0])]
    except ValueError:
        names, rows = header, rows[1:]
    if "time" not in names:
        raise ParseError(f"no 'time' column in header {names}")
    ti = names.index("time")
    gi = names.index("gap") if "gap" in names else None
    times, gaps = [], []
    for lineno, row in enumerate(rows, start=2):
        try:
            v = float(row[ti])
            if not math.isfinite(v):
                raise ValueError
            times.append(v)
            if gi is not None:
                gv = float(row[gi])
                if gv != int(gv):
                    raise ValueError
                gaps.append(int(gv))
        except (ValueError, IndexError):
            raise ParseError(f"row {lineno}: cannot parse {row!r}") from None
    if not times:
        raise ParseError("no data rows")
    return np.asarray(times), (np.asarray(gaps, dtype=np.int64) if gi is not None else None)


def read_csv(source) -> tuple[np.ndarray, np.ndarray | None]:
    """Read one time per row, with an optional ``gap`` column.

    Returns ``(times, gaps)`` where ``gaps`` is ``None`` for complete data.
    ``source`` is a path or a file-like object.
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return _parse_rows(list(csv.reader(fh)))
    return _parse_rows(list(csv.reader(io.StringIO(source.read()))))


def sample_to_json(sample: MhcSample) -> dict:
    return {
        "times": [float(v) for v in sample.times],
        "gaps": [int(v) for v in sample.gaps],
        "n": sample.n,
        "case": sample.case,
    }


def sample_from_json(obj: dict | str) -> MhcSample:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        times = [float(v) for v in obj["times"]]
        gaps = [int(v) for v in obj.get("gaps", [0] * len(times))]
        n = int(obj.get("n", len(times) + sum(gaps)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad sample JSON: {exc}") from None
    case = obj.get("case")
    if case not in (None, "I", "II"):
        raise ParseError(f"case must be 'I', 'II' or null, got {case!r}")
    return MhcSample(times, gaps, n, case)
