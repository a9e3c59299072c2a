"""Monte Carlo study of the MLE and Bayes estimators under hybrid censoring.

Each replication draws a complete LFR sample, censors it, fits the MLE with
its Wald intervals and runs the MCMC sampler for squared-error-loss
estimates and credible intervals. Aggregates are mean estimate, mean squared
error, average interval length and coverage probability of the true value.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .bayes import McmcConfig, credible_interval, run_mh_within_gibbs, sel_estimate
from .censoring import CensoringScheme, InfeasibleSchemeError, apply_scheme
from .distribution import LfrParams, sample
from .likelihood import SingularInformationError, NonPositiveDefiniteError, confidence_intervals, fit_mle

__all__ = [
    "StudyConfig",
    "EstimatorSummary",
    "StudyResult",
    "Replication",
    "replication_seeds",
    "replicate",
    "run_study",
    "emit_study_table",
    "standard_grid",
]

log = logging.getLogger(__name__)

FAILURE_WARN_FRACTION = 0.2
METHODS = ("mle", "bayes")
PARAMS = ("alpha", "beta")


@dataclass(frozen=True)
class StudyConfig:
    """One cell of the study grid.

    ``removals`` maps 1-based positions to ``R_i`` (all others zero) and
    ``a_r`` is the complete-sample position of the r-th retained failure.
    """

    n: int
    T: float
    removals: dict = field(default_factory=dict)
    a_r: int = 1
    true_params: LfrParams = LfrParams(2.0, 5.0)
    replications: int = 1000
    seed: int = 0
    mcmc: McmcConfig = McmcConfig()
    level: float = 0.95

    def __post_init__(self):
        if self.n < 2 or self.replications < 1:
            raise ValueError("n must be >= 2 and replications >= 1")
        object.__setattr__(self, "removals", {int(k): int(v) for k, v in self.removals.items()})
        self.scheme()

    def scheme(self) -> CensoringScheme:
        return CensoringScheme.from_index(self.n, self.a_r, self.T, self.removals)

    @property
    def scheme_label(self) -> str:
        return " ".join(f"R{k}={v}" for k, v in sorted(self.removals.items())) or "none"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["removals"] = {str(k): v for k, v in self.removals.items()}
        d["mcmc"] = {"n_iter": self.mcmc.n_iter, "burn_in": self.mcmc.burn_in}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        d = dict(d)
        tp = d.pop("true_params", None)
        mc = d.pop("mcmc", None) or {}
        kw = {}
        if tp is not None:
            kw["true_params"] = LfrParams(float(tp["alpha"]), float(tp["beta"]))
        if mc:
            kw["mcmc"] = McmcConfig(n_iter=int(mc.get("n_iter", 11000)), burn_in=int(mc.get("burn_in", 1000)))
        removals = {int(k): int(v) for k, v in (d.pop("removals", None) or {}).items()}
        return cls(removals=removals, **d, **kw)


@dataclass(frozen=True)
class Replication:
    """Outcome of one replication; ``estimates`` is ``None`` on failure."""

    index: int
    estimates: dict | None
    reason: str = ""


@dataclass(frozen=True)
class EstimatorSummary:
    mean_estimate: float
    mse: float
    mse_se: float
    acil: float
    cp: float


@dataclass
class StudyResult:
    config: StudyConfig
    summary: dict  # (method, param) -> EstimatorSummary
    replications_used: int
    failures: int
    estimates: dict = field(repr=False, default_factory=dict)

    @property
    def warning(self) -> bool:
        total = self.replications_used + self.failures
        return self.failures > FAILURE_WARN_FRACTION * total

    def __getitem__(self, key) -> EstimatorSummary:
        return self.summary[key]

    def mean_abs_difference(self, param: str) -> float:
        """Mean |MLE - SEL| over replications."""
        return float(np.mean(np.abs(self.estimates[("mle", param)] - self.estimates[("bayes", param)])))


def replication_seeds(config: StudyConfig) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(config.seed).spawn(config.replications)


def replicate(config: StudyConfig, index: int, seed_seq: np.random.SeedSequence | None = None) -> Replication:
    """Run replication ``index`` of the study."""
    if seed_seq is None:
        seed_seq = replication_seeds(config)[index]
    data_ss, mcmc_ss = seed_seq.spawn(2)
    rng = np.random.default_rng(data_ss)
    truth = config.true_params
    x = sample(truth, rng, config.n)
    try:
        cens = apply_scheme(x, config.scheme())
        fit = fit_mle(cens)
        if not fit.converged:
            return Replication(index, None, "mle-not-converged")
        ci = confidence_intervals(fit, 1.0 - config.level)
        mc_seed = int(mcmc_ss.generate_state(1, np.uint64)[0])
        chain = run_mh_within_gibbs(cens, replace(config.mcmc, seed=mc_seed), mle=fit)
    except (InfeasibleSchemeError, SingularInformationError, NonPositiveDefiniteError, ValueError) as exc:
        return Replication(index, None, type(exc).__name__)
    sel = sel_estimate(chain)
    est = {}
    for j, p in enumerate(PARAMS):
        cred = credible_interval(chain, p, config.level)
        est[("mle", p)] = (getattr(fit.params, p), ci[j].lower, ci[j].upper)
        est[("bayes", p)] = (getattr(sel, p), cred.lower, cred.upper)
    return Replication(index, est)


def _run_chunk(args):
    config, indices, seeds = args
    return [replicate(config, i, s) for i, s in zip(indices, seeds)]


def _summarise(config: StudyConfig, reps: list[Replication]) -> StudyResult:
    ok = [r for r in reps if r.estimates is not None]
    summary, raw = {}, {}
    for method in METHODS:
        for j, p in enumerate(PARAMS):
            truth = getattr(config.true_params, p)
            arr = np.array([r.estimates[(method, p)] for r in ok]).reshape(-1, 3)
            est, lo, hi = arr.T
            sq = (est - truth) ** 2
            k = len(est)
            summary[(method, p)] = EstimatorSummary(
                mean_estimate=float(est.mean()) if k else math.nan,
                mse=float(sq.mean()) if k else math.nan,
                mse_se=float(sq.std(ddof=1) / math.sqrt(k)) if k > 1 else math.nan,
                acil=float((hi - lo).mean()) if k else math.nan,
                cp=float(((lo <= truth) & (truth <= hi)).mean()) if k else math.nan,
            )
            raw[(method, p)] = est
    result = StudyResult(config, summary, len(ok), len(reps) - len(ok), raw)
    if result.warning:
        log.warning("%d of %d replications failed", result.failures, len(reps))
    return result


def run_study(config: StudyConfig, workers: int = 1, progress: bool = False) -> StudyResult:
    """Run all replications and aggregate.

    Replication ``i`` always uses the i-th child of ``SeedSequence(seed)``, so
    the result does not depend on ``workers``.
    """
    seeds = replication_seeds(config)
    idx = list(range(config.replications))
    if workers <= 1:
        reps = []
        for i in idx:
            reps.append(replicate(config, i, seeds[i]))
            if progress and (i + 1) % 100 == 0:
                print(f"  {i + 1}/{config.replications}", file=sys.stderr)
    else:
        chunks = [(config, idx[k::workers], seeds[k::workers]) for k in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
        reps = sorted((r for part in parts for r in part), key=lambda r: r.index)
    return _summarise(config, reps)


_COLUMNS = ["n", "T", "scheme", "a_r"] + [
    f"{p}_{m}_{stat}" for p in PARAMS for m in METHODS for stat in ("mean", "mse", "acil", "cp")
] + ["used", "failures"]


def _row(res: StudyResult) -> list:
    c = res.config
    row = [c.n, c.T, c.scheme_label, c.a_r]
    for p in PARAMS:
        for m in METHODS:
            s = res.summary[(m, p)]
            row += [s.mean_estimate, s.mse, s.acil, s.cp]
    return row + [res.replications_used, res.failures]


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4f}" if math.isfinite(v) else "nan"
    return str(v)


def emit_study_table(results: list[StudyResult], format: str = "csv") -> str:
    """Render study results as ``"csv"`` (default) or aligned ``"text"``."""
    if not results:
        raise ValueError("no results to render")
    format = format or "csv"
    rows = [[_fmt(v) for v in _row(r)] for r in results]
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_COLUMNS)
        w.writerows(rows)
        return buf.getvalue()
    if format in ("text", "table"):
        widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(_COLUMNS)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(_COLUMNS, widths))]
        lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")


def standard_grid(replications: int = 1000, seed: int = 0, mcmc: McmcConfig = McmcConfig()) -> list[StudyConfig]:
    """The twelve reference (n, T, scheme, a_r) cells, in their customary order."""
    cells = []
    for n, removals, a_rs in ((30, {2: 2, 5: 1}, (10, 18, 25)), (40, {4: 2, 9: 1}, (18, 30, 35))):
        for T in (3.0, 5.0):
            for a_r in a_rs:
                cells.append(StudyConfig(n, T, removals, a_r, LfrParams(2.0, 5.0), replications, seed, mcmc))
    return cells
