"""Command-line interface: ``lfrhybrid {fit,bayes,predict,gof,simulate}``.

Input files are CSV with a ``time`` column and, for already censored data, a
``gap`` column holding the number of unrecorded failures before each time.
A bare name such as ``aircraft.csv`` that does not exist on disk resolves to
the bundled dataset of that name. ``--scheme`` takes a JSON file with keys
``n``, ``r``, ``T`` and ``removals`` (a list, or a ``{position: count}``
mapping), or the name of a bundled dataset whose scheme should be used.

Exit codes: 0 success, 2 parse or invalid input, 3 infeasible scheme,
4 non-convergence, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import datasets
from .bayes import McmcConfig, PosteriorChain, chain_summary, chain_to_csv, run_mh_within_gibbs
from .censoring import (
    CensoringScheme,
    InfeasibleSchemeError,
    InvalidSampleError,
    MhcSample,
    ParseError,
    apply_scheme,
    read_csv,
)
from .distribution import DomainError, LfrParams
from .gof import ks_test, plot_data
from .likelihood import MleFit, SingularInformationError, confidence_intervals, fit_mle
from .prediction import QuadratureError, prediction_table
from .simulation import StudyConfig, emit_study_table, run_study, standard_grid

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_NONCONVERGENCE = 4
EXIT_IO = 5

THREADS_ENV = "LFRHYBRID_THREADS"


class NonConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------- inputs


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = datasets.data_path(p.name)
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"no such file: {path}")


def load_scheme(spec: str) -> CensoringScheme:
    """Scheme from a JSON file or a bundled dataset name."""
    name = Path(spec).stem if not Path(spec).exists() else None
    if name is not None:
        name = name.replace("_scheme", "")
        if name in datasets.DATASETS:
            return datasets.scheme(name)
    try:
        obj = json.loads(_resolve(spec).read_text())
        removals = obj.get("removals", [])
        if isinstance(removals, dict):
            sparse = {int(k): int(v) for k, v in removals.items()}
            return CensoringScheme.from_sparse(int(obj["n"]), int(obj["r"]), float(obj["T"]), sparse)
        return CensoringScheme(int(obj["n"]), int(obj["r"]), float(obj["T"]), tuple(int(v) for v in removals))
    except json.JSONDecodeError as exc:
        raise ParseError(f"scheme file is not valid JSON: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InfeasibleSchemeError):
            raise
        raise ParseError(f"scheme file needs n, r, T and removals: {exc}") from None


def load_sample(args) -> tuple[np.ndarray, MhcSample]:
    """Return the raw times and the sample to analyse."""
    times, gaps = read_csv(_resolve(args.input))
    if gaps is None and args.scheme:
        scheme = load_scheme(args.scheme)
        return times, apply_scheme(np.sort(times), scheme)
    if gaps is None:
        return times, MhcSample.complete(np.sort(times))
    n = args.n
    if n is None and args.scheme:
        n = load_scheme(args.scheme).n
    if n is None:
        n = len(times) + int(gaps.sum())
    return times, MhcSample(times, gaps, int(n))


def _mcmc_config(args) -> McmcConfig:
    return McmcConfig(
        n_iter=args.iterations,
        burn_in=args.burn_in,
        proposal_sd_alpha=args.proposal_sd_alpha,
        proposal_sd_beta=args.proposal_sd_beta,
        seed=args.seed,
    )


def _converged_fit(sample: MhcSample) -> MleFit:
    fit = fit_mle(sample)
    if not fit.converged:
        raise NonConvergenceError(
            f"Newton-Raphson did not converge (score norm {fit.score_norm:.3g} after {fit.iterations} iterations)"
        )
    return fit


def _chain(args, sample: MhcSample) -> PosteriorChain:
    if getattr(args, "chain", None):
        return _read_chain(_resolve(args.chain), args.burn_in)
    fit = _converged_fit(sample)
    return run_mh_within_gibbs(sample, _mcmc_config(args), mle=fit)


def _read_chain(path: Path, burn_in: int) -> PosteriorChain:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        a = [float(r["alpha"]) for r in rows]
        b = [float(r["beta"]) for r in rows]
    except (KeyError, ValueError) as exc:
        raise ParseError(f"chain file needs alpha and beta columns: {exc}") from None
    if burn_in >= len(a):
        burn_in = 0
    return PosteriorChain.from_draws(a, b, burn_in)


# --------------------------------------------------------------- outputs


def _num(v):
    if isinstance(v, float):
        return f"{v:.6g}" if math.isfinite(v) else "nan"
    return str(v)


def render_rows(rows: list[dict], fmt: str) -> str:
    """Render a list of flat records as JSON, CSV or an aligned table."""
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    cols = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        return buf.getvalue()
    cells = [[_num(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None):
    # built in full before writing so a failure never leaves partial output
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def fit_document(fit: MleFit, level: float) -> dict:
    ci_a, ci_b = confidence_intervals(fit, 1.0 - level)
    return {
        "alpha": fit.alpha,
        "beta": fit.beta,
        "loglik": fit.loglik,
        "cov": fit.cov.tolist(),
        "ci": {"level": level, "alpha": [ci_a.lower, ci_a.upper], "beta": [ci_b.lower, ci_b.upper]},
        "converged": fit.converged,
        "iterations": fit.iterations,
    }


# -------------------------------------------------------------- commands


def cmd_fit(args) -> str:
    _, sample = load_sample(args)
    doc = fit_document(_converged_fit(sample), args.level)
    if args.format == "json":
        return json.dumps(doc, indent=2) + "\n"
    rows = [
        {"parameter": p, "estimate": doc[p], "lower": doc["ci"][p][0], "upper": doc["ci"][p][1]}
        for p in ("alpha", "beta")
    ]
    return render_rows(rows, args.format)


def cmd_bayes(args) -> str:
    _, sample = load_sample(args)
    chain = _chain(args, sample)
    if args.chain_output:
        Path(args.chain_output).write_text(chain_to_csv(chain))
    doc = chain_summary(chain, args.level)
    if args.format == "json":
        return json.dumps(doc, indent=2) + "\n"
    rows = [
        {
            "parameter": p,
            "sel": doc["sel"][p],
            "lower": doc["ci"][p][0],
            "upper": doc["ci"][p][1],
            "acceptance": doc["acceptance"][p],
        }
        for p in ("alpha", "beta")
    ]
    return render_rows(rows, args.format)


def _ranks(spec: list[str] | None, m: int):
    if not spec:
        return list(range(1, m + 1))
    out = []
    for item in spec:
        for part in item.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    return out


def cmd_predict(args) -> str:
    _, sample = load_sample(args)
    chain = _chain(args, sample)
    try:
        ranks = _ranks(args.rank, args.future_size)
    except ValueError:
        raise ParseError(f"cannot parse ranks {args.rank}") from None
    table = prediction_table(chain, args.future_size, args.level, ranks)
    rows = [
        {"s": r.s, "point": r.point, "lower": r.lower, "upper": r.upper, "length": r.length} for r in table
    ]
    return render_rows(rows, args.format)


def cmd_gof(args) -> str:
    times, _ = load_sample(args)
    report = ks_test(times, method=args.method)
    if args.plot_output:
        rows = plot_data(times, report.fitted)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "ecdf", "fitted_survival"])
        w.writerows([[repr(x), repr(e), repr(s)] for x, e, s in rows])
        Path(args.plot_output).write_text(buf.getvalue())
    doc = {
        "n": report.n,
        "alpha": report.fitted.alpha,
        "beta": report.fitted.beta,
        "ks_distance": report.ks_distance,
        "p_value": report.p_value,
        "method": report.method,
    }
    if args.format == "json":
        return json.dumps(doc, indent=2) + "\n"
    return render_rows([doc], args.format)


def _parse_removals(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        k, _, v = part.partition(":")
        out[int(k)] = int(v)
    return out


def _study_configs(args) -> list[StudyConfig]:
    mcmc = McmcConfig(n_iter=args.iterations, burn_in=args.burn_in)
    if args.grid:
        cells = standard_grid(args.replications, args.seed, mcmc)
        return [replace(c, level=args.level) for c in cells]
    if args.study:
        obj = json.loads(_resolve(args.study).read_text())
        items = obj if isinstance(obj, list) else [obj]
        return [StudyConfig.from_dict(d) for d in items]
    if args.n is None or args.T is None or args.a_r is None:
        raise ParseError("simulate needs --grid, --study FILE, or --n, --T and --a-r")
    try:
        removals = _parse_removals(args.removals)
    except ValueError:
        raise ParseError(f"cannot parse removals {args.removals!r}; expected e.g. 2:2,5:1") from None
    return [
        StudyConfig(
            n=args.n,
            T=args.T,
            removals=removals,
            a_r=args.a_r,
            true_params=LfrParams(args.alpha0, args.beta0),
            replications=args.replications,
            seed=args.seed,
            mcmc=mcmc,
            level=args.level,
        )
    ]


def cmd_simulate(args) -> str:
    results = []
    for cfg in _study_configs(args):
        res = run_study(cfg, workers=args.workers, progress=args.progress)
        if res.warning:
            print(f"warning: {res.failures} of {cfg.replications} replications failed", file=sys.stderr)
        results.append(res)
    if args.format == "json":
        docs = []
        for r in results:
            docs.append(
                {
                    "config": r.config.to_dict(),
                    "replications_used": r.replications_used,
                    "failures": r.failures,
                    "warning": r.warning,
                    "summary": {
                        f"{m}_{p}": vars(s) for (m, p), s in sorted(r.summary.items())
                    },
                }
            )
        return json.dumps(docs, indent=2) + "\n"
    return emit_study_table(results, "csv" if args.format == "csv" else "text")


COMMANDS = {
    "fit": cmd_fit,
    "bayes": cmd_bayes,
    "predict": cmd_predict,
    "gof": cmd_gof,
    "simulate": cmd_simulate,
}


# ---------------------------------------------------------------- parser


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option values; overrides command-line flags")
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--output", help="write the primary output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--level", type=float, default=0.95, help="interval coverage (default 0.95)")
    common.add_argument("-v", "--verbose", action="store_true")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", required=True, help="CSV of times (optionally with a gap column)")
    data.add_argument("--scheme", help="scheme JSON file or bundled dataset name")
    data.add_argument("--n", type=int, help="initial sample size for pre-censored input")

    mcmc = argparse.ArgumentParser(add_help=False)
    mcmc.add_argument("--iterations", type=int, default=11000, help="chain length N")
    mcmc.add_argument("--burn-in", type=int, default=1000, help="burn-in M")
    mcmc.add_argument("--proposal-sd-alpha", type=float)
    mcmc.add_argument("--proposal-sd-beta", type=float)

    parser = argparse.ArgumentParser(prog="lfrhybrid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("fit", parents=[common, data], help="maximum likelihood fit with Wald intervals")

    p = sub.add_parser("bayes", parents=[common, data, mcmc], help="MCMC estimates and credible intervals")
    p.add_argument("--chain-output", help="also write the full chain as CSV")

    p = sub.add_parser("predict", parents=[common, data, mcmc], help="predict future order statistics")
    p.add_argument("--future-size", type=int, required=True, help="future sample size m")
    p.add_argument("--rank", action="append", help="ranks s, e.g. 1,5,10 or 1-18 (default all)")
    p.add_argument("--chain", help="posterior chain CSV to use instead of running the sampler")

    p = sub.add_parser("gof", parents=[common, data], help="Kolmogorov-Smirnov test against the fitted LFR")
    p.add_argument("--method", choices=("exact", "asymptotic"), default="exact")
    p.add_argument("--plot-output", help="write (x, ecdf, fitted survival) rows as CSV")

    p = sub.add_parser("simulate", parents=[common, mcmc], help="Monte Carlo study")
    p.add_argument("--grid", action="store_true", help="run the standard twelve-cell grid")
    p.add_argument("--study", help="JSON study config (object or list of objects)")
    p.add_argument("--n", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--removals", help="sparse removals, e.g. 2:2,5:1")
    p.add_argument("--a-r", type=int)
    p.add_argument("--alpha0", type=float, default=2.0)
    p.add_argument("--beta0", type=float, default=5.0)
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--workers", type=int, default=_default_workers(), help=f"processes (default ${THREADS_ENV} or 1)")
    p.add_argument("--progress", action="store_true")
    return parser


def _apply_config(args, parser):
    if not args.config:
        return args
    try:
        obj = json.loads(_resolve(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("config file must hold a JSON object")
    for key, value in obj.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ParseError(f"unknown config key {key!r}")
        setattr(args, dest, value)
    return args


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = _apply_config(args, parser)
        text = COMMANDS[args.command](args)
        _emit(text, args.output)
    except (ParseError, InvalidSampleError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleSchemeError as exc:
        print(f"error: infeasible scheme: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NonConvergenceError, SingularInformationError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
