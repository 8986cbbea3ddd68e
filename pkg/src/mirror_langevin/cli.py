"""
Command-line entry point.

Subcommands::

    mirror-langevin sample --config run.cfg --out run.csv [--samples-out final.csv]
    mirror-langevin experiment --name dirichlet [--config sweep.cfg] --out sweep.csv
    mirror-langevin check --suite geometry
    mirror-langevin generate-data --dimension 10 --n 1000 --out data.csv

``--seed`` overrides the configured master seed and ``--threads`` runs
trials concurrently; both are accepted before or after the subcommand.

Exit codes: 0 success, 1 failed property suite, 2 configuration error,
3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .exceptions import BudgetError, ConvergenceError, ParseError, ValidationError
from .harness import checks
from .harness.config import ExperimentConfig, default_config, load_config
from .harness.data import generate_logistic_data, write_dataset
from .harness.experiments import RUNNERS, run_single
from .harness.records import write_csv
from .harness.rng import stream

log = logging.getLogger("mirror_langevin")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _common(parser, default):
    parser.add_argument("--seed", type=_u64, default=default, help="override the master seed")
    parser.add_argument("--threads", type=_positive_int, default=default,
                        help="number of trials run concurrently")
    parser.add_argument("-v", "--verbose", action="store_true", default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mirror-langevin",
                                     description="Mirror-Langevin sampling and benchmarks.")
    _common(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="single run of the configured sampler")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="CSV of per-iteration records")
    p.add_argument("--samples-out", help="CSV of the final chain cloud (trial 0)")
    _common(p, argparse.SUPPRESS)

    p = sub.add_parser("experiment", help="run one of the benchmark experiments")
    p.add_argument("--name", required=True, choices=["blr", "simplex-quadratic", "dirichlet"])
    p.add_argument("--config", help="config file; defaults are used when omitted")
    p.add_argument("--out", required=True)
    _common(p, argparse.SUPPRESS)

    p = sub.add_parser("check", help="run a property suite")
    p.add_argument("--suite", required=True, choices=sorted(checks.SUITES))
    _common(p, argparse.SUPPRESS)

    p = sub.add_parser("generate-data", help="write a synthetic logistic-regression dataset")
    p.add_argument("--dimension", type=_positive_int, default=10)
    p.add_argument("--n", type=_positive_int, default=1000)
    p.add_argument("--theta-star", type=float, default=0.9)
    p.add_argument("--out", required=True)
    _common(p, argparse.SUPPRESS)
    return parser


def _overrides(args) -> dict:
    return {} if args.seed is None else {"seed": args.seed}


def _experiment_config(args) -> ExperimentConfig:
    name = args.name.replace("-", "_")
    if args.config is None:
        return default_config(name, **_overrides(args))
    cfg = load_config(args.config, _overrides(args))
    if cfg.experiment != name:
        raise ValidationError(f"config describes [{cfg.experiment}], not {name}")
    return cfg


def _write_cloud(cloud: np.ndarray, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(cloud.shape[1])])
        for row in cloud:
            w.writerow([repr(float(v)) for v in row])


def _cmd_sample(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    records, clouds = run_single(cfg, args.threads or 1)
    write_csv(records, args.out)
    if args.samples_out:
        _write_cloud(clouds[0], args.samples_out)
    log.info("wrote %d records to %s", len(records), args.out)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = _experiment_config(args)
    records = RUNNERS[cfg.experiment](cfg, args.threads or 1)
    write_csv(records, args.out)
    log.info("wrote %d records to %s", len(records), args.out)
    return EXIT_OK


def _cmd_check(args) -> int:
    results = checks.run_suite(args.suite, seed=args.seed or 0)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{args.suite}: {len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def _cmd_generate(args) -> int:
    rng = stream(args.seed or 0, "blr-data", 0)
    ds = generate_logistic_data(args.dimension, args.n, np.full(args.dimension, args.theta_star), rng)
    write_dataset(ds, args.out)
    return EXIT_OK


COMMANDS = {
    "sample": _cmd_sample,
    "experiment": _cmd_experiment,
    "check": _cmd_check,
    "generate-data": _cmd_generate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, BudgetError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # remaining ValueErrors come from invalid settings (e.g. a dataset of the wrong dimension)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
