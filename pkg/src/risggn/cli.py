"""Command-line experiment runner.

Subcommands: ``ser-curve``, ``diversity``, ``distance-sweep``, ``validate``.
Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error,
3 numerical-engine error.  The --threads flag parallelizes Monte Carlo batches
without changing any output byte.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import yaml

from . import experiments, validation
from .exceptions import (
    AsymptoticPoleError,
    DegenerateFitError,
    MeijerConvergenceError,
    PoleCollisionError,
)
from .experiments import ConfigError

_NUMERICAL_ERRORS = (MeijerConvergenceError, DegenerateFitError,
                     AsymptoticPoleError, PoleCollisionError)

_DEFAULT_OUT = {
    "ser_curve": "ser_curve.csv",
    "diversity": "diversity.csv",
    "distance_sweep": "distance_sweep.csv",
    "validate": "validation_report.txt",
}


def _load_config(experiment: str, args) -> experiments.ExperimentConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                data = yaml.safe_load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"malformed config file: {e}") from e
        if data is None:
            data = {}
        data.setdefault("experiment", experiment)
        if data["experiment"] != experiment:
            raise ConfigError(
                f"config is for experiment {data['experiment']!r} but the "
                f"{experiment.replace('_', '-')} subcommand was invoked")
        cfg = experiments.config_from_mapping(data)
    else:
        cfg = experiments.default_config(experiment)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if getattr(args, "synthetic_powerlaw", False):
        overrides["synthetic_powerlaw"] = True
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg.validated()


def _out_path(cfg, args, experiment):
    return args.out or cfg.output or _DEFAULT_OUT[experiment]


def _run_experiment(experiment: str, runner, args) -> int:
    cfg = _load_config(experiment, args)
    path = _out_path(cfg, args, experiment)
    runner(cfg, path, threads=args.threads)
    print(f"wrote {path}")
    return 0


def _run_validate(args) -> int:
    cfg = _load_config("validate", args)
    criteria = validation._ALL_CRITERIA
    if args.criteria:
        try:
            criteria = tuple(int(c) for c in args.criteria.split(","))
        except ValueError:
            raise ConfigError(f"--criteria must be a comma list of integers, got {args.criteria!r}") from None
    settings = validation.ValidationSettings(
        trials=cfg.trials, seed=cfg.seed, threads=args.threads,
        criteria=criteria, inject_moment_error=args.inject_moment_error)
    results = validation.run_checks(settings)
    report = validation.format_report(results, settings)
    path = _out_path(cfg, args, "validate")
    with open(path, "w", newline="\n") as fh:
        fh.write(report)
    sys.stdout.write(report)
    print(f"wrote {path}")
    return 0 if all(r.passed for r in results) else 1


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML key-value config file")
    p.add_argument("--out", help="output file path")
    p.add_argument("--seed", type=int, help="override the RNG seed")
    p.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    p.add_argument("--threads", type=int, default=1,
                   help="Monte Carlo worker threads (never changes results)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="risggn", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ser-curve", help="SER vs average SNR (closed form, asymptotic, MC)")
    _add_common(p)

    p = sub.add_parser("diversity", help="log-log SER slope vs average SNR")
    _add_common(p)
    p.add_argument("--synthetic-powerlaw", action="store_true",
                   help="self-test: replace the SER curve by gamma_bar^-3")

    p = sub.add_parser("distance-sweep", help="SER vs RIS position d1 (d2 = d_total - d1)")
    _add_common(p)

    p = sub.add_parser("validate", help="run the acceptance checks and write a report")
    _add_common(p)
    p.add_argument("--criteria", help="comma list of criterion numbers (default all)")
    p.add_argument("--inject-moment-error", action="store_true",
                   help="self-test: corrupt mu3 by 10x; criterion 3 must then fail")

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "ser-curve":
            return _run_experiment("ser_curve", experiments.run_ser_curve, args)
        if args.command == "diversity":
            return _run_experiment("diversity", experiments.run_diversity, args)
        if args.command == "distance-sweep":
            return _run_experiment("distance_sweep", experiments.run_distance_sweep, args)
        return _run_validate(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as e:
        print(f"numerical-engine error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
