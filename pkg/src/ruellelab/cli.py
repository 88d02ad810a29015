"""Command line entry point.

    lab run <config.toml> [--seed N] [--budget N] [--out DIR]
                          [--format csv|json]
    lab list
    lab describe <experiment>

Exit codes: 0 all asserted checks passed, 1 an assertion failed,
2 usage or configuration error.  The LAB_THREADS environment variable
caps worker parallelism (default 1); it never affects output bytes.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, RuelleLabError, UnknownExperiment
from .experiments import (EXPERIMENT_DESCRIPTIONS, ExperimentConfig,
                          emit_report, run_experiment)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lab",
        description="transfer-operator experiment runner")
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="run one experiment from a config")
    run.add_argument("config", help="path to a TOML experiment config")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--budget", type=int, help="override the config budget")
    run.add_argument("--out", help="output directory (default from config)")
    run.add_argument("--format", choices=("csv", "json"),
                     help="series output format")

    sub.add_parser("list", help="list available experiments")

    desc = sub.add_parser("describe", help="describe one experiment")
    desc.add_argument("experiment")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "list":
        for name in sorted(EXPERIMENT_DESCRIPTIONS):
            print(name)
        return 0

    if args.command == "describe":
        if args.experiment not in EXPERIMENT_DESCRIPTIONS:
            print(f"unknown experiment: {args.experiment}", file=sys.stderr)
            return 2
        print(f"{args.experiment}: "
              f"{EXPERIMENT_DESCRIPTIONS[args.experiment]}")
        return 0

    if args.command != "run":
        parser.print_help()
        return 2

    try:
        cfg = ExperimentConfig.from_toml(args.config)
        overrides = dict(cfg.raw)
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.budget is not None:
            overrides["budget"] = args.budget
        if args.out is not None:
            overrides["out"] = args.out
        if args.format is not None:
            overrides["format"] = args.format
        cfg = ExperimentConfig.from_dict(overrides)
    except (ConfigError, UnknownExperiment, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        record = run_experiment(cfg)
    except RuelleLabError as exc:
        print(f"error running {cfg.experiment}: {exc}", file=sys.stderr)
        return 2

    paths = emit_report(record, cfg.out, cfg.format)
    for a in record.assertions:
        status = "PASS" if a.passed else "FAIL"
        print(f"[{status}] {record.experiment}/{a.name}: {a.detail}")
    print(f"wrote {len(paths)} file(s) to {cfg.out} "
          f"(wall {record.wall_time:.2f}s)")
    return 0 if record.passed else 1


if __name__ == "__main__":
    sys.exit(main())
