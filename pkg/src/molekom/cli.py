"""Command-line entry point: run named experiments from JSON configs."""

from __future__ import annotations

import argparse
import sys

from .channel import QuadratureError
from .config import ConfigParseError, ConfigValidationError, load_config, parse_config
from .experiments import list_experiments, run_experiment

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="molekom",
        description="Performance analysis of a mobile diffusive molecular link, "
        "with Monte Carlo validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list the registered experiments")
    run = sub.add_parser("run", help="run an experiment from a config file and/or flags")
    run.add_argument("config", nargs="?", help="JSON scenario file")
    run.add_argument("--experiment", "-e", help="experiment name (overrides the config)")
    run.add_argument("--seed", type=int, help="seed override")
    run.add_argument("--out", help="output directory override")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "list":
        for name in list_experiments():
            print(name)
        return EXIT_OK

    if args.config is None and args.experiment is None:
        parser.error("run needs a config file and/or --experiment")

    try:
        raw = load_config(args.config) if args.config else {}
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if args.experiment is not None:
        raw["experiment"] = args.experiment
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out_dir"] = args.out

    try:
        scenario = parse_config(raw)
    except ConfigValidationError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        paths = run_experiment(scenario)
    except ConfigValidationError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QuadratureError, ArithmeticError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
