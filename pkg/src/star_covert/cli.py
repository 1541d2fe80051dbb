"""
A simple command-line interface to the experiments.
"""

import argparse
import logging
import sys

from star_covert._errors import ConfigurationError
from star_covert._types import CheckReport
from star_covert.config import load_config
from star_covert.experiments import MUTATIONS, run_baseline, run_optimize, run_sweep, run_validation
from typing import Optional, Sequence


_logger = logging.getLogger("star_covert")


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON experiment configuration (defaults apply when omitted)")
    common.add_argument("--out-dir", default=".", help="directory for records, traces and summaries")
    common.add_argument(
        "--jobs", type=int, default=1, help="worker processes for optimizer runs, threads for Monte Carlo chunks"
    )

    parser: argparse.ArgumentParser = argparse.ArgumentParser(
        prog="star-covert",
        description="""
Jointly optimize covert and secure transmission through a simultaneously
transmitting and reflecting surface, and check the closed forms behind it.

    star-covert validate --out-dir results
    star-covert validate --optimizer --jobs 4
    star-covert optimize --config system.toml --seed 3 --seed 4
    star-covert sweep --config sweep.toml --jobs 4
    star-covert baseline --config sweep.toml --check

Every command writes the resolved configuration to config.toml in the output
directory.
""",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log progress at debug level")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", parents=[common], help="run the validation battery")
    validate.add_argument("--mutation", choices=MUTATIONS, help="deliberately break a closed form")
    validate.add_argument(
        "--optimizer", action="store_true", help="also check optimizer convergence and compare it to a grid search"
    )

    optimize = commands.add_parser("optimize", parents=[common], help="optimize one or more seeds")
    optimize.add_argument(
        "--seed", type=int, action="append", help="channel seed, repeatable (the first configured seed by default)"
    )

    for name, text in (
        ("sweep", "sweep one parameter over all seeds"),
        ("baseline", "compare against two conventional surfaces"),
    ):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument("--check", action="store_true", help="judge the aggregated means and fail on a violation")

    return parser.parse_args(argv)


def _print_checks(checks: Sequence[CheckReport]) -> None:
    for check in checks:
        print(f"{'PASS' if check['passed'] else 'FAIL'} {check['name']}")
    if not all(check["passed"] for check in checks):
        sys.exit(1)


def main(argv: Optional[Sequence[str]] = None) -> None:
    """
    Run one of the experiment commands. The process exits with status 1 if
    validation, or a sweep or comparison run with ``--check``, finds a failing check,
    and with status 2 on a bad configuration.

    Results go to files in ``--out-dir``; a one-line verdict per check or run is
    printed to standard output.
    """
    args = _parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")

    try:
        config = load_config(args.config)
        if args.command == "validate":
            report = run_validation(config, args.out_dir, args.mutation, args.jobs, args.optimizer)
            _print_checks(report["checks"])
        elif args.command == "optimize":
            for result in run_optimize(config, args.out_dir, args.seed, args.jobs):
                record = result.record
                objective = record.get("objective", float("nan"))
                print(f"seed {record['seed']}: {record['status']} objective={objective:.6g}")
        elif args.command == "sweep":
            summary = run_sweep(config, args.out_dir, args.jobs, args.check)
            print(f"{len(summary['aggregates'])} sweep points, {summary['failures']} failed runs")
            _print_checks(summary.get("checks", []))
        else:
            summary = run_baseline(config, args.out_dir, args.jobs, args.check)
            print(f"{len(summary['aggregates'])} comparison points, {summary['failures']} failed runs")
            _print_checks(summary.get("checks", []))
    except ConfigurationError as e:
        _logger.error("%s", e)
        sys.exit(2)


# Allow running as `python -m star_covert.cli`
if __name__ == "__main__":  # pragma: no cover
    main()
