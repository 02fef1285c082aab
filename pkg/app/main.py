"""Command-line entry point: run, sweep and demo."""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional

from app import config
from app.core.errors import InequalityToolkitError
from app.services.main_service import MainService
from app.services.scenario_service import EXIT_INPUT_ERROR, Overrides

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to the input-error exit code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def positive_int(value: str) -> int:
    n = int(value)
    if n < 2:
        raise argparse.ArgumentTypeError(f"grid must be at least 2, got {n}")
    return n


def nonnegative_float(value: str) -> float:
    x = float(value)
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be >= 0, got {value}")
    return x


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="python -m app",
        description="Check reverse triangle inequalities for vector-valued integrals",
    )
    parser.add_argument("command", choices=["run", "sweep", "demo"], help="What to execute")
    parser.add_argument("--scenario", metavar="PATH", help="Scenario JSON file (run, sweep)")
    parser.add_argument("--grid", type=positive_int, metavar="N", help="Override the grid resolution")
    parser.add_argument("--tol-ineq", type=nonnegative_float, metavar="X", help="Inequality tolerance")
    parser.add_argument("--tol-hyp", type=nonnegative_float, metavar="X", help="Hypothesis tolerance")
    parser.add_argument("--format", choices=["json", "csv"], help="Report format")
    parser.add_argument("--out", metavar="PATH", help="Report path (default: stdout)")
    parser.add_argument("--seed", type=int, metavar="S", help="Override the search seed")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging
    logging.basicConfig(level=config.LOG_LEVEL, format='%(levelname)s: %(message)s')

    overrides = Overrides(
        grid=args.grid,
        tol_ineq=args.tol_ineq,
        tol_hyp=args.tol_hyp,
        format=args.format,
        out=args.out,
        seed=args.seed,
    )
    service = MainService().scenario_service
    try:
        if args.command == "demo":
            return service.demo(overrides)
        if not args.scenario:
            parser.error(f"{args.command} needs --scenario PATH")
        if args.command == "run":
            return service.run_scenario(args.scenario, overrides)
        return service.sweep(args.scenario, overrides)
    except InequalityToolkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
