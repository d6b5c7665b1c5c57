from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

# Ensure the root directory is in sys.path
root_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if root_dir not in sys.path:
    sys.path.insert(0, root_dir)

from src.logger import set_log_level
from src.model import AssumptionViolation, ModelSpecError
from src.runner import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_FAILURE,
    ExperimentRunner,
    RunMode,
    SchemaError,
    load_config,
)
from src.solver import InfeasibleInput, InnerProxFailure, NonConvergence, StepSizeError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Primal-dual solvers for first-order mean field games on the torus"
    )
    subcommands = parser.add_subparsers(dest="mode", required=True)
    descriptions = {
        RunMode.SOLVE: "Solve the time-dependent problem",
        RunMode.ERGODIC: "Solve the stationary (ergodic) problem",
        RunMode.LONGTIME: "Measure the long-time convergence to the ergodic limit",
        RunMode.VERIFY: "Check weak-solution residuals against thresholds",
    }
    for mode, help_text in descriptions.items():
        sub = subcommands.add_parser(mode.value, help=help_text)
        sub.add_argument("--config", required=True, help="Path to the JSON run configuration")
        sub.add_argument("--out", default=None, help="Output directory (overrides output.directory)")
        sub.add_argument("--seed", type=int, default=None, help="Override solver.rng_seed")
        sub.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns 0 on success, 1 on config errors, 2 on numerical failures."""
    args = build_parser().parse_args(argv)
    if args.quiet:
        set_log_level(logging.WARNING)

    try:
        config = load_config(args.config)
        if args.seed is not None and args.seed < 0:
            raise SchemaError("seed must be nonnegative", path="solver.rng_seed")
        config = config.with_overrides(mode=RunMode(args.mode), seed=args.seed)
        runner = ExperimentRunner(config, output_dir=args.out)
        outcome = runner.run()
    except (
        SchemaError,
        AssumptionViolation,
        ModelSpecError,
        InfeasibleInput,
        StepSizeError,
        FileNotFoundError,
    ) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (NonConvergence, InnerProxFailure) as exc:
        print(f"Numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE

    if not args.quiet:
        print("=" * 60)
        print(outcome.summary())
        print("=" * 60)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
