"""Command-line entry point.

Subcommands: ``optimize`` (one instance), ``sweep`` (wind-speed sweep over
all cases), ``simulate`` (time-domain frequency experiment) and
``validate-config``.  Exit codes: 0 success, 1 infeasible or failed case,
2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Optional, Sequence

from ..errors import ConfigError, DomainError
from .config import StudyConfig, bundled_study_path, load_config
from .runners import cmd_optimize, cmd_simulate, cmd_sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="windrow",
        description=(
            "Optimise the kinetic-energy reserve of a wake-coupled turbine "
            "row and simulate its primary-frequency contribution."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None,
                       help="study file (defaults to the bundled study)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")

    p_opt = sub.add_parser("optimize", help="solve one (wind, case) instance")
    common(p_opt)
    p_opt.add_argument("--v", type=float, default=None,
                       help="free wind speed in m/s")
    p_opt.add_argument("--case", action="append", default=None,
                       help="case id (first one is used)")

    p_sweep = sub.add_parser("sweep", help="sweep wind speed over the cases")
    common(p_sweep)
    p_sweep.add_argument("--case", action="append", default=None,
                         help="restrict to a case id (repeatable)")

    p_sim = sub.add_parser("simulate", help="run the frequency experiment")
    common(p_sim)
    p_sim.add_argument("--case", action="append", default=None,
                       help="restrict to a case id (repeatable)")

    p_val = sub.add_parser("validate-config", help="check a study file")
    p_val.add_argument("--config", default=None)
    return parser


def _load(config_path: Optional[str], seed: Optional[int]) -> StudyConfig:
    path = config_path if config_path else bundled_study_path()
    config = load_config(path)
    if seed is not None:
        solver = dataclasses.replace(config.farm.solver, seed=seed)
        farm = dataclasses.replace(config.farm, solver=solver)
        config = dataclasses.replace(config, seed=seed, farm=farm)
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate-config":
            load_config(args.config if args.config else bundled_study_path())
            print("config ok")
            return 0
        config = _load(args.config, args.seed)
        if args.command == "optimize":
            case_id = args.case[0] if args.case else None
            return cmd_optimize(config, args.v, case_id, args.out)
        if args.command == "sweep":
            return cmd_sweep(config, args.out, args.case)
        if args.command == "simulate":
            return cmd_simulate(config, args.out, args.case)
        raise AssertionError(f"unhandled command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
