#!/usr/bin/env python3
"""
Command-line front end: reads an experiment config, runs it and writes the
CSV or JSON report to --out (or stdout). Diagnostics go to stderr.

Exit codes: 0 success, 1 semantic negative (not conjugate, a failed
verification), 2 usage or config error, 3 search failure.
"""

import argparse
import sys
from dataclasses import replace
from typing import List, Optional

from common.experiment_config import (
    ODOMETER,
    SOLENOID,
    TENT,
    ActionParams,
    ExperimentConfig,
    load_config,
)
from common.experiment_functions import run_experiment
from common.log_formatter import configure_logging
from common.report_writer import write_csv, write_json
from dynamics.errors import OdescError, UsageError
from dynamics.radix import parse_radix_spec

CSV_COLUMNS = """\
CSV columns
  simulate (odometer, solenoid):
    n          scale index, starting at 1
    L_i        cylinder depth of hole i at scale n
    tau_i      first-hit time of hole i, "inf" when never hit
    winner     index of the strict first-hit winner, 0 for none
    overlap    1 if two holes intersect at scale n, else 0
  simulate (tent): n, tau_i, winner, overlap as above (no depth columns)
  sample:
    metric     trials | wins | switches | indecisive
    hole       hole index for "wins", 0 otherwise
    value      n_max, win count, switch count or threshold h
    frequency  trial count, number of trials, or fraction a/b
  verify (odometer):
    depth, modulus, cyclic_partition, forward_visits_all,
    backward_visits_all (1/0), recurrence_period
  verify (tent):
    y, d, gap, bound (2^(1-d)), within_bound (1/0)
  solenoid:
    label, left, right of each stage interval, left to right
construct and classify write JSON reports.

exit codes: 0 ok, 1 negative verdict, 2 usage error, 3 search failure
"""

CONFIG_ACTIONS = ("simulate", "construct", "sample", "verify")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odesc",
        description="Competing shrinking holes on adding machines and interval maps.",
        epilog=CSV_COLUMNS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", help="overrides ODESC_LOG (debug, info, warning, error)")

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON or YAML experiment config")
    shared.add_argument("--out", help="report path, stdout when omitted")
    shared.add_argument("--seed", type=int)
    shared.add_argument("--n-max", type=int, dest="n_max")
    shared.add_argument("--horizon", type=int)
    shared.add_argument("--threads", type=int)

    sub = parser.add_subparsers(dest="command", required=True)
    for name in CONFIG_ACTIONS:
        sub.add_parser(name, parents=[shared], help=f"{name} from a config",
                       epilog=CSV_COLUMNS, formatter_class=argparse.RawDescriptionHelpFormatter)

    classify = sub.add_parser("classify", parents=[shared], help="decide conjugacy of two adding machines")
    classify.add_argument("spec_a", nargs="?", help='radix spec, e.g. "2", "2,3|4", "factorial"')
    classify.add_argument("spec_b", nargs="?")

    solenoid = sub.add_parser("solenoid", parents=[shared], help="build and check a solenoidal model")
    solenoid.add_argument("--branching", help="branching radix spec when no config is given")
    solenoid.add_argument("--stage", type=int, default=None)

    tent = sub.add_parser("tent", parents=[shared], help="run a tent-map config")
    tent.add_argument("--action", choices=["simulate", "construct", "verify"])
    return parser


def _config_for(args: argparse.Namespace) -> ExperimentConfig:
    if args.command == "classify" and args.spec_a is not None:
        if args.spec_b is None:
            raise UsageError("classify needs two radix specs")
        spec = parse_radix_spec(args.spec_a)
        return ExperimentConfig(ODOMETER, "classify", spec=spec, params=ActionParams(compare=args.spec_b))
    if args.command == "solenoid" and args.config is None:
        if args.branching is None:
            raise UsageError("solenoid needs --config or --branching")
        return ExperimentConfig(
            SOLENOID, "solenoid-check", spec=parse_radix_spec(args.branching), stage=args.stage or 1
        )
    if args.config is None:
        raise UsageError(f"{args.command} needs --config")

    config = load_config(args.config)
    if args.command == "solenoid":
        config = replace(config, action="solenoid-check", stage=args.stage or config.stage)
    elif args.command == "tent":
        if config.system != TENT:
            raise UsageError(f"tent needs a tent config, got system '{config.system}'")
        if args.action:
            config = replace(config, action=args.action)
    elif args.command != config.action:
        config = replace(config, action=args.command)
    return config


def run(args: argparse.Namespace) -> int:
    config = _config_for(args).with_params(
        seed=args.seed, n_max=args.n_max, horizon=args.horizon, threads=args.threads, out=args.out
    )
    result = run_experiment(config)
    out = config.params.out
    if "error" in result:
        print(f"odesc: {result['error']}", file=sys.stderr)
        return result["exit_code"]
    if "message" in result:
        print(result["message"])
        if out:
            write_json(result["report"], out)
    elif "header" in result:
        write_csv(result["header"], result["rows"], out)
    else:
        write_json(result["report"], out)
    return result["exit_code"]


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return run(args)
    except OdescError as e:
        print(f"odesc: error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("odesc: interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
