"""Command-line front door.

Two subcommands::

    stakeclaim run --scenario PATH --out DIR [--format json|csv]
                   [--epochs N] [--seed S]
    stakeclaim validate --scenario PATH

``run`` writes report.json (or report.csv) plus events.jsonl into the
output directory. Exit codes: 0 success, 1 invalid input, 2 an invariant
violation was detected during the run (details on stderr). Output is
byte-stable for identical inputs.

The STAKECLAIM_LOG environment variable controls stdout verbosity:
``quiet`` (default) prints nothing on success, ``events`` streams the
event log, ``trace`` additionally prints the report.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import InvalidScenario, InvariantViolation
from .scenario import World, load_scenario, validate, with_overrides


def cmd_run(args: argparse.Namespace) -> int:
    log_mode = os.environ.get("STAKECLAIM_LOG", "quiet")
    try:
        scenario = load_scenario(args.scenario)
    except InvalidScenario as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return 1
    violations = validate(scenario)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return 1
    if args.epochs is not None and args.epochs < 0:
        print(f"--epochs must be >= 0, got {args.epochs}", file=sys.stderr)
        return 1
    scenario = with_overrides(scenario, horizon=args.epochs, seed=args.seed)
    try:
        report = World(scenario).run()
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "events.jsonl").write_text(report.events_jsonl)
    if args.format == "csv":
        (out / "report.csv").write_text(report.to_csv())
    else:
        (out / "report.json").write_text(report.to_json())

    if log_mode in ("events", "trace"):
        sys.stdout.write(report.events_jsonl)
    if log_mode == "trace":
        sys.stdout.write(report.to_json())
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except InvalidScenario as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return 1
    violations = validate(scenario)
    for v in violations:
        print(v)
    return 0 if not violations else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stakeclaim",
        description="Run and validate staking-arrangement scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario and write outputs")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--format", choices=("json", "csv"), default="json",
                       help="report format (events are always JSON lines)")
    p_run.add_argument("--epochs", type=int, default=None,
                       help="override the scenario horizon (e.g. truncate the run)")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="list scenario constraint violations")
    p_val.add_argument("--scenario", required=True, help="scenario JSON file")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
