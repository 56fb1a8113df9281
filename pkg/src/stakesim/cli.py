"""Command-line front end: estimate, simulate, compare-history.

Exit codes: 0 success, 1 usage error, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import queue_wait, scenario
from .errors import ActiveOutOfTableRange, ConfigError, MalformedRow, StakeSimError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _add_churn_flags(parser):
    parser.add_argument("--min-churn", type=int, default=4)
    parser.add_argument("--churn-quotient", type=int, default=65536)
    parser.add_argument("--epochs-per-day", type=int, default=225)
    parser.add_argument("--max-tiers", type=int, default=32)


def _table_from_args(args):
    return queue_wait.build_churn_table(
        min_churn=args.min_churn,
        churn_quotient=args.churn_quotient,
        max_tiers=args.max_tiers,
        epochs_per_day=args.epochs_per_day,
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stakesim",
        description="Staking-economy simulator and wait-time estimator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate validator queue wait time")
    est.add_argument("--active", type=int, required=True)
    est.add_argument("--queue", type=int, required=True)
    est.add_argument("--direction", choices=("entry", "exit"), default="entry")
    est.add_argument("--out", type=Path, default=None, help="optional CSV output file")
    _add_churn_flags(est)

    sim = sub.add_parser("simulate", help="run a scenario config")
    sim.add_argument("--config", type=Path, required=True)
    sim.add_argument("--out", type=Path, required=True, help="output directory")
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")

    cmp_ = sub.add_parser("compare-history", help="estimator vs observed wait times")
    cmp_.add_argument("csv", type=Path, help="history CSV file")
    cmp_.add_argument("--out", type=Path, default=None, help="optional residual CSV")
    _add_churn_flags(cmp_)

    return parser


def cmd_estimate(args):
    table = _table_from_args(args)
    est = queue_wait.estimate_wait(args.active, args.queue, table,
                                   direction=args.direction)
    print(f"Churn Time Days: {est.churn_time_days}")
    print(f"Current Churn: {est.curr_churn}")
    print(f"Average Churn: {est.ave_churn}")
    print(f"Wait Time: {est.wait_text}")
    if args.out is not None:
        args.out.write_text(
            "active,queue,direction,churn_time_days,curr_churn,ave_churn,"
            "wait_secs,wait_days,wait_text\n"
            f"{args.active},{args.queue},{args.direction},{est.churn_time_days},"
            f"{est.curr_churn},{est.ave_churn},{est.wait_secs},{est.wait_days},"
            f"\"{est.wait_text}\"\n",
            encoding="utf-8")
    return EXIT_OK


def cmd_simulate(args):
    config = scenario.load_config(args.config)
    if args.seed is not None:
        from dataclasses import replace
        config = replace(config, seed=args.seed)
    out = scenario.run_scenario(config)
    scenario.write_output(out, args.out)
    print(out.summary, end="")
    return EXIT_OK


def cmd_compare_history(args):
    table = _table_from_args(args)
    rows = queue_wait.load_history_csv(args.csv)
    summary = queue_wait.compare_history(rows, table)
    header = "date,kind,active,queue_len,observed_wait_days,estimated_days,residual"
    lines = [header]
    for c in summary.rows:
        r = c.row
        lines.append(
            f"{r.date},{r.kind},{r.active},{r.queue_len},{r.observed_wait_days},"
            f"{c.estimated_days:.4f},{c.residual:.4f}"
        )
    print("\n".join(lines))
    print(f"mean abs residual: {summary.mean_abs_residual:.4f} days")
    print(f"max abs residual: {summary.max_abs_residual:.4f} days")
    if args.out is not None:
        args.out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "estimate":
            return cmd_estimate(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "compare-history":
            return cmd_compare_history(args)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ActiveOutOfTableRange, MalformedRow) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (StakeSimError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
