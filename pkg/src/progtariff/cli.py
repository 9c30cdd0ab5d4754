"""Command-line interface.

Subcommands: validate, bill, simulate, compare, allocate, shift.
Exit status is 0 on success, 1 on any input problem (bad flags, missing
or malformed files, violated preconditions), and 2 if an internal
pricing invariant fails.
"""

from __future__ import annotations

import argparse
import sys
from datetime import timezone

from .amounts import exact, format_money
from .errors import BillingError, InternalCheckError
from .fileio import (
    allocation_to_dict,
    comparison_to_dict,
    parse_rfc3339,
    parse_schedule_file,
    parse_trace_csv,
    render_bill,
    render_comparison,
    render_report,
    render_schedule_summary,
    render_shift,
    report_to_dict,
    schedule_to_dict,
    shift_to_dict,
    to_json,
)
from .grouping import AllocationPolicy, proportional_allocation
from .simulate import (
    SchemeKind,
    SlotGrid,
    compare_schemes,
    run_scheme,
    slot_partition,
    what_if_shift,
)
from .tariff import progressive_price, tier_breakdown


class _CliError(BillingError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse normally exits with status 2 on usage errors; those are
    # input errors here, so raise and let run_cli map them to 1.
    def error(self, message):
        raise _CliError(message)


def _add_grid_flags(parser):
    parser.add_argument("--slot-hours", default="6", help="slot length in hours (default 6)")
    parser.add_argument("--period-days", type=int, default=30, help="billing period length (default 30)")
    parser.add_argument(
        "--period-start",
        default=None,
        help="RFC 3339 period start; default: midnight UTC of the earliest reading",
    )


def _add_policy_flag(parser):
    parser.add_argument(
        "--policy",
        choices=[policy.value for policy in AllocationPolicy],
        default=AllocationPolicy.EXACT_SUM.value,
        help="group price allocation policy (default exact-sum)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="progtariff", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("validate", help="check a schedule file and print a summary")
    cmd.add_argument("--schedule", required=True)
    cmd.add_argument("--json", action="store_true")
    cmd.set_defaults(func=_cmd_validate)

    cmd = commands.add_parser("bill", help="price a single usage and show the tier breakdown")
    cmd.add_argument("--schedule", required=True)
    cmd.add_argument("--usage", required=True, help="energy in kWh (decimal or p/q)")
    cmd.add_argument("--json", action="store_true")
    cmd.set_defaults(func=_cmd_bill)

    cmd = commands.add_parser("simulate", help="bill a trace under one scheme")
    cmd.add_argument("--schedule", required=True)
    cmd.add_argument("--trace", required=True)
    cmd.add_argument(
        "--scheme",
        choices=[kind.value for kind in SchemeKind],
        default=SchemeKind.SLOTTED_GROUP.value,
    )
    _add_grid_flags(cmd)
    _add_policy_flag(cmd)
    cmd.add_argument("--json", action="store_true")
    cmd.set_defaults(func=_cmd_simulate)

    cmd = commands.add_parser("compare", help="bill a trace under all three schemes")
    cmd.add_argument("--schedule", required=True)
    cmd.add_argument("--trace", required=True)
    _add_grid_flags(cmd)
    _add_policy_flag(cmd)
    cmd.add_argument("--json", action="store_true")
    cmd.set_defaults(func=_cmd_compare)

    cmd = commands.add_parser("allocate", help="split a group price over individual prices")
    cmd.add_argument("--group", required=True)
    cmd.add_argument("--individual", required=True, help="comma-separated prices")
    _add_policy_flag(cmd)
    cmd.add_argument("--json", action="store_true")
    cmd.set_defaults(func=_cmd_allocate)

    cmd = commands.add_parser("shift", help="evaluate moving energy between two slots")
    cmd.add_argument("--schedule", required=True)
    cmd.add_argument("--trace", required=True)
    cmd.add_argument("--consumer", required=True)
    cmd.add_argument("--from-slot", type=int, required=True)
    cmd.add_argument("--to-slot", type=int, required=True)
    cmd.add_argument("--amount", required=True, help="energy in kWh (decimal or p/q)")
    _add_grid_flags(cmd)
    _add_policy_flag(cmd)
    cmd.add_argument("--json", action="store_true")
    cmd.set_defaults(func=_cmd_shift)

    return parser


def _grid_from_args(args, readings) -> SlotGrid:
    if args.period_start is not None:
        start = parse_rfc3339(args.period_start)
    else:
        if not readings:
            raise _CliError("empty trace: pass --period-start explicitly")
        earliest = min(reading.start for reading in readings).astimezone(timezone.utc)
        start = earliest.replace(hour=0, minute=0, second=0, microsecond=0)
    return SlotGrid(
        slot_hours=exact(args.slot_hours),
        period_days=args.period_days,
        period_start=start,
    )


def _cmd_validate(args) -> int:
    schedule = parse_schedule_file(args.schedule)
    if args.json:
        print(to_json(schedule_to_dict(schedule)), end="")
    else:
        print(render_schedule_summary(schedule))
    return 0


def _cmd_bill(args) -> int:
    schedule = parse_schedule_file(args.schedule)
    usage = exact(args.usage)
    if args.json:
        rows = tier_breakdown(schedule, usage)
        payload = {
            "currency": schedule.currency,
            "price": format_money(progressive_price(schedule, usage)),
            "breakdown": [
                {
                    "tier": number,
                    "energy_kwh": str(span),
                    "charge": format_money(charge),
                }
                for number, span, charge in rows
            ],
        }
        print(to_json(payload), end="")
    else:
        print(render_bill(schedule, usage))
    return 0


def _cmd_simulate(args) -> int:
    schedule = parse_schedule_file(args.schedule)
    readings = parse_trace_csv(args.trace)
    grid = _grid_from_args(args, readings)
    matrix = slot_partition(readings, grid)
    report = run_scheme(matrix, schedule, grid, args.scheme, args.policy)
    if args.json:
        print(to_json(report_to_dict(report)), end="")
    else:
        print(render_report(report))
    return 0


def _cmd_compare(args) -> int:
    schedule = parse_schedule_file(args.schedule)
    readings = parse_trace_csv(args.trace)
    grid = _grid_from_args(args, readings)
    matrix = slot_partition(readings, grid)
    comparison = compare_schemes(matrix, schedule, grid, args.policy)
    if args.json:
        print(to_json(comparison_to_dict(comparison)), end="")
    else:
        print(render_comparison(comparison))
    return 0


def _cmd_allocate(args) -> int:
    prices = [item.strip() for item in args.individual.split(",") if item.strip()]
    if not prices:
        raise _CliError("--individual needs at least one price")
    # Zero-padded ids keep lexicographic tie-breaking aligned with input order.
    width = len(str(len(prices)))
    pairs = [(f"{index:0{width}d}", price) for index, price in enumerate(prices, start=1)]
    result = proportional_allocation(args.group, pairs, args.policy)
    if args.json:
        print(to_json(allocation_to_dict(result)), end="")
    else:
        print(",".join(format_money(share) for share in result.shares.values()))
    return 0


def _cmd_shift(args) -> int:
    schedule = parse_schedule_file(args.schedule)
    readings = parse_trace_csv(args.trace)
    grid = _grid_from_args(args, readings)
    matrix = slot_partition(readings, grid)
    report = what_if_shift(
        matrix,
        schedule,
        grid,
        consumer=args.consumer,
        from_slot=args.from_slot,
        to_slot=args.to_slot,
        amount=exact(args.amount),
        policy=args.policy,
    )
    if args.json:
        print(to_json(shift_to_dict(report)), end="")
    else:
        print(render_shift(report))
    return 0


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except InternalCheckError as err:
        print(f"internal check failed: {err}", file=sys.stderr)
        return 2
    except (BillingError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
