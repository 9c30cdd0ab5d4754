"""File formats and report rendering.

Schedule files are JSON::

    {"currency": "KRW",
     "base_period_days": 30,
     "tiers": [{"upper_kwh": 100, "rate": "60.7"}, ...,
               {"upper_kwh": null, "rate": "709.5"}]}

Rates and bounds are read as exact rationals; "60.7" becomes 607/10, not
a float. On emission, values whose decimal form does not terminate are
written at a configurable precision together with a lossless
``*_exact`` p/q field, which the parser prefers when present. Parsing an
emitted file therefore reproduces the schedule exactly.

Consumption traces are CSV with header ``consumer_id,interval_start,
energy_kwh`` (an optional trailing ``interval_end`` column turns rows
into interval readings that may span slot boundaries). Timestamps are
RFC 3339 with an explicit UTC offset; energies are decimal or p/q
strings, parsed exactly.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from .amounts import (
    energy_amount,
    exact_str,
    format_energy,
    format_fixed,
    format_money,
)
from .errors import ScheduleError, TraceError
from .grouping import AllocationResult, GroupPricingResult
from .simulate import (
    BillingReport,
    MeterReading,
    SchemeComparison,
    ShiftReport,
    SlotGrid,
)
from .tariff import HOURS_PER_DAY, TariffSchedule, tier_breakdown, validate_schedule

PathLike = Union[str, Path]

TRACE_HEADER = ["consumer_id", "interval_start", "energy_kwh"]


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp with an explicit offset, as UTC."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(raw)
    except ValueError as err:
        raise ValueError(f"not an RFC 3339 timestamp: {text!r}") from err
    if stamp.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return stamp.astimezone(timezone.utc)


def format_rfc3339(stamp: datetime) -> str:
    utc = stamp.astimezone(timezone.utc)
    if utc.microsecond:
        return utc.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return utc.strftime("%Y-%m-%dT%H:%M:%SZ")


# ----------------------------------------------------------------------
# Schedule files
# ----------------------------------------------------------------------


def parse_schedule_file(path: PathLike) -> TariffSchedule:
    """Load and validate a schedule JSON file.

    Parse errors carry the file position; validation errors from
    validate_schedule pass through unchanged.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ScheduleError(f"{path}: {err.strerror or err}") from err
    try:
        # Floats never enter: JSON number literals are kept as strings and
        # re-parsed exactly.
        raw = json.loads(text, parse_float=str)
    except json.JSONDecodeError as err:
        raise ScheduleError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from err
    return validate_schedule(raw)


def _number_fields(name: str, value: Fraction, places: int) -> dict:
    """A schedule number: JSON int, decimal string, or display + p/q pair."""
    if value.denominator == 1:
        return {name: int(value)}
    lossless = exact_str(value)
    fields = {name: lossless}
    if "/" in lossless:
        fields[name] = format_fixed(value, places)
        fields[f"{name}_exact"] = lossless
    return fields


def schedule_to_dict(schedule: TariffSchedule, precision: int = 6) -> dict:
    """JSON-ready description of a schedule, losslessly round-trippable."""
    tiers = []
    for tier in schedule.tiers:
        entry: dict = {}
        if tier.upper_bound is None:
            entry["upper_kwh"] = None
        else:
            entry.update(_number_fields("upper_kwh", tier.upper_bound, precision))
        entry.update(_number_fields("rate", tier.rate, precision))
        tiers.append(entry)
    out = {
        "currency": schedule.currency,
        **_number_fields(
            "base_period_days", schedule.base_hours / HOURS_PER_DAY, precision
        ),
        "tiers": tiers,
    }
    if schedule.allow_rate_decrease:
        out["allow_rate_decrease"] = True
    return out


def emit_schedule(schedule: TariffSchedule, path: PathLike, precision: int = 6):
    Path(path).write_text(
        json.dumps(schedule_to_dict(schedule, precision), indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )


# ----------------------------------------------------------------------
# Trace CSV
# ----------------------------------------------------------------------


def parse_trace_csv(path: PathLike) -> list[MeterReading]:
    """Read meter readings from a trace CSV, in file order."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise TraceError(f"{path}: {err.strerror or err}") from err
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise TraceError(f"{path}: missing header")
    header = [cell.strip() for cell in rows[0]]
    if header not in (TRACE_HEADER, TRACE_HEADER + ["interval_end"]):
        raise TraceError(
            f"{path}:1: bad header {header!r}, expected {','.join(TRACE_HEADER)}"
            " with optional interval_end"
        )
    has_end = len(header) == 4
    readings = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise TraceError(
                f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}"
            )
        consumer = row[0].strip()
        if not consumer:
            raise TraceError(f"{path}:{line_no}: empty consumer_id")
        try:
            start = parse_rfc3339(row[1])
        except ValueError as err:
            raise TraceError(f"{path}:{line_no}: {err}") from err
        try:
            energy = energy_amount(row[2].strip())
        except ValueError as err:
            raise TraceError(f"{path}:{line_no}: {err}") from err
        end: Optional[datetime] = None
        if has_end and row[3].strip():
            try:
                end = parse_rfc3339(row[3])
            except ValueError as err:
                raise TraceError(f"{path}:{line_no}: {err}") from err
        try:
            readings.append(
                MeterReading(consumer=consumer, start=start, energy=energy, end=end)
            )
        except ValueError as err:
            raise TraceError(f"{path}:{line_no}: {err}") from err
    return readings


# ----------------------------------------------------------------------
# JSON report shapes
# ----------------------------------------------------------------------


def _money(value: Fraction) -> dict:
    return {"display": format_money(value), "exact": exact_str(value)}


def _energy(value: Fraction) -> dict:
    return {"display": format_energy(value), "exact": exact_str(value)}


def _ratio(value: Fraction) -> dict:
    return {"display": format_fixed(value, 4), "exact": exact_str(value)}


def _grid_dict(grid: SlotGrid) -> dict:
    return {
        "slot_hours": exact_str(grid.slot_hours),
        "period_days": grid.period_days,
        "period_start": format_rfc3339(grid.period_start),
        "slots": grid.slot_count,
    }


def demand_dict(report: BillingReport) -> dict:
    demand = report.demand
    return {
        "slot_loads_kwh": [format_energy(load) for load in demand.slot_loads],
        "peak_kwh": _energy(demand.peak),
        "mean_kwh": _energy(demand.mean),
        "par": None if demand.par is None else _ratio(demand.par),
    }


def report_to_dict(report: BillingReport) -> dict:
    consumers = []
    for consumer in report.consumers:
        entry: dict = {"id": consumer}
        entry["total"] = {
            "billed": format_money(report.billed_totals[consumer]),
            "exact": exact_str(report.consumer_totals[consumer]),
        }
        if report.slot_charges is not None:
            entry["slot_charges"] = [
                format_money(charge) for charge in report.slot_charges[consumer]
            ]
            entry["slot_charges_exact"] = [
                exact_str(charge) for charge in report.slot_charges[consumer]
            ]
        consumers.append(entry)
    out = {
        "scheme": report.scheme.value,
        "currency": report.currency,
        "grid": _grid_dict(report.grid),
        "consumers": consumers,
        "aggregate": {
            "billed": format_money(report.aggregate_billed),
            "exact": exact_str(report.aggregate_exact),
        },
        "demand": demand_dict(report),
    }
    if report.policy is not None:
        out["allocation_policy"] = report.policy.value
    if report.group_slot_prices is not None:
        out["group_slot_prices"] = [
            format_money(price) for price in report.group_slot_prices
        ]
        out["group_slot_prices_exact"] = [
            exact_str(price) for price in report.group_slot_prices
        ]
    if report.zero_filled is not None:
        out["zero_filled_cells"] = report.zero_filled
    return out


def comparison_to_dict(comparison: SchemeComparison) -> dict:
    consumers = []
    for consumer in comparison.monthly.consumers:
        consumers.append(
            {
                "id": consumer,
                "monthly": format_money(comparison.monthly.billed_totals[consumer]),
                "slotted_individual": format_money(
                    comparison.slotted_individual.billed_totals[consumer]
                ),
                "slotted_group": format_money(
                    comparison.slotted_group.billed_totals[consumer]
                ),
                "slot_premium": format_money(
                    comparison.per_consumer_premium[consumer]
                ),
                "group_saving": format_money(comparison.per_consumer_saving[consumer]),
            }
        )
    return {
        "currency": comparison.monthly.currency,
        "grid": _grid_dict(comparison.monthly.grid),
        "consumers": consumers,
        "aggregate": {
            "monthly": format_money(comparison.monthly.aggregate_billed),
            "slotted_individual": format_money(
                comparison.slotted_individual.aggregate_billed
            ),
            "slotted_group": format_money(comparison.slotted_group.aggregate_billed),
            "slot_premium": format_money(comparison.slot_premium),
            "group_saving": format_money(comparison.group_saving),
        },
        "allocation_policy": comparison.slotted_group.policy.value,
        "demand": demand_dict(comparison.monthly),
        "schemes": {
            report.scheme.value: report_to_dict(report)
            for report in (
                comparison.monthly,
                comparison.slotted_individual,
                comparison.slotted_group,
            )
        },
    }


def shift_to_dict(report: ShiftReport) -> dict:
    def par(value):
        return None if value is None else _ratio(value)

    return {
        "consumer": report.consumer,
        "from_slot": report.from_slot,
        "to_slot": report.to_slot,
        "amount_kwh": _energy(report.amount),
        "allocated": {
            "before": format_money(report.allocated_before),
            "after": format_money(report.allocated_after),
            "delta": format_money(report.allocated_delta),
        },
        "slotted_individual": {
            "before": _money(report.individual_before),
            "after": _money(report.individual_after),
            "delta": _money(report.individual_delta),
        },
        "group_aggregate": {
            "before": format_money(report.group_billed_before),
            "after": format_money(report.group_billed_after),
            "delta": format_money(report.group_billed_delta),
        },
        "par": {"before": par(report.par_before), "after": par(report.par_after)},
    }


def allocation_to_dict(result: AllocationResult) -> dict:
    return {
        "policy": result.policy.value,
        "shares": {c: format_money(v) for c, v in result.shares.items()},
        "total": format_money(result.total),
        "adjustments_minor_units": {c: units for c, units in result.adjustments},
    }


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ----------------------------------------------------------------------
# Human-readable tables
# ----------------------------------------------------------------------


def render_schedule_summary(schedule: TariffSchedule) -> str:
    lines = [
        f"currency: {schedule.currency}",
        f"base period: {exact_str(schedule.base_hours / HOURS_PER_DAY)} days",
        f"progressive: {'yes' if schedule.is_progressive else 'no'}",
    ]
    previous = Fraction(0)
    for number, tier in enumerate(schedule.tiers, start=1):
        if tier.upper_bound is None:
            span = f"above {format_energy(previous)} kWh"
        else:
            span = f"{format_energy(previous)} to {format_energy(tier.upper_bound)} kWh"
            previous = tier.upper_bound
        lines.append(f"tier {number}: {span} at {exact_str(tier.rate)}/kWh")
    return "\n".join(lines)


def render_bill(schedule: TariffSchedule, usage) -> str:
    """Price line plus one row per tier that received energy."""
    rows = tier_breakdown(schedule, usage)
    total = sum((charge for _, _, charge in rows), Fraction(0))
    lines = [format_money(total)]
    for number, span, charge in rows:
        rate = schedule.tiers[number - 1].rate
        lines.append(
            f"tier {number}: {format_energy(span)} kWh @ {exact_str(rate)} = "
            f"{format_money(charge)} {schedule.currency}"
        )
    return "\n".join(lines)


def _demand_line(report: BillingReport) -> str:
    demand = report.demand
    par = "undefined" if demand.par is None else format_fixed(demand.par, 4)
    return (
        f"peak {format_energy(demand.peak)} kWh, mean {format_energy(demand.mean)} "
        f"kWh, PAR {par}"
    )


def render_report(report: BillingReport) -> str:
    lines = [f"scheme: {report.scheme.value}"]
    if report.policy is not None:
        lines[0] += f" (policy {report.policy.value})"
    grid = report.grid
    lines.append(
        f"period: {format_rfc3339(grid.period_start)} for {grid.period_days} days, "
        f"{exact_str(grid.slot_hours)}h slots ({grid.slot_count} slots)"
    )
    width = max([len("consumer")] + [len(c) for c in report.consumers])
    lines.append(f"{'consumer':<{width}}  {'billed':>12}")
    for consumer in report.consumers:
        lines.append(
            f"{consumer:<{width}}  "
            f"{format_money(report.billed_totals[consumer]):>12}"
        )
    lines.append(
        f"{'aggregate':<{width}}  {format_money(report.aggregate_billed):>12} "
        f"{report.currency}"
    )
    if report.zero_filled:
        lines.append(f"note: {report.zero_filled} consumer-slot cells had no readings")
    lines.append(_demand_line(report))
    return "\n".join(lines)


def render_comparison(comparison: SchemeComparison) -> str:
    consumers = comparison.monthly.consumers
    width = max([len("consumer"), len("aggregate")] + [len(c) for c in consumers])
    header = (
        f"{'consumer':<{width}}  {'monthly':>12}  {'slotted-ind':>12}  "
        f"{'slotted-group':>13}  {'premium':>10}  {'saving':>10}"
    )
    lines = [header]
    for consumer in consumers:
        lines.append(
            f"{consumer:<{width}}  "
            f"{format_money(comparison.monthly.billed_totals[consumer]):>12}  "
            f"{format_money(comparison.slotted_individual.billed_totals[consumer]):>12}  "
            f"{format_money(comparison.slotted_group.billed_totals[consumer]):>13}  "
            f"{format_money(comparison.per_consumer_premium[consumer]):>10}  "
            f"{format_money(comparison.per_consumer_saving[consumer]):>10}"
        )
    lines.append(
        f"{'aggregate':<{width}}  "
        f"{format_money(comparison.monthly.aggregate_billed):>12}  "
        f"{format_money(comparison.slotted_individual.aggregate_billed):>12}  "
        f"{format_money(comparison.slotted_group.aggregate_billed):>13}  "
        f"{format_money(comparison.slot_premium):>10}  "
        f"{format_money(comparison.group_saving):>10}"
    )
    lines.append(f"currency: {comparison.monthly.currency}")
    lines.append(_demand_line(comparison.monthly))
    return "\n".join(lines)


def render_shift(report: ShiftReport) -> str:
    def par(value):
        return "undefined" if value is None else format_fixed(value, 4)

    return "\n".join(
        [
            f"shift: {report.consumer} moves {format_energy(report.amount)} kWh "
            f"from slot {report.from_slot} to slot {report.to_slot}",
            f"allocated (group scheme): {format_money(report.allocated_before)} -> "
            f"{format_money(report.allocated_after)} "
            f"(delta {format_money(report.allocated_delta)})",
            f"slotted-individual: {format_money(report.individual_before)} -> "
            f"{format_money(report.individual_after)} "
            f"(delta {format_money(report.individual_delta)})",
            f"group aggregate: {format_money(report.group_billed_before)} -> "
            f"{format_money(report.group_billed_after)} "
            f"(delta {format_money(report.group_billed_delta)})",
            f"PAR: {par(report.par_before)} -> {par(report.par_after)}",
        ]
    )


def render_group_result(result: GroupPricingResult) -> str:
    lines = []
    for consumer, price in result.individual_prices.items():
        lines.append(f"{consumer}: {format_money(price)} {result.currency}")
    lines.append(
        f"individual total: {format_money(result.billed_individual_total)} "
        f"{result.currency}"
    )
    lines.append(
        f"group price: {format_money(result.billed_group_price)} {result.currency}"
    )
    lines.append(f"saving: {format_money(result.billed_saving)} {result.currency}")
    return "\n".join(lines)
