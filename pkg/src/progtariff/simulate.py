"""Trace ingestion, slot partitioning, pricing schemes, and what-if shifts.

Three schemes are computed over the same per-consumer, per-slot usage
matrix:

* ``monthly-individual``: each consumer's period total priced with the
  tariff as quoted.
* ``slotted-individual``: the tariff rescaled onto one slot and applied
  to every consumer and slot separately. Per slot this uses higher tiers
  sooner, so a consumer never pays less than under the monthly scheme.
* ``slotted-group``: the slot tariff widened by the group size, applied
  to the pooled slot usage, and the collective price allocated back to
  consumers in proportion to their stand-alone prices.

All charges are exact rationals; per-consumer bills are rounded to minor
units only at the report boundary, and scheme aggregates are the sums of
those rounded bills (what the consumers actually pay).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .amounts import ExactLike, energy_amount, exact, round_money, scale_value
from .errors import InternalCheckError, SimulationError
from .grouping import (
    AllocationPolicy,
    group_slot_price,
    individual_slot_prices,
    proportional_allocation,
)
from .tariff import (
    HOURS_PER_DAY,
    TariffSchedule,
    progressive_price,
    scale_schedule,
    slot_factor,
)


def _require_utc(stamp: datetime, label: str) -> datetime:
    if stamp.tzinfo is None or stamp.utcoffset() is None:
        raise ValueError(f"{label} must be timezone-aware")
    return stamp.astimezone(timezone.utc)


def _seconds_between(start: datetime, end: datetime) -> Fraction:
    delta = end - start
    return Fraction(delta.days * 86400 + delta.seconds) + Fraction(
        delta.microseconds, 10**6
    )


@dataclass(frozen=True)
class MeterReading:
    """One meter delta: energy consumed starting at a UTC timestamp.

    ``end`` is optional; when present the energy is spread over
    [start, end) and may be split across slot boundaries, otherwise the
    reading is a point delta assigned to the slot containing ``start``.
    """

    consumer: str
    start: datetime
    energy: Fraction
    end: Optional[datetime] = None

    def __post_init__(self):
        if not self.consumer or not isinstance(self.consumer, str):
            raise ValueError("consumer id must be a non-empty string")
        object.__setattr__(self, "start", _require_utc(self.start, "reading start"))
        object.__setattr__(self, "energy", energy_amount(self.energy))
        if self.end is not None:
            end = _require_utc(self.end, "reading end")
            if end <= self.start:
                raise ValueError("reading end must be after its start")
            object.__setattr__(self, "end", end)


@dataclass(frozen=True)
class SlotGrid:
    """Partition of a billing period into equal slots.

    ``slot_hours`` must divide 24 so each day holds a whole number of
    slots; the period then spans ``period_days`` days from
    ``period_start`` (UTC).
    """

    slot_hours: Fraction
    period_days: int
    period_start: datetime

    def __post_init__(self):
        hours = scale_value(self.slot_hours)
        # slot_factor re-checks the divides-24 rule and the day count.
        slot_factor(hours, self.period_days)
        object.__setattr__(self, "slot_hours", hours)
        object.__setattr__(
            self, "period_start", _require_utc(self.period_start, "period start")
        )

    @property
    def slots_per_day(self) -> int:
        return int(Fraction(HOURS_PER_DAY) / self.slot_hours)

    @property
    def slot_count(self) -> int:
        return self.slots_per_day * self.period_days

    @property
    def slot_seconds(self) -> Fraction:
        return self.slot_hours * 3600

    @property
    def period_end(self) -> datetime:
        return self.period_start + timedelta(days=self.period_days)

    @property
    def factor(self) -> Fraction:
        return slot_factor(self.slot_hours, self.period_days)


@dataclass(frozen=True)
class SlotUsageMatrix:
    """Per-consumer, per-slot energy grid.

    Rows are keyed by consumer id and kept in sorted id order so every
    downstream report is deterministic. ``observed`` optionally records
    which cells received at least one reading; cells outside it were
    zero-filled for lack of data.
    """

    consumers: tuple[str, ...]
    slots: int
    usage: tuple[tuple[Fraction, ...], ...]
    observed: Optional[frozenset[tuple[str, int]]] = None

    def __post_init__(self):
        if not isinstance(self.slots, int) or isinstance(self.slots, bool) or self.slots < 1:
            raise SimulationError("matrix needs at least one slot")
        if list(self.consumers) != sorted(set(self.consumers)):
            raise SimulationError("consumer ids must be unique and sorted")
        if len(self.usage) != len(self.consumers):
            raise SimulationError("one usage row per consumer required")
        rows = []
        for consumer, row in zip(self.consumers, self.usage):
            if len(row) != self.slots:
                raise SimulationError(
                    f"consumer {consumer!r}: expected {self.slots} slots, got {len(row)}"
                )
            rows.append(tuple(energy_amount(cell) for cell in row))
        object.__setattr__(self, "usage", tuple(rows))
        object.__setattr__(self, "consumers", tuple(self.consumers))

    @classmethod
    def from_rows(
        cls, rows: Mapping[str, Sequence[ExactLike]], slots: Optional[int] = None
    ) -> "SlotUsageMatrix":
        """Build from a consumer->usages mapping, sorting consumers by id."""
        consumers = tuple(sorted(rows))
        if slots is None:
            if not consumers:
                raise SimulationError("empty matrix needs an explicit slot count")
            slots = len(rows[consumers[0]])
        usage = tuple(tuple(exact(cell) for cell in rows[c]) for c in consumers)
        return cls(consumers=consumers, slots=slots, usage=usage)

    def index_of(self, consumer: str) -> int:
        try:
            return self.consumers.index(consumer)
        except ValueError:
            raise SimulationError(f"unknown consumer {consumer!r}") from None

    def row(self, consumer: str) -> tuple[Fraction, ...]:
        return self.usage[self.index_of(consumer)]

    def row_total(self, consumer: str) -> Fraction:
        return sum(self.row(consumer), Fraction(0))

    def column(self, slot: int) -> dict[str, Fraction]:
        if not 0 <= slot < self.slots:
            raise SimulationError(f"slot {slot} out of range 0..{self.slots - 1}")
        return {c: self.usage[i][slot] for i, c in enumerate(self.consumers)}

    def column_total(self, slot: int) -> Fraction:
        return sum(self.column(slot).values(), Fraction(0))

    def total(self) -> Fraction:
        return sum((sum(row, Fraction(0)) for row in self.usage), Fraction(0))

    def with_shift(
        self, consumer: str, from_slot: int, to_slot: int, amount: ExactLike
    ) -> "SlotUsageMatrix":
        """New matrix with *amount* moved between two of a consumer's slots."""
        moved = energy_amount(amount)
        row_index = self.index_of(consumer)
        for label, slot in (("from_slot", from_slot), ("to_slot", to_slot)):
            if not isinstance(slot, int) or isinstance(slot, bool) or not 0 <= slot < self.slots:
                raise SimulationError(f"{label} {slot} out of range 0..{self.slots - 1}")
        available = self.usage[row_index][from_slot]
        if moved > available:
            raise SimulationError(
                f"cannot shift {moved} kWh out of slot {from_slot}: only "
                f"{available} available"
            )
        row = list(self.usage[row_index])
        row[from_slot] -= moved
        row[to_slot] += moved
        usage = tuple(
            tuple(row) if i == row_index else self.usage[i]
            for i in range(len(self.consumers))
        )
        return SlotUsageMatrix(
            consumers=self.consumers,
            slots=self.slots,
            usage=usage,
            observed=self.observed,
        )


class SchemeKind(Enum):
    MONTHLY_INDIVIDUAL = "monthly-individual"
    SLOTTED_INDIVIDUAL = "slotted-individual"
    SLOTTED_GROUP = "slotted-group"


@dataclass(frozen=True)
class DemandMetrics:
    """Aggregate load per slot plus peak, mean, and peak-to-average ratio.

    ``par`` is None when the period has no load at all (0/0 is reported
    as undefined, never as 0 or 1).
    """

    slot_loads: tuple[Fraction, ...]
    peak: Fraction
    mean: Fraction
    par: Optional[Fraction]


@dataclass(frozen=True)
class BillingReport:
    """One scheme's charges over a usage matrix.

    ``consumer_totals`` are exact pre-rounding sums of the consumer's
    slot charges; ``billed_totals`` round each total to minor units, and
    ``aggregate_billed`` sums the rounded bills. ``slot_charges`` is None
    for the monthly scheme, which has no per-slot structure. For the
    group scheme ``group_slot_prices`` holds the exact collective price
    of every slot (before allocation) and ``policy`` names the
    allocation policy used.
    """

    scheme: SchemeKind
    currency: str
    grid: SlotGrid
    consumers: tuple[str, ...]
    slot_charges: Optional[dict[str, tuple[Fraction, ...]]]
    consumer_totals: dict[str, Fraction]
    billed_totals: dict[str, Fraction]
    aggregate_billed: Fraction
    aggregate_exact: Fraction
    group_slot_prices: Optional[tuple[Fraction, ...]]
    policy: Optional[AllocationPolicy]
    demand: DemandMetrics
    zero_filled: Optional[int]


@dataclass(frozen=True)
class SchemeComparison:
    """All three schemes side by side, with billed-amount deltas.

    ``slot_premium`` is what slotting alone adds on top of the monthly
    bill; ``group_saving`` is what grouping takes back off the slotted
    bill. Both are differences of billed (minor-unit) totals.
    """

    monthly: BillingReport
    slotted_individual: BillingReport
    slotted_group: BillingReport
    per_consumer_premium: dict[str, Fraction]
    per_consumer_saving: dict[str, Fraction]
    slot_premium: Fraction
    group_saving: Fraction

    @property
    def demand(self) -> DemandMetrics:
        return self.monthly.demand


@dataclass(frozen=True)
class ShiftReport:
    """Effect of moving one consumer's energy between two slots.

    ``allocated_*`` track the consumer's billed total under the group
    scheme, ``individual_*`` the exact (unrounded) total under the
    slotted-individual scheme, and ``group_billed_*`` the whole group's
    billed aggregate. The input matrix is never modified.
    """

    consumer: str
    from_slot: int
    to_slot: int
    amount: Fraction
    allocated_before: Fraction
    allocated_after: Fraction
    allocated_delta: Fraction
    individual_before: Fraction
    individual_after: Fraction
    individual_delta: Fraction
    group_billed_before: Fraction
    group_billed_after: Fraction
    group_billed_delta: Fraction
    par_before: Optional[Fraction]
    par_after: Optional[Fraction]


def slot_partition(
    readings: Sequence[MeterReading], grid: SlotGrid
) -> SlotUsageMatrix:
    """Assign readings to grid slots, preserving total energy exactly.

    Point readings land in the slot containing their timestamp; interval
    readings are split across slots in proportion to time overlap. Every
    reading must lie inside the billing period, and one consumer's
    interval readings must not overlap each other. Cells that received
    no reading are zero-filled and tracked via ``observed``.
    """
    period_seconds = _seconds_between(grid.period_start, grid.period_end)
    consumers = sorted({reading.consumer for reading in readings})
    cells: dict[tuple[str, int], Fraction] = {}
    observed: set[tuple[str, int]] = set()
    intervals: dict[str, list[tuple[Fraction, Fraction]]] = {}

    for reading in readings:
        offset = _seconds_between(grid.period_start, reading.start)
        if offset < 0 or offset >= period_seconds:
            raise SimulationError(
                f"reading for {reading.consumer!r} at {reading.start.isoformat()} "
                "lies outside the billing period"
            )
        if reading.end is None:
            slot = math.floor(offset / grid.slot_seconds)
            key = (reading.consumer, slot)
            cells[key] = cells.get(key, Fraction(0)) + reading.energy
            observed.add(key)
            continue
        end_offset = _seconds_between(grid.period_start, reading.end)
        if end_offset > period_seconds:
            raise SimulationError(
                f"reading for {reading.consumer!r} ending {reading.end.isoformat()} "
                "lies outside the billing period"
            )
        intervals.setdefault(reading.consumer, []).append((offset, end_offset))
        duration = end_offset - offset
        first = math.floor(offset / grid.slot_seconds)
        slot = first
        while slot * grid.slot_seconds < end_offset and slot < grid.slot_count:
            lo = max(offset, slot * grid.slot_seconds)
            hi = min(end_offset, (slot + 1) * grid.slot_seconds)
            if hi > lo:
                key = (reading.consumer, slot)
                cells[key] = cells.get(key, Fraction(0)) + reading.energy * (hi - lo) / duration
                observed.add(key)
            slot += 1

    for consumer, spans in intervals.items():
        spans.sort()
        for (_, prev_end), (next_start, _) in zip(spans, spans[1:]):
            if next_start < prev_end:
                raise SimulationError(
                    f"overlapping interval readings for consumer {consumer!r}"
                )

    usage = tuple(
        tuple(cells.get((consumer, slot), Fraction(0)) for slot in range(grid.slot_count))
        for consumer in consumers
    )
    return SlotUsageMatrix(
        consumers=tuple(consumers),
        slots=grid.slot_count,
        usage=usage,
        observed=frozenset(observed),
    )


def demand_metrics(matrix: SlotUsageMatrix) -> DemandMetrics:
    """Aggregate slot loads and the peak-to-average ratio."""
    loads = tuple(matrix.column_total(slot) for slot in range(matrix.slots))
    peak = max(loads)
    mean = sum(loads, Fraction(0)) / len(loads)
    par = None if mean == 0 else peak / mean
    return DemandMetrics(slot_loads=loads, peak=peak, mean=mean, par=par)


def _check_grid(matrix: SlotUsageMatrix, schedule: TariffSchedule, grid: SlotGrid):
    if schedule.base_hours != HOURS_PER_DAY * grid.period_days:
        raise SimulationError(
            f"schedule is quoted for {schedule.base_hours} hours but the grid "
            f"covers {HOURS_PER_DAY * grid.period_days}"
        )
    if matrix.slots != grid.slot_count:
        raise SimulationError(
            f"matrix has {matrix.slots} slots but the grid defines {grid.slot_count}"
        )


def _zero_filled(matrix: SlotUsageMatrix) -> Optional[int]:
    if matrix.observed is None:
        return None
    return matrix.slots * len(matrix.consumers) - len(matrix.observed)


def run_scheme(
    matrix: SlotUsageMatrix,
    schedule: TariffSchedule,
    grid: SlotGrid,
    scheme: SchemeKind | str,
    policy: AllocationPolicy | str = AllocationPolicy.EXACT_SUM,
) -> BillingReport:
    """Bill the matrix under one scheme.

    The schedule must be quoted for the grid's period. For the group
    scheme the collective slot price is checked against the sum of
    individual prices (it can never exceed it for a progressive
    schedule); a violation raises InternalCheckError since it would mean
    the engine itself is wrong.
    """
    scheme = SchemeKind(scheme)
    policy = AllocationPolicy(policy)
    _check_grid(matrix, schedule, grid)
    demand = demand_metrics(matrix)
    slot_charges: Optional[dict[str, tuple[Fraction, ...]]] = None
    group_prices: Optional[tuple[Fraction, ...]] = None
    used_policy: Optional[AllocationPolicy] = None

    if scheme is SchemeKind.MONTHLY_INDIVIDUAL:
        totals = {
            consumer: progressive_price(schedule, matrix.row_total(consumer))
            for consumer in matrix.consumers
        }
    elif scheme is SchemeKind.SLOTTED_INDIVIDUAL:
        slot_schedule = scale_schedule(schedule, grid.factor)
        slot_charges = {
            consumer: tuple(
                progressive_price(slot_schedule, cell) for cell in matrix.row(consumer)
            )
            for consumer in matrix.consumers
        }
        totals = {
            consumer: sum(slot_charges[consumer], Fraction(0))
            for consumer in matrix.consumers
        }
    else:
        slot_schedule = scale_schedule(schedule, grid.factor)
        used_policy = policy
        charges: dict[str, list[Fraction]] = {c: [] for c in matrix.consumers}
        prices = []
        for slot in range(matrix.slots):
            column = matrix.column(slot)
            if not column:
                prices.append(Fraction(0))
                continue
            individual = individual_slot_prices(slot_schedule, column)
            collective = group_slot_price(slot_schedule, column)
            if schedule.is_progressive and collective > sum(individual.values(), Fraction(0)):
                raise InternalCheckError(
                    f"slot {slot}: collective price {collective} exceeds the sum "
                    f"of individual prices"
                )
            allocation = proportional_allocation(collective, individual, policy)
            prices.append(collective)
            for consumer in matrix.consumers:
                charges[consumer].append(allocation.shares[consumer])
        slot_charges = {c: tuple(v) for c, v in charges.items()}
        group_prices = tuple(prices)
        totals = {
            consumer: sum(slot_charges[consumer], Fraction(0))
            for consumer in matrix.consumers
        }

    billed = {consumer: round_money(total) for consumer, total in totals.items()}
    return BillingReport(
        scheme=scheme,
        currency=schedule.currency,
        grid=grid,
        consumers=matrix.consumers,
        slot_charges=slot_charges,
        consumer_totals=totals,
        billed_totals=billed,
        aggregate_billed=sum(billed.values(), Fraction(0)),
        aggregate_exact=sum(totals.values(), Fraction(0)),
        group_slot_prices=group_prices,
        policy=used_policy,
        demand=demand,
        zero_filled=_zero_filled(matrix),
    )


def compare_schemes(
    matrix: SlotUsageMatrix,
    schedule: TariffSchedule,
    grid: SlotGrid,
    policy: AllocationPolicy | str = AllocationPolicy.EXACT_SUM,
) -> SchemeComparison:
    """Run all three schemes and difference their billed totals."""
    monthly = run_scheme(matrix, schedule, grid, SchemeKind.MONTHLY_INDIVIDUAL)
    slotted = run_scheme(matrix, schedule, grid, SchemeKind.SLOTTED_INDIVIDUAL)
    grouped = run_scheme(matrix, schedule, grid, SchemeKind.SLOTTED_GROUP, policy)
    if schedule.is_progressive:
        for consumer in matrix.consumers:
            if slotted.consumer_totals[consumer] < monthly.consumer_totals[consumer]:
                raise InternalCheckError(
                    f"consumer {consumer!r}: slotted total fell below the monthly total"
                )
    premium = {
        c: slotted.billed_totals[c] - monthly.billed_totals[c]
        for c in matrix.consumers
    }
    saving = {
        c: slotted.billed_totals[c] - grouped.billed_totals[c]
        for c in matrix.consumers
    }
    return SchemeComparison(
        monthly=monthly,
        slotted_individual=slotted,
        slotted_group=grouped,
        per_consumer_premium=premium,
        per_consumer_saving=saving,
        slot_premium=slotted.aggregate_billed - monthly.aggregate_billed,
        group_saving=slotted.aggregate_billed - grouped.aggregate_billed,
    )


def what_if_shift(
    matrix: SlotUsageMatrix,
    schedule: TariffSchedule,
    grid: SlotGrid,
    consumer: str,
    from_slot: int,
    to_slot: int,
    amount: ExactLike,
    policy: AllocationPolicy | str = AllocationPolicy.EXACT_SUM,
) -> ShiftReport:
    """Evaluate one hypothetical shift without touching the input matrix."""
    moved = energy_amount(amount)
    shifted = matrix.with_shift(consumer, from_slot, to_slot, moved)

    group_before = run_scheme(matrix, schedule, grid, SchemeKind.SLOTTED_GROUP, policy)
    group_after = run_scheme(shifted, schedule, grid, SchemeKind.SLOTTED_GROUP, policy)
    solo_before = run_scheme(matrix, schedule, grid, SchemeKind.SLOTTED_INDIVIDUAL)
    solo_after = run_scheme(shifted, schedule, grid, SchemeKind.SLOTTED_INDIVIDUAL)

    return ShiftReport(
        consumer=consumer,
        from_slot=from_slot,
        to_slot=to_slot,
        amount=moved,
        allocated_before=group_before.billed_totals[consumer],
        allocated_after=group_after.billed_totals[consumer],
        allocated_delta=group_after.billed_totals[consumer]
        - group_before.billed_totals[consumer],
        individual_before=solo_before.consumer_totals[consumer],
        individual_after=solo_after.consumer_totals[consumer],
        individual_delta=solo_after.consumer_totals[consumer]
        - solo_before.consumer_totals[consumer],
        group_billed_before=group_before.aggregate_billed,
        group_billed_after=group_after.aggregate_billed,
        group_billed_delta=group_after.aggregate_billed - group_before.aggregate_billed,
        par_before=group_before.demand.par,
        par_after=group_after.demand.par,
    )
