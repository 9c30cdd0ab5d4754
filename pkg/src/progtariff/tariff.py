"""Progressive (block) tariff schedules and their exact evaluation.

A progressive tariff charges successive blocks of consumption at
increasing per-kWh rates: the first 100 kWh at one rate, the next 100 at
a higher one, and so on, with the last tier open-ended. The price
function is piecewise linear and, as long as rates never decrease,
convex. Schedules can be rescaled exactly, to shrink a monthly tariff
onto a 6-hour slot or to widen a slot tariff for a group of consumers,
and scaling commutes with pricing:

    progressive_price(scale_schedule(s, f), f * u) == f * progressive_price(s, u)

holds as an exact identity for every rational f > 0. That identity is
what makes slot-level and period-level billing comparable at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .amounts import ExactLike, energy_amount, exact, scale_value
from .errors import ScheduleError

HOURS_PER_DAY = 24


@dataclass(frozen=True)
class TariffTier:
    """One consumption block: its cumulative upper bound and its rate.

    ``upper_bound`` is the cumulative kWh level where the tier ends, or
    None for the open-ended last tier.
    """

    upper_bound: Optional[Fraction]
    rate: Fraction

    def __post_init__(self):
        if self.upper_bound is not None:
            bound = energy_amount(self.upper_bound)
            if bound <= 0:
                raise ScheduleError(f"tier upper bound must be > 0, got {bound}")
            object.__setattr__(self, "upper_bound", bound)
        rate = exact(self.rate)
        if rate < 0:
            raise ScheduleError(f"tier rate must be >= 0, got {rate}")
        object.__setattr__(self, "rate", rate)


@dataclass(frozen=True)
class TariffSchedule:
    """An ordered list of tiers plus the billing period they were quoted for.

    Invariants enforced at construction: at least one tier, strictly
    increasing bounds, exactly one unbounded tier and it comes last, and
    non-decreasing rates. The last rule keeps the price function convex;
    a deliberately non-progressive schedule is accepted only with
    ``allow_rate_decrease=True``, and convexity-based sanity checks are
    skipped for it downstream.
    """

    tiers: tuple[TariffTier, ...]
    currency: str = "KRW"
    base_hours: Fraction = Fraction(720)
    allow_rate_decrease: bool = False

    def __post_init__(self):
        tiers = tuple(self.tiers)
        if not tiers:
            raise ScheduleError("schedule needs at least one tier")
        previous = Fraction(0)
        for index, tier in enumerate(tiers, start=1):
            if tier.upper_bound is None:
                if index != len(tiers):
                    raise ScheduleError(
                        f"tier {index}: only the last tier may be unbounded"
                    )
            else:
                if tier.upper_bound <= previous:
                    raise ScheduleError(
                        f"tier {index}: bound {tier.upper_bound} does not increase "
                        f"past {previous}"
                    )
                previous = tier.upper_bound
        if tiers[-1].upper_bound is not None:
            raise ScheduleError("last tier must be unbounded")
        if not self.allow_rate_decrease:
            for index in range(1, len(tiers)):
                if tiers[index].rate < tiers[index - 1].rate:
                    raise ScheduleError(
                        f"tier {index + 1}: rate {tiers[index].rate} decreases; "
                        "pass allow_rate_decrease=True to accept a "
                        "non-progressive schedule"
                    )
        base = scale_value(self.base_hours)
        if not self.currency or not isinstance(self.currency, str):
            raise ScheduleError("currency must be a non-empty string")
        object.__setattr__(self, "tiers", tiers)
        object.__setattr__(self, "base_hours", base)

    @property
    def is_progressive(self) -> bool:
        """True when rates never decrease (convex price function)."""
        rates = [tier.rate for tier in self.tiers]
        return all(a <= b for a, b in zip(rates, rates[1:]))


def validate_schedule(
    raw: Mapping, *, allow_rate_decrease: bool = False
) -> TariffSchedule:
    """Build a TariffSchedule from a plain description mapping.

    Expected shape::

        {"currency": "KRW",
         "base_period_days": 30,
         "tiers": [{"upper_kwh": 100, "rate": "60.7"}, ...,
                   {"upper_kwh": null, "rate": "709.5"}]}

    Bounds and rates may be ints or decimal / p-over-q strings; they are
    parsed to exact rationals. A tier may carry ``upper_kwh_exact`` (a
    lossless p/q string) which takes precedence over ``upper_kwh``; the
    same goes for ``rate_exact``. Raises ScheduleError on any violation.
    """
    if not isinstance(raw, Mapping):
        raise ScheduleError(f"schedule description must be a mapping, got {type(raw).__name__}")
    unknown = set(raw) - {
        "currency",
        "base_period_days",
        "base_period_days_exact",
        "tiers",
        "allow_rate_decrease",
    }
    if unknown:
        raise ScheduleError(f"unknown schedule fields: {sorted(unknown)}")
    currency = raw.get("currency", "KRW")
    override = bool(raw.get("allow_rate_decrease", False)) or allow_rate_decrease
    try:
        base_days = scale_value(
            raw.get("base_period_days_exact", raw.get("base_period_days", 30))
        )
    except (ValueError, TypeError) as err:
        raise ScheduleError(f"base_period_days: {err}") from err
    tiers_raw = raw.get("tiers")
    if not isinstance(tiers_raw, Sequence) or isinstance(tiers_raw, (str, bytes)):
        raise ScheduleError("schedule needs a 'tiers' list")
    tiers = []
    for index, item in enumerate(tiers_raw, start=1):
        if not isinstance(item, Mapping):
            raise ScheduleError(f"tier {index}: expected a mapping")
        bad = set(item) - {"upper_kwh", "upper_kwh_exact", "rate", "rate_exact"}
        if bad:
            raise ScheduleError(f"tier {index}: unknown fields {sorted(bad)}")
        upper = item.get("upper_kwh_exact", item.get("upper_kwh"))
        if "rate" not in item and "rate_exact" not in item:
            raise ScheduleError(f"tier {index}: missing rate")
        rate = item.get("rate_exact", item.get("rate"))
        try:
            tiers.append(TariffTier(None if upper is None else energy_amount(upper), exact(rate)))
        except (ValueError, TypeError) as err:
            raise ScheduleError(f"tier {index}: {err}") from err
    return TariffSchedule(
        tiers=tuple(tiers),
        currency=currency,
        base_hours=base_days * HOURS_PER_DAY,
        allow_rate_decrease=override,
    )


def progressive_price(schedule: TariffSchedule, usage: ExactLike) -> Fraction:
    """Exact price of *usage* kWh under *schedule*.

    Fills tiers in order: energy inside each tier's range is charged at
    that tier's rate, and whatever exceeds the last bounded tier is
    charged at the open-ended rate. The result is an exact, unrounded
    currency amount.
    """
    remaining = energy_amount(usage)
    previous = Fraction(0)
    total = Fraction(0)
    for tier in schedule.tiers:
        if remaining == 0:
            break
        if tier.upper_bound is None:
            span = remaining
        else:
            span = min(remaining, tier.upper_bound - previous)
            previous = tier.upper_bound
        total += tier.rate * span
        remaining -= span
    return total


def tier_breakdown(
    schedule: TariffSchedule, usage: ExactLike
) -> list[tuple[int, Fraction, Fraction]]:
    """Per-tier (tier number, energy in tier, charge) rows for *usage*.

    Only tiers that actually receive energy appear; numbering is 1-based
    and in schedule order. Energies sum to the usage and charges sum to
    progressive_price, both exactly.
    """
    remaining = energy_amount(usage)
    previous = Fraction(0)
    rows = []
    for number, tier in enumerate(schedule.tiers, start=1):
        if remaining == 0:
            break
        if tier.upper_bound is None:
            span = remaining
        else:
            span = min(remaining, tier.upper_bound - previous)
            previous = tier.upper_bound
        if span > 0:
            rows.append((number, span, tier.rate * span))
        remaining -= span
    return rows


def scale_schedule(schedule: TariffSchedule, factor: ExactLike) -> TariffSchedule:
    """Rescale every tier range by *factor*, keeping rates untouched.

    Shrinking (factor < 1) adapts a tariff to a shorter period, for
    example 1/120 maps a 30-day tariff onto one 6-hour slot. Widening by
    an integer N turns a slot tariff into the collective tariff for a
    group of N consumers. The base period annotation scales along.
    """
    multiplier = scale_value(factor)
    tiers = tuple(
        TariffTier(
            None if tier.upper_bound is None else tier.upper_bound * multiplier,
            tier.rate,
        )
        for tier in schedule.tiers
    )
    return TariffSchedule(
        tiers=tiers,
        currency=schedule.currency,
        base_hours=schedule.base_hours * multiplier,
        allow_rate_decrease=schedule.allow_rate_decrease,
    )


def slot_factor(slot_hours: ExactLike, days_per_period: int) -> Fraction:
    """Factor that maps a whole-period tariff onto one time slot.

    ``slot_hours`` must divide 24 so a day splits into whole slots;
    the factor is then slot_hours / (24 * days_per_period). With 6-hour
    slots and a 30-day period this is exactly 1/120.
    """
    hours = scale_value(slot_hours)
    if (Fraction(HOURS_PER_DAY) / hours).denominator != 1:
        raise ValueError(f"slot_hours must divide 24 evenly, got {hours}")
    if isinstance(days_per_period, bool) or not isinstance(days_per_period, int):
        raise TypeError("days_per_period must be an integer")
    if days_per_period < 1:
        raise ValueError(f"days_per_period must be >= 1, got {days_per_period}")
    return hours / (HOURS_PER_DAY * days_per_period)
