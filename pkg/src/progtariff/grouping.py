"""Collective tariff application for consumer groups, and price allocation.

For one time slot, a group of N consumers can be billed as a single
virtual consumer: widen the slot tariff's ranges by N and price the
pooled usage. Because the price function is convex, the collective
price never exceeds the sum of stand-alone individual prices, the gap
is the group's saving, and inactive members still matter since their
unused low-tier range is what the active members absorb.

The collective price is then split back across consumers in proportion
to their stand-alone prices. Two rounding policies are provided:

* ``independent``: each share rounded half-up on its own. Matches how
  such figures are usually published, but the rounded shares need not
  sum to the rounded group price.
* ``exact-sum``: largest-remainder rounding in minor units, so shares
  sum exactly to the rounded group price. The default for billing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .amounts import (
    MONEY_PLACES,
    ExactLike,
    energy_amount,
    money_amount,
    round_half_up,
    round_money,
)
from .errors import AllocationError
from .tariff import TariffSchedule, progressive_price, scale_schedule

UsageVectorLike = Union[Mapping[str, ExactLike], Sequence[tuple[str, ExactLike]]]


class AllocationPolicy(Enum):
    INDEPENDENT = "independent"
    EXACT_SUM = "exact-sum"


@dataclass(frozen=True)
class AllocationResult:
    """Per-consumer display-money shares of a group price.

    ``adjustments`` lists the consumers that received extra minor units
    during exact-sum reconciliation, as (consumer, units) pairs; it is
    empty under the independent policy.
    """

    shares: dict[str, Fraction]
    policy: AllocationPolicy
    adjustments: tuple[tuple[str, int], ...]

    @property
    def total(self) -> Fraction:
        return sum(self.shares.values(), Fraction(0))


@dataclass(frozen=True)
class GroupPricingResult:
    """Individual prices, collective price, and the gap between them.

    All three are exact, unrounded amounts; ``saving`` is the exact
    sum-of-individuals minus the group price and is non-negative for
    every progressive schedule. The ``billed_*`` properties give the
    minor-unit view, where the individual total is the sum of the
    individually rounded bills (the number a published comparison adds
    up to) and the saving is the difference of the billed totals.
    """

    individual_prices: dict[str, Fraction]
    group_price: Fraction
    saving: Fraction
    currency: str

    @property
    def individual_total(self) -> Fraction:
        return sum(self.individual_prices.values(), Fraction(0))

    @property
    def billed_individual_total(self) -> Fraction:
        return sum(
            (round_money(price) for price in self.individual_prices.values()),
            Fraction(0),
        )

    @property
    def billed_group_price(self) -> Fraction:
        return round_money(self.group_price)

    @property
    def billed_saving(self) -> Fraction:
        return self.billed_individual_total - self.billed_group_price


def _normalize_usages(usages: UsageVectorLike) -> list[tuple[str, Fraction]]:
    if isinstance(usages, Mapping):
        pairs = list(usages.items())
    else:
        pairs = [(consumer, amount) for consumer, amount in usages]
    seen = set()
    normalized = []
    for consumer, amount in pairs:
        if not isinstance(consumer, str) or not consumer:
            raise ValueError(f"consumer id must be a non-empty string, got {consumer!r}")
        if consumer in seen:
            raise ValueError(f"duplicate consumer id {consumer!r}")
        seen.add(consumer)
        normalized.append((consumer, energy_amount(amount)))
    return normalized


def individual_slot_prices(
    slot_schedule: TariffSchedule, usages: UsageVectorLike
) -> dict[str, Fraction]:
    """Price every consumer's slot usage on its own, exactly."""
    return {
        consumer: progressive_price(slot_schedule, amount)
        for consumer, amount in _normalize_usages(usages)
    }


def group_slot_price(
    slot_schedule: TariffSchedule, usages: UsageVectorLike
) -> Fraction:
    """Collective price of the pooled usage, tiers widened by group size.

    The group size N counts every consumer in the vector, including
    members with zero usage in this slot; their idle tier range is
    exactly what grouping lets the others use.
    """
    members = _normalize_usages(usages)
    if not members:
        raise ValueError("group must contain at least one consumer")
    pooled = sum((amount for _, amount in members), Fraction(0))
    widened = scale_schedule(slot_schedule, len(members))
    return progressive_price(widened, pooled)


def proportional_allocation(
    group_price: ExactLike,
    individual_prices: Mapping[str, ExactLike] | Sequence[tuple[str, ExactLike]],
    policy: AllocationPolicy | str = AllocationPolicy.EXACT_SUM,
) -> AllocationResult:
    """Split *group_price* across consumers in proportion to their prices.

    Raw share_i = group_price * price_i / sum(prices), computed exactly.
    The independent policy rounds each raw share half-up on its own; the
    exact-sum policy floors every share to minor units and hands the
    remaining units to the largest fractional remainders, ties broken by
    consumer id, so the shares sum exactly to round_money(group_price).

    A zero price sum with a positive group price has no defined
    proportions and raises AllocationError; an all-zero group allocates
    zero to everyone.
    """
    policy = AllocationPolicy(policy)
    group = money_amount(group_price)
    if isinstance(individual_prices, Mapping):
        pairs = list(individual_prices.items())
    else:
        pairs = list(individual_prices)
    prices = {}
    for consumer, price in pairs:
        if consumer in prices:
            raise ValueError(f"duplicate consumer id {consumer!r}")
        prices[consumer] = money_amount(price)
    total = sum(prices.values(), Fraction(0))
    if total == 0:
        if group != 0:
            raise AllocationError(
                "cannot allocate a positive group price over all-zero "
                "individual prices"
            )
        return AllocationResult(
            shares={consumer: Fraction(0) for consumer in prices},
            policy=policy,
            adjustments=(),
        )
    raw = {consumer: group * price / total for consumer, price in prices.items()}
    if policy is AllocationPolicy.INDEPENDENT:
        shares = {consumer: round_half_up(value) for consumer, value in raw.items()}
        return AllocationResult(shares=shares, policy=policy, adjustments=())

    minor = 10**MONEY_PLACES
    floors = {c: Fraction(math.floor(value * minor), minor) for c, value in raw.items()}
    target = round_money(group)
    shortfall = int((target - sum(floors.values(), Fraction(0))) * minor)
    # Largest fractional remainder first; consumer id breaks ties.
    order = sorted(raw, key=lambda c: (floors[c] - raw[c], c))
    shares = dict(floors)
    received: dict[str, int] = {}
    for step in range(shortfall):
        consumer = order[step % len(order)]
        shares[consumer] += Fraction(1, minor)
        received[consumer] = received.get(consumer, 0) + 1
    adjustments = tuple((c, received[c]) for c in prices if c in received)
    return AllocationResult(shares=shares, policy=policy, adjustments=adjustments)


def group_saving(
    slot_schedule: TariffSchedule, usages: UsageVectorLike
) -> GroupPricingResult:
    """Individual prices, collective price, and the resulting saving."""
    members = _normalize_usages(usages)
    if not members:
        raise ValueError("group must contain at least one consumer")
    individual = individual_slot_prices(slot_schedule, members)
    group = group_slot_price(slot_schedule, members)
    total = sum(individual.values(), Fraction(0))
    return GroupPricingResult(
        individual_prices=individual,
        group_price=group,
        saving=total - group,
        currency=slot_schedule.currency,
    )
