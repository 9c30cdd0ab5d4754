"""Exact energy and money quantities.

Everything the engine computes with runs on `fractions.Fraction`, so a
tier bound like 100 kWh scaled by 1/120 stays the exact 5/6 instead of
collapsing to 0.8333. Rounding exists only as an explicit display step:
half-up to 2 decimals for money, 4 decimals for energy.
"""

from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from typing import Union

ExactLike = Union[int, str, Fraction, Decimal]

MONEY_PLACES = 2
ENERGY_PLACES = 4


def exact(value: ExactLike) -> Fraction:
    """Convert *value* to an exact Fraction.

    Accepts ints, Fractions, Decimals, and strings in decimal ("60.7")
    or ratio ("5/3") form. Floats are refused outright: a binary float
    is already an approximation, and letting one in would poison every
    exact comparison downstream.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a quantity")
    if isinstance(value, float):
        raise TypeError(
            f"refusing float {value!r}: pass a str, int, Decimal or Fraction "
            "so the value stays exact"
        )
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise ValueError(f"not a decimal or p/q number: {value!r}") from err
    raise TypeError(f"cannot convert {type(value).__name__} to an exact number")


def energy_amount(value: ExactLike) -> Fraction:
    """Exact non-negative kWh quantity."""
    amount = exact(value)
    if amount < 0:
        raise ValueError(f"energy must be >= 0, got {amount}")
    return amount


def money_amount(value: ExactLike) -> Fraction:
    """Exact non-negative currency quantity."""
    amount = exact(value)
    if amount < 0:
        raise ValueError(f"money must be >= 0, got {amount}")
    return amount


def scale_value(value: ExactLike) -> Fraction:
    """Exact positive multiplier."""
    factor = exact(value)
    if factor <= 0:
        raise ValueError(f"scale factor must be > 0, got {factor}")
    return factor


def round_half_up(value: Fraction, places: int = MONEY_PLACES) -> Fraction:
    """Round to *places* decimals, halves away from zero, still exact."""
    if value < 0:
        return -round_half_up(-value, places)
    quantum = 10**places
    return Fraction(math.floor(value * quantum + Fraction(1, 2)), quantum)


def round_money(value: ExactLike) -> Fraction:
    """Quantize a money value to minor units (half-up, exact result)."""
    return round_half_up(exact(value), MONEY_PLACES)


def format_fixed(value: Fraction, places: int) -> str:
    """Render with exactly *places* decimals, rounding half away from zero."""
    quantum = 10**places
    units = math.floor(abs(value) * quantum + Fraction(1, 2))
    sign = "-" if (value < 0 and units > 0) else ""
    if places == 0:
        return f"{sign}{units}"
    whole, frac = divmod(units, quantum)
    return f"{sign}{whole}.{frac:0{places}d}"


def format_money(value: ExactLike) -> str:
    return format_fixed(exact(value), MONEY_PLACES)


def format_energy(value: ExactLike) -> str:
    return format_fixed(exact(value), ENERGY_PLACES)


def exact_str(value: Fraction) -> str:
    """Lossless rendering: a terminating decimal when one exists, else p/q.

    Round-trips through :func:`exact` for every rational.
    """
    den = value.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    if places == 0:
        return str(value.numerator)
    quantum = 10**places
    units = value.numerator * (quantum // value.denominator)
    sign = "-" if units < 0 else ""
    whole, frac = divmod(abs(units), quantum)
    return f"{sign}{whole}.{frac:0{places}d}"
