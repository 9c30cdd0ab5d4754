"""Walkthrough: shrinking a monthly tariff onto 6-hour time slots.

Run from the repository root:  python demos/slot_scaling.py
"""

from fractions import Fraction
from pathlib import Path

from progtariff import (
    format_energy,
    format_money,
    parse_schedule_file,
    progressive_price,
    scale_schedule,
    slot_factor,
)

schedule = parse_schedule_file(Path(__file__).parent.parent / "fixtures" / "kepco_residential.json")

factor = slot_factor(6, 30)
print(f"A 30-day month holds 120 six-hour slots, so the slot factor is {factor}.")

slot_schedule = scale_schedule(schedule, factor)
bound = slot_schedule.tiers[0].upper_bound
print(f"The 100 kWh first-tier bound becomes {bound} kWh per slot,")
print(f"displayed as {format_energy(bound)}. Keeping the exact 5/6 matters:")
print("rounding it to 0.8333 first would corrupt every price computed from it.")

print("\nScaling commutes with pricing. For any usage u and factor f,")
print("price(scaled schedule, f*u) equals f * price(original, u) exactly:")
for usage in (Fraction(240), Fraction(350), Fraction(1000, 3)):
    left = progressive_price(slot_schedule, factor * usage)
    right = factor * progressive_price(schedule, usage)
    print(
        f"  u={str(usage):>7} kWh: slot price {format_money(left):>7}, "
        f"scaled monthly price {format_money(right):>7}, equal: {left == right}"
    )

print("\nThis identity is why a consumer with a perfectly flat profile pays")
print("the same under slot billing as under monthly billing, while any")
print("unevenness makes slot billing cost more (never less).")
uneven = [Fraction(5, 2)] + [Fraction(0)] * 119
flat = [Fraction(5, 2) / 120] * 120
monthly_total = progressive_price(schedule, sum(uneven))
print(f"  2.5 kWh all in one slot : {format_money(progressive_price(slot_schedule, Fraction(5, 2)))}")
print(f"  2.5 kWh spread evenly   : {format_money(sum(progressive_price(slot_schedule, u) for u in flat))}")
print(f"  2.5 kWh billed monthly  : {format_money(monthly_total)}")
