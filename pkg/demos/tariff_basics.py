"""Walkthrough: pricing a month of consumption on a progressive tariff.

Run from the repository root:  python demos/tariff_basics.py
"""

from pathlib import Path

from progtariff import (
    exact_str,
    format_energy,
    format_money,
    parse_schedule_file,
    progressive_price,
    tier_breakdown,
)

schedule = parse_schedule_file(Path(__file__).parent.parent / "fixtures" / "kepco_residential.json")

print("A progressive tariff charges each consumption block at its own rate:")
previous = 0
for number, tier in enumerate(schedule.tiers, start=1):
    span = f"{previous}+" if tier.upper_bound is None else f"{previous}-{tier.upper_bound}"
    print(f"  tier {number}: {span:>8} kWh at {exact_str(tier.rate)} {schedule.currency}/kWh")
    if tier.upper_bound is not None:
        previous = tier.upper_bound

usage = 350
print(f"\nA household drawing {usage} kWh in the month fills the first three")
print("tiers and half of the fourth:")
for number, energy, charge in tier_breakdown(schedule, usage):
    print(
        f"  tier {number}: {format_energy(energy):>9} kWh -> "
        f"{format_money(charge):>9} {schedule.currency}"
    )
total = progressive_price(schedule, usage)
print(f"  total: {format_money(total)} {schedule.currency}")

# Everything is exact: the engine works on rationals and rounds only
# when a figure is printed.
third = progressive_price(schedule, "100/3")
print(f"\nPrice of 100/3 kWh is the exact rational {third},")
print(f"displayed as {format_money(third)} {schedule.currency}.")
