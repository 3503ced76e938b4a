"""Build the transition system of a few terms and look at its rates.

Transitions carry multiplicities: two identical branches are one arrow
taken twice, so the race still sees the summed rate.
"""

from fractions import Fraction

from mpcalc.parser import parse_term
from mpcalc.rates import EXPONENTIAL, avg_sojourn, rate_o, rate_t
from mpcalc.semantics import build_lts, export_dot


def show(source: str) -> None:
    term = parse_term(source)
    lts = build_lts(term)
    print(f"{source}")
    print(f"  states: {len(lts.states)}  performance closed: {lts.performance_closed}")
    for tr in lts.transitions():
        extra = f" x{tr.multiplicity}" if tr.multiplicity > 1 else ""
        print(f"  {tr.source}  --{tr.name},{tr.rate}{extra}-->  {tr.target}")
    print()


show("<a,3>.0")
show("<a,1>.0 + <a,1>.0")
show("<a,2>.<b,1>.0 |[b]| <b,*1>.0")
show("rec X : <a,1>.<tau,2>.X")

race = parse_term("<a,1>.0 + <a,1>.0")
print("doubled branch:")
print("  total exit rate:", rate_t(race, EXPONENTIAL))
print("  a-rate:", rate_o(race, "a", EXPONENTIAL))
print("  average sojourn:", avg_sojourn(race), "=", Fraction(1, 2))
print()

print("DOT output for the synchronized composition:")
print(export_dot(build_lts(parse_term("<a,2>.0 |[a]| (<a,*1>.0 + <a,*3>.0)"))))
