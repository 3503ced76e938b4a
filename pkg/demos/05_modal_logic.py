"""Quantitative modal formulas: diamonds, disjoint disjunctions, and the
characterization cross-check against the equivalence decider.

eval(P, theta, phi) is the probability that P satisfies phi within the
stepwise average-time bounds theta.  Disjunctions redistribute the time
budget: each disjunct gets extra head time proportional to how much
slower its own actions are than the overall race.
"""

from fractions import Fraction

from mpcalc.mlogic import (TRUE, Diamond, characterization_check,
                           enumerate_formulas, eval as eval_formula)
from mpcalc.parser import parse_formula, parse_term

process = parse_term("<a,2>.0 + <b,3>.0 + <tau,1>.0")
formula = parse_formula("<a>true \\/ <b>true")
for bound in (Fraction(1, 7), Fraction(1, 6), Fraction(2)):
    value = eval_formula(process, (bound,), formula)
    print(f"eval(P, ({bound},), {formula}) = {value}")
print()

# A diamond needs its action to win the race within the bound.
single = parse_term("<a,3>.0")
print("diamond at the average sojourn:",
      eval_formula(single, (Fraction(1, 3),), Diamond("a", TRUE)))
print("diamond just below:",
      eval_formula(single, (Fraction(1, 4),), Diamond("a", TRUE)))
print()

# Formula counts grow fast with depth; disjuncts must start with
# disjoint action sets, which prunes the space.
for depth in range(4):
    print(f"well-formed formulas over {{a,b}} at depth {depth}:",
          len(enumerate_formulas(("a", "b"), depth)))
print()

# The formula semantics distinguishes exactly what the decider
# distinguishes; a disagreement would be a bug witness.
report = characterization_check(parse_term("<tau,2>.0"), parse_term("<tau,1>.0"),
                                formula_depth=1)
theta_text = ",".join(str(v) for v in report.theta)
print("internal race counterexample:",
      f"formula {report.formula}, theta ({theta_text}),",
      f"values {report.value_left} vs {report.value_right}")
report = characterization_check(parse_term("<a,1>.<b,5>.0 + <a,2>.<b,5>.0"),
                                parse_term("<a,3>.<b,5>.0"), formula_depth=3)
print("deferred choice stays consistent over",
      report.formulas_checked, "formulas:", report.consistent)
