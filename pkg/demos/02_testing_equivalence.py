"""Passing probabilities of reactive tests under stepwise time bounds.

A test runs in parallel with the process, synchronizing on every visible
name.  The bound sequence theta constrains the average duration of each
step; only computations that reach success in exactly len(theta) steps and
stay within the bounds count.
"""

from fractions import Fraction

from mpcalc.parser import parse_term
from mpcalc.testing import canonical_tests, parse_test, prob_pass

# Two processes that only differ in how fast their internal move is.
fast = parse_term("<tau,2>.0")
slow = parse_term("<tau,1>.0")
success = parse_test("s")

half = (Fraction(1, 2),)
print("empty test, theta=(1/2):")
print("  fast:", prob_pass(fast, success, half))
print("  slow:", prob_pass(slow, success, half))
print()

# A race between an internal move and an observable one.  The test can
# only win through the a-branch, so the passing probability is the
# branching probability of a, once theta grants enough time.
for lam, gam in ((1, 1), (2, 3), (5, 1)):
    process = parse_term(f"<tau,{lam}>.0 + <a,{gam}>.0")
    test = parse_test("<a,*1>.s")
    threshold = Fraction(1, lam + gam)
    print(f"tau rate {lam} vs a rate {gam}:")
    print(f"  at the threshold {threshold}:", prob_pass(process, test, (threshold,)))
    print(f"  just below:", prob_pass(process, test, (threshold - Fraction(1, 100),)))
print()

# Canonical tests observe one name per step and route every other enabled
# name into a dead branch, keeping the race alive without succeeding.
print("canonical tests over {a,b} up to depth 1:")
for test in canonical_tests(["a", "b"], 1):
    print(" ", test)
