from __future__ import annotations

from fractions import Fraction

from mpcalc.parser import parse_term
from mpcalc.rates import EXPONENTIAL, PASSIVE, avg_sojourn, rate_e, rate_o, rate_t


def test_rate_t_sums_aggregated_exponentials():
    term = parse_term("<a,1>.0 + <a,1>.0 + <b,3/2>.0")
    assert rate_t(term, EXPONENTIAL) == Fraction(7, 2)
    assert rate_t(parse_term("0"), EXPONENTIAL) == 0


def test_passive_level_counts_weights():
    term = parse_term("<a,*2>.0 + <a,*1>.0 + <b,3>.0")
    assert rate_t(term, PASSIVE) == 3
    assert rate_o(term, "a", PASSIVE) == 3
    assert rate_o(term, "b", EXPONENTIAL) == 3


def test_rate_e_filters_by_destination():
    term = parse_term("<a,1>.<b,1>.0 + <a,2>.0")
    nil = parse_term("0")
    assert rate_e(term, "a", EXPONENTIAL, {nil}) == 2
    assert rate_e(term, "a", EXPONENTIAL, lambda s: s != nil) == 1
    assert rate_e(term, "a", EXPONENTIAL, None) == 3


def test_avg_sojourn():
    assert avg_sojourn(parse_term("<a,1>.0 + <b,3>.0")) == Fraction(1, 4)
    assert avg_sojourn(parse_term("0")) == float("inf")
