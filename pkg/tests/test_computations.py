from __future__ import annotations

from fractions import Fraction

import pytest

from mpcalc.computations import (enumerate_computations, filter_le_theta,
                                 filter_len, make_theta, prob, prob_set, time_a)
from mpcalc.errors import DependentComputations
from mpcalc.parser import parse_term
from mpcalc.semantics import build_lts


def _lts(source):
    return build_lts(parse_term(source))


def test_make_theta_rejects_nonpositive():
    assert make_theta(["1/2", 1]) == (Fraction(1, 2), Fraction(1))
    with pytest.raises(ValueError):
        make_theta([0])


def test_enumerate_steps_are_aggregated_transitions():
    lts = _lts("<a,1>.0 + <a,1>.0")
    comps = enumerate_computations(lts, 3)
    # the doubled branch is one aggregated step, not two paths
    assert len(comps) == 2
    assert sorted(len(c) for c in comps) == [0, 1]
    (one,) = filter_len(comps, 1)
    assert prob(one) == 1
    assert time_a(one) == (Fraction(1, 2),)


def test_prob_and_time():
    lts = _lts("<a,1>.<b,4>.0 + <b,3>.0")
    comps = filter_len(enumerate_computations(lts, 2), 2)
    (c,) = comps
    assert prob(c) == Fraction(1, 4)
    assert time_a(c) == (Fraction(1, 4), Fraction(1, 4))


def test_prob_set_conservation_and_independence():
    lts = _lts("<a,1>.<b,4>.0 + <b,3>.0")
    comps = enumerate_computations(lts, 2)
    maximal = [c for c in comps
               if len(c) == 2 or not any(len(d) > len(c) and d.steps[:len(c)] == c.steps
                                         for d in comps)]
    assert prob_set(maximal) == 1
    with pytest.raises(DependentComputations):
        prob_set(comps)  # prefixes overlap, not independent


def test_filters():
    lts = _lts("<a,2>.<b,2>.0")
    comps = enumerate_computations(lts, 2)
    assert len(filter_len(comps, 1)) == 1
    # stepwise average durations are 1/2 and 1/2
    theta = make_theta([Fraction(1, 2), Fraction(1, 2)])
    kept = filter_le_theta(filter_len(comps, 2), theta)
    assert len(kept) == 1
    tight = make_theta([Fraction(1, 2), Fraction(1, 4)])
    assert filter_le_theta(filter_len(comps, 2), tight) == []
