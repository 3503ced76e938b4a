from __future__ import annotations

from fractions import Fraction

import pytest

from mpcalc import terms as t
from mpcalc.errors import NotWellFormed


def test_rate_must_be_positive():
    with pytest.raises(ValueError):
        t.Rate(0)
    with pytest.raises(ValueError):
        t.Rate(Fraction(-1, 2))


def test_rate_printing():
    assert str(t.Rate(Fraction(3, 2))) == "3/2"
    assert str(t.Rate(2, passive=True)) == "*2"


def test_pretty_respects_precedence():
    inner = t.Choice(t.Prefix("a", t.Rate(1), t.NIL),
                     t.Prefix("b", t.Rate(2), t.NIL))
    term = t.Prefix("c", t.Rate(1), inner)
    assert str(term) == "<c,1>.(<a,1>.0 + <b,2>.0)"
    par = t.Parallel(frozenset({"a"}), inner, t.NIL)
    assert str(par) == "(<a,1>.0 + <b,2>.0) |[a]| 0"


def test_relabel_canonicalizes_mapping():
    r1 = t.Relabel((("a", "b"), ("c", "c")), t.NIL)
    r2 = t.Relabel((("a", "b"),), t.NIL)
    assert r1 == r2
    with pytest.raises(ValueError):
        t.Relabel((("tau", "a"),), t.NIL)
    with pytest.raises(ValueError):
        t.Relabel((("a", "b"), ("a", "c")), t.NIL)


def test_wellformedness_flags():
    closed = t.Prefix("a", t.Rate(1), t.NIL)
    wf = t.check_wellformed(closed)
    assert wf.closed and wf.guarded

    open_term = t.Var("X")
    assert not t.check_wellformed(open_term).closed

    unguarded = t.Rec("X", t.Choice(t.Var("X"), t.NIL))
    assert not t.check_wellformed(unguarded).guarded

    guarded_loop = t.Rec("X", t.Prefix("a", t.Rate(1), t.Var("X")))
    wf = t.check_wellformed(guarded_loop)
    assert wf.closed and wf.guarded


def test_require_analyzable_reserves_failure_name():
    bad = t.Prefix(t.FAILURE_NAME, t.Rate(1), t.NIL)
    with pytest.raises(Exception):
        t.require_analyzable(bad)
    t.require_analyzable(bad, allow_failure_name=True)


def test_alpha_normalize_identifies_bound_renamings():
    one = t.Rec("X", t.Prefix("a", t.Rate(1), t.Var("X")))
    two = t.Rec("Y", t.Prefix("a", t.Rate(1), t.Var("Y")))
    assert t.alpha_normalize(one) == t.alpha_normalize(two)


def test_substitute_closed_replacement():
    # Replacements are closed (recursion unfolding), so capture cannot arise.
    loop = t.Rec("X", t.Prefix("a", t.Rate(1), t.Var("X")))
    opened = t.Prefix("a", t.Rate(1), t.Var("X"))
    assert t.substitute(opened, "X", loop) == t.Prefix("a", t.Rate(1), loop)
    # Binders for the same variable shadow: nothing changes inside.
    assert t.substitute(loop, "X", t.NIL) == loop
    # Other variables pass through untouched.
    other = t.Prefix("b", t.Rate(2), t.Var("Y"))
    assert t.substitute(other, "X", loop) == other


def test_children_and_subterms():
    term = t.Hide(frozenset({"a"}),
                  t.Choice(t.Prefix("a", t.Rate(1), t.NIL), t.SUCCESS))
    kids = t.children(term)
    assert len(kids) == 1 and isinstance(kids[0], t.Choice)
    assert t.NIL in list(t.subterms(term))
    assert t.SUCCESS in list(t.subterms(term))
