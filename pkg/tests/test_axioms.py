from __future__ import annotations

from collections import Counter
from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

from mpcalc.axioms import (RewriteStep, apply_law, axiom_prove, expand_static,
                           normalize, normalize_with_trace)
from mpcalc.axioms import LAW_IDS
from mpcalc.corpus import (a4_instance, a4_violation, law_instance,
                           random_term, sound_steps)
from mpcalc.decider import decide_equiv
from mpcalc.errors import LawError, NotPerformanceClosed, NotWellFormed
from mpcalc.parser import parse_term
from mpcalc.semantics import derive_transitions


def test_apply_commutativity_at_root():
    done = apply_law(parse_term("<a,1>.0 + <b,2>.0"), RewriteStep("A1"))
    assert done == parse_term("<b,2>.0 + <a,1>.0")


def test_apply_choice_deferral():
    # merged rate 1+2, continuations scaled by 1/3 and 2/3
    figure = parse_term("<a,1>.<b,5>.0 + <a,2>.<b,5>.0")
    merged = apply_law(figure, RewriteStep("A4"))
    assert merged == parse_term("<a,3>.(<b,5/3>.0 + <b,10/3>.0)")
    assert decide_equiv(figure, merged).equivalent


def test_apply_hiding_renames_to_tau():
    done = apply_law(parse_term("(<a,1>.0) / {a}"), RewriteStep("A10"))
    assert done == parse_term("<tau,1>.(0 / {a})")


def test_apply_law_error_cases():
    with pytest.raises(LawError):
        apply_law(parse_term("<a,1>.0"), RewriteStep("A1"))  # not a choice
    with pytest.raises(LawError):
        apply_law(parse_term("<a,1>.0"), RewriteStep("A1", position=(3,)))
    lhs, _ = a4_violation(Random(5))
    with pytest.raises(LawError):
        apply_law(lhs, RewriteStep("A4"))  # unequal cumulative rates


def test_expand_static_flattens():
    assert expand_static(parse_term("0 |[a,b]| 0")) == parse_term("0")
    mixed = expand_static(parse_term("(<a,2>.0) |[a]| (<a,*3>.0 + <a,*1>.0)"))
    assert mixed == parse_term("<a,3/2>.0 + <a,1/2>.0")
    steered = expand_static(parse_term("((<a,1>.0 + <b,2>.0) / {a})[b->c]"))
    assert steered == parse_term("<tau,1>.0 + <c,2>.0")


def test_expand_static_preserves_passive_transitions():
    # the expansion law also covers operands that are not performance-closed
    composed = parse_term("(<a,*1>.0 + <a,*3>.0) |[a]| <a,*2>.0")
    flat = expand_static(composed)
    def multiset(term):
        counts = Counter()
        for (name, rate, _), count in derive_transitions(term):
            counts[name, str(rate)] += count
        return counts
    assert multiset(flat) == multiset(composed) == Counter(
        {("a", "*3/2"): 1, ("a", "*9/2"): 1})


def test_normalize_drops_nil_and_sorts():
    assert normalize(parse_term("(<b,2>.0 + 0) + <a,1>.0")) == \
        normalize(parse_term("<b,2>.0 + <a,1>.0"))
    assert normalize(parse_term("<a,1>.0 + <a,2>.0")) == parse_term("<a,3>.0")


def test_normalize_preconditions():
    with pytest.raises(NotWellFormed):
        normalize(parse_term("rec X : <a,1>.X"))
    with pytest.raises(NotPerformanceClosed):
        normalize(parse_term("<a,*1>.0"))


def test_prove_spec_pairs():
    assoc = axiom_prove(parse_term("(<a,1>.0 + <b,2>.0) + <tau,1>.0"),
                        parse_term("<a,1>.0 + (<b,2>.0 + <tau,1>.0)"))
    assert assoc.proved
    bisim = axiom_prove(parse_term("<a,1>.<b,2>.0 + <a,3>.<b,2>.0"),
                        parse_term("<a,4>.<b,2>.0"))
    assert bisim.proved
    timed = axiom_prove(parse_term("<tau,2>.0"), parse_term("<tau,1>.0"))
    assert not timed.proved
    assert timed.decider_equivalent is False
    assert not timed.completeness_gap


def test_trace_replays_to_the_normal_form():
    source = parse_term("((<a,2>.0) |[a]| (<a,*3>.0 + <a,*1>.0)) + 0")
    normal, steps = normalize_with_trace(source)
    current = source
    for step in steps:
        current = apply_law(current, step)
    assert current == normal == normalize(source)
    assert str(steps[0]).split()[0] in LAW_IDS


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_normalize_idempotent(seed):
    term = random_term(Random(seed), depth=3, max_states=12, static_ops=True)
    normal = normalize(term)
    assert normalize(normal) == normal


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_proved_pairs_are_equivalent(seed):
    rng = Random(seed)
    left = random_term(rng, depth=3, max_states=10)
    right = random_term(rng, depth=3, max_states=10)
    report = axiom_prove(left, right, consult_decider=False)
    if report.proved:
        assert decide_equiv(left, right).equivalent


def test_each_law_generates_sound_instances():
    rng = Random(31)
    for law in LAW_IDS:
        for _ in range(3):
            instance, step = law_instance(rng, law)
            rewritten = apply_law(instance, step)
            assert decide_equiv(instance, rewritten).equivalent


def test_sound_steps_enumerate_applicable_rewrites():
    term = parse_term("(<a,1>.0 + <b,2>.0) + 0")
    steps = sound_steps(term)
    assert steps
    for step in steps:
        rewritten = apply_law(term, step)
        assert decide_equiv(term, rewritten).equivalent


def test_a4_generators():
    rng = Random(32)
    satisfying = a4_instance(rng)
    merged = apply_law(satisfying, RewriteStep("A4"))
    assert decide_equiv(satisfying, merged).equivalent
    lhs, rhs = a4_violation(rng)
    assert not decide_equiv(lhs, rhs).equivalent
