"""Tests and test-driven computations.

A test is a finite choice tree of passive prefixes with a distinguished
success state s.  Three grammars of increasing liberality are supported:

  reactive   T ::= s | T'      T' ::= <a,*w>.T | T' + T'
  liberal    T ::= s | <a,*w>.T | T + T          (s may be a summand)
  tau        reactive plus exponentially timed  <tau,lambda>.T'  prefixes

The interaction of a performance-closed P with T runs them in parallel,
synchronized on every visible name of either side plus the reserved
failure name z.  A configuration is successful when its test projection
includes s as a top-level summand (for reactive tests this means the
projection is exactly s).  A computation is successful when it traverses
a successful configuration anywhere, origin included; computations may
extend past success, which matters for timed silent moves.
"""

from __future__ import annotations

import dataclasses as d
from fractions import Fraction
from itertools import combinations

from . import terms as t
from .computations import Computation, Theta, filter_le_theta, filter_len, prob_set
from .errors import NotPerformanceClosed, NotWellFormed
from .parser import parse_test_body
from .semantics import LMTS, build_lts

FLAVORS = ("reactive", "liberal", "tau")


@d.dataclass(frozen=True)
class Test:
    term: t.ProcessTerm
    flavor: str

    def __str__(self) -> str:
        return t.pretty(self.term)


def top_summands(term: t.ProcessTerm) -> list[t.ProcessTerm]:
    if isinstance(term, t.Choice):
        return top_summands(term.left) + top_summands(term.right)
    return [term]


def is_successful_projection(term: t.ProcessTerm) -> bool:
    return any(isinstance(s, t.Success) for s in top_summands(term))


def _validate(term: t.ProcessTerm, flavor: str, success_ok: bool) -> None:
    if isinstance(term, t.Success):
        if not success_ok:
            raise NotWellFormed("the success state cannot occur as a choice summand here")
        return
    if isinstance(term, t.Choice):
        summand_ok = flavor == "liberal"
        _validate(term.left, flavor, summand_ok)
        _validate(term.right, flavor, summand_ok)
        return
    if isinstance(term, t.Prefix):
        if term.name == t.TAU:
            if flavor != "tau":
                raise NotWellFormed("timed tau prefixes require a tau-capable test")
            if term.rate.passive:
                raise NotWellFormed("tau test prefixes must be exponentially timed")
            # the grammar forbids success immediately after an internal move
            _validate(term.body, flavor, success_ok=False)
            return
        if not term.rate.passive:
            raise NotWellFormed(f"test action {term.name} must be passive")
        _validate(term.body, flavor, success_ok=True)
        return
    raise NotWellFormed(f"not a test construct: {t.pretty(term)}")


def make_test(term: t.ProcessTerm, flavor: str = "reactive") -> Test:
    if flavor not in FLAVORS:
        raise ValueError(f"unknown test flavor {flavor!r}")
    _validate(term, flavor, success_ok=True)
    return Test(term, flavor)


def parse_test(source: str, flavor: str = "reactive") -> Test:
    return make_test(parse_test_body(source), flavor)


def interaction(process: t.ProcessTerm, test: Test, state_bound: int = 10000) -> t.ProcessTerm:
    """The composed system P |[all visible names + z]| T.

    The process must be performance-closed on its own; a blocked passive
    action would otherwise vanish silently from the composition.
    """
    t.require_analyzable(process)
    if not build_lts(process, state_bound=state_bound).performance_closed:
        raise NotPerformanceClosed("the process under test is not performance-closed")
    sync = t.visible_names(process) | t.visible_names(test.term) | {t.FAILURE_NAME}
    return t.Parallel(frozenset(sync), process, test.term)


def _projection(state: t.ProcessTerm) -> t.ProcessTerm:
    assert isinstance(state, t.Parallel)
    return state.right


def interaction_lts(process: t.ProcessTerm, test: Test, state_bound: int = 10000) -> LMTS:
    lts = build_lts(
        interaction(process, test, state_bound), state_bound=state_bound, allow_failure_name=True
    )
    if not lts.performance_closed:
        raise NotPerformanceClosed(
            "interaction has reachable passive transitions; the process is not performance-closed"
        )
    return lts


def successful_computations(
    process: t.ProcessTerm, test: Test, max_len: int, state_bound: int = 10000
) -> list[Computation]:
    """Computations of the interaction, up to max_len steps, that traverse a
    successful configuration."""
    lts = interaction_lts(process, test, state_bound=state_bound)
    successful = {
        i for i, state in enumerate(lts.states) if is_successful_projection(_projection(state))
    }
    out: list[Computation] = []

    def extend(computation: Computation, index: int, seen: bool, budget: int) -> None:
        seen = seen or index in successful
        if seen:
            out.append(computation)
        if budget == 0:
            return
        for step in lts.outgoing[index]:
            extend(computation.extended(step), lts.index[step.target], seen, budget - 1)

    extend(Computation(lts.root, ()), 0, False, max_len)
    return out


def prob_pass(process: t.ProcessTerm, test: Test, theta: Theta, state_bound: int = 10000) -> Fraction:
    """Probability of passing the test within the stepwise bounds theta.

    Only successful computations of length exactly |theta| count, each step
    no slower on average than the corresponding bound.  A computation that
    reaches success earlier contributes at the shorter bound sequences.
    """
    length = len(theta)
    candidates = filter_len(
        successful_computations(process, test, length, state_bound=state_bound), length
    )
    return prob_set(filter_le_theta(candidates, theta))


def _nest(summands: list[t.ProcessTerm]) -> t.ProcessTerm:
    term = summands[-1]
    for s in reversed(summands[:-1]):
        term = t.Choice(s, term)
    return term


def _canonical_step(environment: frozenset[str], name: str, continuation: t.ProcessTerm) -> t.ProcessTerm:
    one = t.Rate.weight(1)
    failure = t.Prefix(t.FAILURE_NAME, one, t.SUCCESS)
    summands = []
    for b in sorted(environment):
        if b == name:
            summands.append(t.Prefix(name, one, continuation))
        else:
            summands.append(t.Prefix(b, one, failure))
    return _nest(summands)


def canonical_tests(names, depth: int) -> list[Test]:
    """Name-deterministic tests with one success path of length <= depth.

    Each step picks a permitted environment set and the single name that
    continues towards success; every other permitted name fails in one
    step through the reserved name z.
    """
    universe = sorted(set(names))
    if t.TAU in universe or t.FAILURE_NAME in universe:
        raise ValueError("environment names must be visible and distinct from z")
    environments = [
        frozenset(combination)
        for size in range(1, len(universe) + 1)
        for combination in combinations(universe, size)
    ]
    layer: list[t.ProcessTerm] = [t.SUCCESS]
    collected: list[t.ProcessTerm] = [t.SUCCESS]
    for _ in range(depth):
        layer = [
            _canonical_step(environment, name, continuation)
            for environment in environments
            for name in sorted(environment)
            for continuation in layer
        ]
        collected.extend(layer)
    return [Test(term, "reactive") for term in collected]
