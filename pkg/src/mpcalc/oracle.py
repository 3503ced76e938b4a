"""Bounded testing-equivalence oracle.

Verdicts are computed from first principles: enumerate tests, run each
against both processes, and compare passing probabilities at every bound
sequence.  For a fixed test and computation length, the passing
probability as a function of theta is a monotone step function whose
jumps sit exactly at the stepwise sojourn-time vectors of successful
computations, so equality for all theta holds iff the signed probability
mass agrees vector by vector; a strict inequality at any minimal
differing vector yields a concrete witness theta.

Successful computations are enumerated over the product of the process
LMTS with the test's syntax tree instead of composing interaction terms;
tests only synchronize passively on visible names and move alone on timed
tau, so the product is the reachable part of the interaction system.  The
slower term-level route in the testing module is kept as the reference
and the two are cross-checked in the test suite.
"""

from __future__ import annotations

import dataclasses as d
from fractions import Fraction
from itertools import product as cartesian

from . import terms as t
from .semantics import LMTS, build_lts
from .errors import NotPerformanceClosed
from .testing import Test, canonical_tests, make_test, top_summands

Vector = tuple[Fraction, ...]
Measure = dict[Vector, Fraction]


@d.dataclass(frozen=True)
class _NodeInfo:
    summands: tuple[tuple[str, t.Rate, t.ProcessTerm], ...]
    successful: bool
    live: bool  # success still reachable, given that z never synchronizes


def _test_info(test_term: t.ProcessTerm) -> dict[t.ProcessTerm, _NodeInfo]:
    info: dict[t.ProcessTerm, _NodeInfo] = {}

    def visit(node: t.ProcessTerm) -> _NodeInfo:
        if node in info:
            return info[node]
        parts = top_summands(node)
        successful = any(isinstance(p, t.Success) for p in parts)
        summands = []
        live = successful
        for part in parts:
            if isinstance(part, t.Success):
                continue
            assert isinstance(part, t.Prefix)
            summands.append((part.name, part.rate, part.body))
            if part.name != t.FAILURE_NAME and visit(part.body).live:
                live = True
        entry = _NodeInfo(tuple(summands), successful, live)
        info[node] = entry
        return entry

    visit(test_term)
    return info


def successful_measures(lts: LMTS, test: Test, max_len: int) -> list[Measure]:
    """Probability mass of successful computations of each exact length,
    grouped by their stepwise sojourn-time vectors."""
    if not lts.performance_closed:
        raise NotPerformanceClosed("oracle requires a performance-closed process")
    info = _test_info(test.term)
    aggregated = [
        [(tr.name, tr.aggregate, lts.index[tr.target]) for tr in group]
        for group in lts.outgoing
    ]
    cache: dict[tuple[int, t.ProcessTerm, bool, int], Measure] = {}

    def moves(state: int, node: t.ProcessTerm):
        node_info = info[node]
        weights: dict[str, Fraction] = {}
        for name, rate, _ in node_info.summands:
            if rate.passive:
                weights[name] = weights.get(name, Fraction(0)) + rate.value
        out: list[tuple[Fraction, int, t.ProcessTerm]] = []
        for name, value, target in aggregated[state]:
            if name == t.TAU:
                out.append((value, target, node))
                continue
            for sname, srate, sbody in node_info.summands:
                if sname == name and srate.passive:
                    out.append((value * srate.value / weights[name], target, sbody))
        for sname, srate, sbody in node_info.summands:
            if sname == t.TAU and not srate.passive:
                out.append((srate.value, state, sbody))
        return out

    def measure(state: int, node: t.ProcessTerm, seen: bool, budget: int) -> Measure:
        seen = seen or info[node].successful
        if not seen and not info[node].live:
            return {}
        if budget == 0:
            return {(): Fraction(1)} if seen else {}
        key = (state, node, seen, budget)
        if key in cache:
            return cache[key]
        out: Measure = {}
        branches = moves(state, node)
        total = sum((value for value, _, _ in branches), Fraction(0))
        if total > 0:
            sojourn = 1 / total
            for value, state2, node2 in branches:
                share = value / total
                for vector, mass in measure(state2, node2, seen, budget - 1).items():
                    key2 = (sojourn,) + vector
                    out[key2] = out.get(key2, Fraction(0)) + share * mass
        cache[key] = out
        return out

    return [measure(0, test.term, False, length) for length in range(max_len + 1)]


def passing_probability(measures: list[Measure], theta: Vector) -> Fraction:
    """prob_pass read off the grouped measures: length-|theta| mass whose
    vector is dominated pointwise by theta."""
    if len(theta) >= len(measures):
        raise ValueError("theta longer than the enumerated bound")
    total = Fraction(0)
    for vector, mass in measures[len(theta)].items():
        if all(vector[i] <= theta[i] for i in range(len(theta))):
            total += mass
    return total


def _minimal_difference(m1: Measure, m2: Measure) -> Vector | None:
    support = [
        v
        for v in set(m1) | set(m2)
        if m1.get(v, Fraction(0)) != m2.get(v, Fraction(0))
    ]
    if not support:
        return None
    minimal = [
        v
        for v in support
        if not any(u != v and all(u[i] <= v[i] for i in range(len(v))) for u in support)
    ]
    return min(minimal)


@d.dataclass(frozen=True)
class OracleVerdict:
    equivalent: bool
    witness_test: Test | None = None
    witness_theta: Vector | None = None
    prob_left: Fraction | None = None
    prob_right: Fraction | None = None
    tests_checked: int = 0

    def __bool__(self) -> bool:
        return self.equivalent


def _liberal_variants(base: list[Test]) -> list[Test]:
    """Adjoin the success state as an extra summand at each node along the
    success path, one node at a time."""
    seen: dict[t.ProcessTerm, None] = {}
    out: list[Test] = []

    def add(term: t.ProcessTerm) -> None:
        if term not in seen:
            seen[term] = None
            out.append(make_test(term, "liberal"))

    def decorations(term: t.ProcessTerm):
        if isinstance(term, t.Success):
            return
        yield _nest_summands(top_summands(term) + [t.SUCCESS])
        for i, part in enumerate(top_summands(term)):
            if isinstance(part, t.Prefix) and part.name != t.FAILURE_NAME:
                for body in decorations(part.body):
                    parts = list(top_summands(term))
                    parts[i] = t.Prefix(part.name, part.rate, body)
                    yield _nest_summands(parts)

    for test in base:
        add(test.term)
        for variant in decorations(test.term):
            add(variant)
    return out


def _tau_variants(base: list[Test], rate_value: Fraction = Fraction(1)) -> list[Test]:
    """Insert one exponentially timed tau step before a non-success node of
    the success path."""
    rate = t.Rate(rate_value)
    seen: dict[t.ProcessTerm, None] = {}
    out: list[Test] = []

    def add(term: t.ProcessTerm) -> None:
        if term not in seen:
            seen[term] = None
            out.append(make_test(term, "tau"))

    def insertions(term: t.ProcessTerm):
        if not isinstance(term, t.Success):
            yield t.Prefix(t.TAU, rate, term)
        for i, part in enumerate(top_summands(term)):
            if (
                isinstance(part, t.Prefix)
                and part.name != t.FAILURE_NAME
                and part.name != t.TAU
            ):
                for body in insertions(part.body):
                    parts = list(top_summands(term))
                    parts[i] = t.Prefix(part.name, part.rate, body)
                    yield _nest_summands(parts)

    for test in base:
        add(test.term)
        for variant in insertions(test.term):
            add(variant)
    return out


def _nest_summands(parts: list[t.ProcessTerm]) -> t.ProcessTerm:
    term = parts[-1]
    for p in reversed(parts[:-1]):
        term = t.Choice(p, term)
    return term


def _environment(lts1: LMTS, lts2: LMTS) -> list[str]:
    return sorted(lts1.visible_names() | lts2.visible_names())


def bounded_testing_oracle(
    p1: t.ProcessTerm,
    p2: t.ProcessTerm,
    depth: int = 4,
    names=None,
    flavor: str = "reactive",
    max_len: int | None = None,
    state_bound: int = 10000,
) -> OracleVerdict:
    """Compare passing probabilities over all generated tests of the given
    flavor, at every computation length up to max_len (default: depth) and
    every bound sequence.  Sound up to the bounds; a returned witness is a
    genuine distinguishing (test, theta) pair."""
    lts1 = build_lts(p1, state_bound)
    lts2 = build_lts(p2, state_bound)
    if max_len is None:
        max_len = depth
    universe = _environment(lts1, lts2) if names is None else sorted(set(names))
    base = canonical_tests(universe, depth) if universe else canonical_tests([], 0)
    if flavor == "reactive":
        tests = base
    elif flavor == "liberal":
        tests = _liberal_variants(base)
    elif flavor == "tau":
        tests = _tau_variants(base)
    else:
        raise ValueError(f"unknown test flavor {flavor!r}")
    for i, test in enumerate(tests):
        m1 = successful_measures(lts1, test, max_len)
        m2 = successful_measures(lts2, test, max_len)
        for length in range(max_len + 1):
            theta = _minimal_difference(m1[length], m2[length])
            if theta is not None:
                return OracleVerdict(
                    equivalent=False,
                    witness_test=test,
                    witness_theta=theta,
                    prob_left=passing_probability(m1, theta),
                    prob_right=passing_probability(m2, theta),
                    tests_checked=i + 1,
                )
    return OracleVerdict(equivalent=True, tests_checked=len(tests))


def _grid(values: list[Fraction], cap: int = 12) -> list[Fraction]:
    """Sorted distinct values, midpoints of adjacent ones, and one value
    past the maximum."""
    base = sorted(set(values))
    if not base:
        return [Fraction(1)]
    full = []
    for i, v in enumerate(base):
        full.append(v)
        if i + 1 < len(base):
            full.append((v + base[i + 1]) / 2)
    full.append(base[-1] + 1)
    if len(full) > cap:
        step = (len(full) - 1) / (cap - 1)
        full = [full[round(i * step)] for i in range(cap)]
    return full


def old_style_oracle(
    p1: t.ProcessTerm,
    p2: t.ProcessTerm,
    depth: int = 2,
    names=None,
    state_bound: int = 10000,
) -> OracleVerdict:
    """Length-free comparison: cumulative probability of all successful
    computations within theta, without the exact-length filter.  Meaningful
    for processes without timed tau moves, where successful computations
    are maximal.  Evaluated by direct sweep over a breakpoint grid
    (observed sojourn values, midpoints, one value above the maximum) as an
    independent check of the grouped-measure path."""
    lts1 = build_lts(p1, state_bound)
    lts2 = build_lts(p2, state_bound)
    universe = _environment(lts1, lts2) if names is None else sorted(set(names))
    tests = canonical_tests(universe, depth) if universe else canonical_tests([], 0)

    def cumulative(measures: list[Measure], theta: Vector) -> Fraction:
        total = Fraction(0)
        for length in range(min(len(theta), len(measures) - 1) + 1):
            for vector, mass in measures[length].items():
                if all(vector[i] <= theta[i] for i in range(length)):
                    total += mass
        return total

    for i, test in enumerate(tests):
        m1 = successful_measures(lts1, test, depth)
        m2 = successful_measures(lts2, test, depth)
        position_values: list[list[Fraction]] = [[] for _ in range(depth)]
        for side in (m1, m2):
            for length_measure in side:
                for vector in length_measure:
                    for i_pos, value in enumerate(vector):
                        position_values[i_pos].append(value)
        grids = [_grid(vals) for vals in position_values]
        for length in range(depth + 1):
            for theta in cartesian(*grids[:length]):
                left = cumulative(m1, theta)
                right = cumulative(m2, theta)
                if left != right:
                    return OracleVerdict(
                        equivalent=False,
                        witness_test=test,
                        witness_theta=theta,
                        prob_left=left,
                        prob_right=right,
                        tests_checked=i + 1,
                    )
    return OracleVerdict(equivalent=True, tests_checked=len(tests))
