"""Quantitative modal logic over performance-closed terms.

Formulas are two-level: true may appear under a diamond but never as a
disjunct, and the disjuncts of every Or must have disjoint initial action
sets.  The interpretation eval(P, theta, phi) is the probability that P
satisfies phi quickly enough on average, one theta entry per computation
step.  Disjunctions weight each disjunct by the probability of moving
into it at all (p_j) and grant it the extra average sojourn time (t_j)
freed up by dropping the competing initial actions; both corrections keep
the value aligned with what a canonical reactive test offering the same
initial actions would measure.

characterization_check sweeps enumerated formulas against a time grid and
cross-checks the outcome with the exact decider: a differing (phi, theta)
on a decider-equivalent pair is a bug witness in one of the two, never
something to patch over.
"""

from __future__ import annotations

import dataclasses as d
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product as cartesian
from typing import Iterable, Sequence

from . import terms as t
from .computations import Theta, make_theta
from .errors import NotPerformanceClosed, NotWellFormed
from .rates import EXPONENTIAL, rate_o_set
from .semantics import build_lts, derive_transitions

_ONE = Fraction(1)


class Formula:
    """Base class; instances are TRUE, Diamond, or Or nodes."""

    __slots__ = ()


class _True(Formula):
    __slots__ = ()

    def __repr__(self) -> str:
        return "TRUE"

    def __str__(self) -> str:
        return "true"


TRUE = _True()


def _head(formula: Formula) -> str:
    # Diamond bodies reparse at head level, so an Or body needs parens.
    return f"({formula})" if isinstance(formula, Or) else str(formula)


@d.dataclass(frozen=True)
class Diamond(Formula):
    name: str
    body: Formula

    def __post_init__(self) -> None:
        if self.name == t.TAU:
            raise NotWellFormed("diamond actions must be visible")
        if not isinstance(self.body, Formula):
            raise NotWellFormed(f"not a formula: {self.body!r}")

    def __str__(self) -> str:
        return f"<{self.name}>{_head(self.body)}"


@d.dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __post_init__(self) -> None:
        for side in (self.left, self.right):
            if not isinstance(side, Formula):
                raise NotWellFormed(f"not a formula: {side!r}")
            if isinstance(side, _True):
                raise NotWellFormed("true cannot be a disjunct")
        if init(self.left) & init(self.right):
            raise NotWellFormed(
                "disjuncts must have disjoint initial action sets")

    def __str__(self) -> str:
        left = f"({self.left})" if isinstance(self.left, Or) else str(self.left)
        return f"{left} \\/ {self.right}"


@lru_cache(maxsize=None)
def init(formula: Formula) -> frozenset[str]:
    """Initial visible actions of a formula."""
    if isinstance(formula, _True):
        return frozenset()
    if isinstance(formula, Diamond):
        return frozenset((formula.name,))
    if isinstance(formula, Or):
        return init(formula.left) | init(formula.right)
    raise NotWellFormed(f"not a formula: {formula!r}")


def depth(formula: Formula) -> int:
    """Nesting depth counted in diamonds; disjunction takes the max."""
    if isinstance(formula, _True):
        return 0
    if isinstance(formula, Diamond):
        return 1 + depth(formula.body)
    return max(depth(formula.left), depth(formula.right))


@lru_cache(maxsize=None)
def no_init_tau(term: t.ProcessTerm) -> t.ProcessTerm:
    """A view of term without its tau-transitions.

    The view is a sum with one prefix summand per non-tau derivation, so
    its transition multiset is exactly the original minus tau; it is Nil
    when every transition of term is a tau.
    """
    summands: list[t.ProcessTerm] = []
    for (name, rate, target), count in derive_transitions(term):
        if name == t.TAU:
            continue
        summands.extend(t.Prefix(name, rate, target) for _ in range(count))
    view = t.NIL
    for summand in reversed(summands):
        view = summand if view is t.NIL else t.Choice(summand, view)
    return view


@lru_cache(maxsize=None)
def _aggregated(term: t.ProcessTerm) -> tuple[tuple[str, Fraction, t.ProcessTerm], ...]:
    # Performance closure is checked upfront by eval, so every rate here
    # is exponential and aggregates as value * multiplicity.
    return tuple((name, rate.value * count, target)
                 for (name, rate, target), count in derive_transitions(term))


@lru_cache(maxsize=None)
def _rate_by_name(term: t.ProcessTerm) -> dict[str, Fraction]:
    totals: dict[str, Fraction] = {}
    for name, rate, _ in _aggregated(term):
        totals[name] = totals.get(name, Fraction(0)) + rate
    return totals


def _rate_over(term: t.ProcessTerm, names: frozenset[str],
               with_tau: bool) -> Fraction:
    totals = _rate_by_name(term)
    value = totals.get(t.TAU, Fraction(0)) if with_tau else Fraction(0)
    for name in names:
        value += totals.get(name, Fraction(0))
    return value


def eval(process: t.ProcessTerm, theta: Theta, formula: Formula,
         state_bound: int = 10000, *, _memo: dict | None = None) -> Fraction:
    """Probability that process satisfies formula quickly enough.

    theta holds one average-time upper bound per computation step; the
    value is an exact rational in [0, 1].
    """
    if not isinstance(formula, Formula):
        raise NotWellFormed(f"not a formula: {formula!r}")
    _require_ctmc(process, state_bound)
    theta = make_theta(theta)
    memo = {} if _memo is None else _memo
    return _eval(process, theta, formula, memo)


def _require_ctmc(process: t.ProcessTerm, state_bound: int) -> None:
    lts = build_lts(process, state_bound)
    if not lts.performance_closed:
        raise NotPerformanceClosed(
            f"formula interpretation needs a performance-closed term: {process}")


def _eval(process: t.ProcessTerm, theta: Theta, formula: Formula,
          memo: dict) -> Fraction:
    key = (process, theta, formula)
    cached = memo.get(key)
    if cached is not None:
        return cached
    value = _eval_clause(process, theta, formula, memo)
    memo[key] = value
    return value


def _eval_clause(process: t.ProcessTerm, theta: Theta, formula: Formula,
                 memo: dict) -> Fraction:
    if not theta:
        return _ONE if isinstance(formula, _True) else Fraction(0)
    denominator = _rate_over(process, init(formula), with_tau=True)
    if denominator == 0:
        return Fraction(0)
    head, rest = theta[0], theta[1:]
    entries = _aggregated(process)

    if isinstance(formula, _True):
        if _ONE / denominator > head:
            return Fraction(0)
        return sum((rate / denominator * _eval(target, rest, formula, memo)
                    for name, rate, target in entries if name == t.TAU),
                   Fraction(0))

    if isinstance(formula, Diamond):
        if _ONE / denominator > head:
            return Fraction(0)
        total = Fraction(0)
        for name, rate, target in entries:
            if name == formula.name:
                total += rate / denominator * _eval(target, rest, formula.body, memo)
            elif name == t.TAU:
                total += rate / denominator * _eval(target, rest, formula, memo)
        return total

    # Or: weight each disjunct, grant it the freed-up sojourn time, and
    # keep racing the whole formula past initial taus.  No time guard
    # here; the adjusted head times are checked by the inner clauses.
    total = Fraction(0)
    view = None
    for disjunct in (formula.left, formula.right):
        numerator = _rate_over(process, init(disjunct), with_tau=False)
        if numerator == 0:
            continue
        if view is None:
            view = no_init_tau(process)
        adjusted = head + (_ONE / numerator - _ONE / denominator)
        total += (numerator / denominator
                  * _eval(view, (adjusted,) + rest, disjunct, memo))
    for name, rate, target in entries:
        if name == t.TAU:
            total += rate / denominator * _eval(target, rest, formula, memo)
    return total


def enumerate_formulas(names: Iterable[str], formula_depth: int) -> list[Formula]:
    """All formulas over names up to the given diamond depth.

    Disjunctions are canonical: right-nested, one diamond per head name,
    heads in sorted order.  Other associations of the same disjunct set
    are not generated.
    """
    ordered = sorted(set(names))
    if t.TAU in ordered:
        raise NotWellFormed("diamond actions must be visible")
    levels: list[list[Formula]] = [[TRUE]]
    for level in range(1, formula_depth + 1):
        diamonds = [Diamond(name, body)
                    for name in ordered for body in levels[level - 1]]
        by_name = {name: [f for f in diamonds if f.name == name]
                   for name in ordered}
        ors: list[Formula] = []
        for size in range(2, len(ordered) + 1):
            for heads in combinations(ordered, size):
                for combo in cartesian(*(by_name[name] for name in heads)):
                    nested: Formula = combo[-1]
                    for piece in reversed(combo[:-1]):
                        nested = Or(piece, nested)
                    ors.append(nested)
        levels.append([TRUE] + diamonds + ors)
    return levels[formula_depth] if formula_depth else [TRUE]


def formula_test(formula: Formula) -> t.ProcessTerm:
    """Canonical reactive test body measuring the same satisfaction.

    true maps to success, a diamond to a passive prefix, a disjunction to
    a sum; for tau-free processes prob_pass of the resulting test matches
    eval at every theta.
    """
    if isinstance(formula, _True):
        return t.SUCCESS
    if isinstance(formula, Diamond):
        return t.Prefix(formula.name, t.Rate(1, passive=True),
                        formula_test(formula.body))
    return t.Choice(formula_test(formula.left), formula_test(formula.right))


def _time_grid(processes: Sequence[t.ProcessTerm], names: Sequence[str],
               state_bound: int, cap: int) -> tuple[Fraction, ...]:
    # Candidate head times are reciprocals of the exit rates the clauses
    # actually compare against, plus midpoints and one value past the max.
    rates: set[Fraction] = set()
    for process in processes:
        for state in build_lts(process, state_bound).states:
            pools = [{t.TAU}, set(names) | {t.TAU}]
            pools.extend({name} for name in names)
            pools.extend({name, t.TAU} for name in names)
            for pool in pools:
                total = rate_o_set(state, pool, EXPONENTIAL)
                if total > 0:
                    rates.add(total)
    values = sorted(Fraction(1, 1) / rate for rate in rates)
    if not values:
        return (Fraction(1),)
    filled = list(values)
    filled.extend((a + b) / 2 for a, b in zip(values, values[1:]))
    filled.append(values[-1] + 1)
    filled = sorted(set(filled))
    if len(filled) > cap:
        step = (len(filled) - 1) / (cap - 1)
        filled = [filled[round(i * step)] for i in range(cap)]
    return tuple(filled)


@d.dataclass(frozen=True)
class CharReport:
    """Outcome of a formula-grid sweep against the decider verdict."""

    consistent: bool
    decider_equivalent: bool | None
    formula: Formula | None
    theta: Theta | None
    value_left: Fraction | None
    value_right: Fraction | None
    formulas_checked: int

    @property
    def theorem_violation(self) -> bool:
        """True when a differing pair contradicts decider equivalence."""
        return not self.consistent and bool(self.decider_equivalent)


def characterization_check(p1: t.ProcessTerm, p2: t.ProcessTerm,
                           names: Iterable[str] | None = None,
                           formula_depth: int = 3,
                           theta_grid: Iterable[Sequence] | None = None,
                           state_bound: int = 10000,
                           consult_decider: bool = True,
                           grid_cap: int = 4,
                           max_theta_len: int | None = None) -> CharReport:
    """Sweep formulas and bound sequences, reporting the first difference.

    The verdict is consistent when no enumerated (formula, theta) pair
    separates the processes; otherwise the earliest difference is
    returned as a counterexample.  When the decider is consulted, a
    counterexample on an equivalent pair flags a theorem violation.
    """
    _require_ctmc(p1, state_bound)
    _require_ctmc(p2, state_bound)
    lts1 = build_lts(p1, state_bound)
    lts2 = build_lts(p2, state_bound)
    if names is None:
        names = sorted(lts1.visible_names() | lts2.visible_names())
    else:
        names = sorted(set(names) - {t.TAU})
    formulas = enumerate_formulas(names, formula_depth)
    if theta_grid is None:
        length = formula_depth if max_theta_len is None else max_theta_len
        values = _time_grid((p1, p2), names, state_bound, grid_cap)
        thetas = [make_theta(combo)
                  for size in range(length + 1)
                  for combo in cartesian(values, repeat=size)]
    else:
        thetas = [make_theta(entry) for entry in theta_grid]

    verdict = None
    if consult_decider:
        from .decider import decide_equiv
        verdict = decide_equiv(p1, p2, state_bound=state_bound,
                               with_test_witness=False).equivalent

    memo1: dict = {}
    memo2: dict = {}
    checked = 0
    for formula in formulas:
        checked += 1
        for theta in thetas:
            left = _eval(p1, theta, formula, memo1)
            right = _eval(p2, theta, formula, memo2)
            if left != right:
                return CharReport(False, verdict, formula, theta,
                                  left, right, checked)
    return CharReport(True, verdict, None, None, None, None, checked)
