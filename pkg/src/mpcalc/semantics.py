"""Multitransition semantics.

derive_transitions implements the structural rules for prefix, choice,
parallel composition with asymmetric synchronization, hiding, relabeling
and recursion.  A transition's multiplicity is the number of distinct
derivation proofs, so <a,1>.0 + <a,1>.0 has the a-transition twice.

Synchronization discipline: an exponentially timed action <a,lambda> may
only synchronize with a passive action <a,*w> of the other operand, and
the result is timed lambda * w / weight(other, a) (reactive preselection).
Two passive actions synchronize into a passive action whose weight is
norm(w1, w2, a, P, Q) = (w1/weight(P,a)) * (w2/weight(Q,a))
                        * (weight(P,a) + weight(Q,a)).
"""

from __future__ import annotations

import dataclasses as d
import json
from collections import Counter
from fractions import Fraction
from functools import lru_cache

from . import terms as t
from .errors import NotWellFormed, StateBoundExceeded

# A transition entry as produced by derive_transitions: the target is a raw
# (not alpha-normalized) term.
Entry = tuple[str, t.Rate, t.ProcessTerm]


@lru_cache(maxsize=None)
def derive_transitions(term: t.ProcessTerm) -> tuple[tuple[Entry, int], ...]:
    """Transition multiset of a closed term, as ((name, rate, target), count)
    pairs in deterministic derivation order."""
    return tuple(_derive(term).items())


def _derive(term: t.ProcessTerm) -> Counter[Entry]:
    out: Counter[Entry] = Counter()
    if isinstance(term, (t.Nil, t.Success)):
        return out
    if isinstance(term, t.Var):
        raise NotWellFormed(f"cannot derive transitions of free variable {term.name}")
    if isinstance(term, t.Prefix):
        out[(term.name, term.rate, term.body)] = 1
        return out
    if isinstance(term, t.Choice):
        out.update(_derive_cached(term.left))
        out.update(_derive_cached(term.right))
        return out
    if isinstance(term, t.Parallel):
        return _derive_parallel(term)
    if isinstance(term, t.Hide):
        for (name, rate, target), count in derive_transitions(term.body):
            mapped = t.TAU if name in term.hidden else name
            out[(mapped, rate, t.Hide(term.hidden, target))] += count
        return out
    if isinstance(term, t.Relabel):
        for (name, rate, target), count in derive_transitions(term.body):
            out[(term.apply(name), rate, t.Relabel(term.mapping, target))] += count
        return out
    if isinstance(term, t.Rec):
        if not t.check_wellformed(term).guarded:
            raise NotWellFormed(f"unguarded recursion on {term.var}")
        unfolded = t.substitute(term.body, term.var, term)
        out.update(_derive_cached(unfolded))
        return out
    raise TypeError(f"not a process term: {term!r}")


def _derive_cached(term: t.ProcessTerm) -> Counter[Entry]:
    return Counter(dict(derive_transitions(term)))


def _derive_parallel(term: t.Parallel) -> Counter[Entry]:
    out: Counter[Entry] = Counter()
    sync = term.sync
    left = derive_transitions(term.left)
    right = derive_transitions(term.right)
    for (name, rate, target), count in left:
        if name not in sync:
            out[(name, rate, t.Parallel(sync, target, term.right))] += count
    for (name, rate, target), count in right:
        if name not in sync:
            out[(name, rate, t.Parallel(sync, term.left, target))] += count
    for name in sorted(sync):
        lefts = [(rate, target, count) for (a, rate, target), count in left if a == name]
        rights = [(rate, target, count) for (a, rate, target), count in right if a == name]
        if not lefts or not rights:
            continue
        weight_left = sum((r.value * c for r, _, c in lefts if r.passive), Fraction(0))
        weight_right = sum((r.value * c for r, _, c in rights if r.passive), Fraction(0))
        for lrate, ltarget, lcount in lefts:
            for rrate, rtarget, rcount in rights:
                if not lrate.passive and not rrate.passive:
                    continue  # two timed actions never synchronize
                if not lrate.passive:
                    value = lrate.value * rrate.value / weight_right
                    rate = t.Rate(value)
                elif not rrate.passive:
                    value = rrate.value * lrate.value / weight_left
                    rate = t.Rate(value)
                else:
                    value = (lrate.value / weight_left) * (rrate.value / weight_right) * (
                        weight_left + weight_right
                    )
                    rate = t.Rate(value, passive=True)
                combined = t.Parallel(sync, ltarget, rtarget)
                out[(name, rate, combined)] += lcount * rcount
    return out


def weight(term: t.ProcessTerm, name: str) -> Fraction:
    """Total passive weight of name-transitions, multiplicities included."""
    total = Fraction(0)
    for (a, rate, _), count in derive_transitions(term):
        if a == name and rate.passive:
            total += rate.value * count
    return total


@lru_cache(maxsize=None)
def _normal(term: t.ProcessTerm) -> t.ProcessTerm:
    return t.alpha_normalize(term)


@d.dataclass(frozen=True)
class Transition:
    source: t.ProcessTerm
    name: str
    rate: t.Rate
    target: t.ProcessTerm
    multiplicity: int

    @property
    def aggregate(self) -> Fraction:
        """Rate mass of this aggregated transition (rate times multiplicity)."""
        return self.rate.value * self.multiplicity

    def __str__(self) -> str:
        mult = f" [x{self.multiplicity}]" if self.multiplicity > 1 else ""
        return f"{self.source} --{self.name},{self.rate}{mult}--> {self.target}"


@d.dataclass
class LMTS:
    """Labeled multitransition system over alpha-normalized state terms."""

    root: t.ProcessTerm
    states: list[t.ProcessTerm]
    index: dict[t.ProcessTerm, int]
    outgoing: list[list[Transition]]

    def transitions(self):
        for group in self.outgoing:
            yield from group

    def state_of(self, term: t.ProcessTerm) -> int:
        return self.index[_normal(term)]

    @property
    def performance_closed(self) -> bool:
        return all(not tr.rate.passive for tr in self.transitions())

    def visible_names(self) -> frozenset[str]:
        return frozenset(tr.name for tr in self.transitions() if tr.name != t.TAU)


def build_lts(
    term: t.ProcessTerm, state_bound: int = 10000, *, allow_failure_name: bool = False
) -> LMTS:
    """Breadth-first state-space construction.

    Raises StateBoundExceeded when more than state_bound states are reached,
    which signals likely divergence such as rec X : <a,1>.(X |[]| X).
    """
    t.require_analyzable(term, allow_failure_name=allow_failure_name)
    root = _normal(term)
    states = [root]
    index = {root: 0}
    outgoing: list[list[Transition]] = []
    frontier = [root]
    while frontier:
        next_frontier: list[t.ProcessTerm] = []
        for state in frontier:
            group: list[Transition] = []
            for (name, rate, raw_target), count in derive_transitions(state):
                target = _normal(raw_target)
                if target not in index:
                    if len(states) >= state_bound:
                        raise StateBoundExceeded(
                            f"more than {state_bound} states reachable from {term}"
                        )
                    index[target] = len(states)
                    states.append(target)
                    next_frontier.append(target)
                group.append(Transition(state, name, rate, target, count))
            outgoing.append(group)
        frontier = next_frontier
    return LMTS(root=root, states=states, index=index, outgoing=outgoing)


def is_performance_closed(lts: LMTS) -> bool:
    """No reachable passive transition: every delay is exponentially timed."""
    return lts.performance_closed


def _rate_json(rate: t.Rate) -> dict:
    return {
        "kind": "passive" if rate.passive else "exp",
        "num": rate.value.numerator,
        "den": rate.value.denominator,
    }


def export_json(lts: LMTS, annotate_rates: bool = False) -> dict:
    data = {
        "states": [t.pretty(s) for s in lts.states],
        "transitions": [
            {
                "src": lts.index[tr.source],
                "name": tr.name,
                "rate": _rate_json(tr.rate),
                "tgt": lts.index[tr.target],
                "mult": tr.multiplicity,
            }
            for tr in lts.transitions()
        ],
    }
    if annotate_rates:
        from . import rates

        annotations = []
        for state in lts.states:
            total = rates.rate_t(state, 0)
            sojourn = rates.avg_sojourn(state)
            annotations.append(
                {
                    "rate_t": {"num": total.numerator, "den": total.denominator},
                    "sojourn": "inf"
                    if sojourn == float("inf")
                    else {"num": sojourn.numerator, "den": sojourn.denominator},
                }
            )
        data["rates"] = annotations
    return data


def export_dot(lts: LMTS) -> str:
    def quote(text: str) -> str:
        return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'

    lines = ["digraph lmts {", "  rankdir=LR;"]
    for i, state in enumerate(lts.states):
        shape = "doublecircle" if i == 0 else "circle"
        lines.append(f"  n{i} [shape={shape}, label={quote(t.pretty(state))}];")
    for tr in lts.transitions():
        mult = f" [x{tr.multiplicity}]" if tr.multiplicity > 1 else ""
        label = f"{tr.name}, {tr.rate}{mult}"
        lines.append(
            f"  n{lts.index[tr.source]} -> n{lts.index[tr.target]} [label={quote(label)}];"
        )
    lines.append("}")
    return "\n".join(lines)


def export_json_text(lts: LMTS, annotate_rates: bool = False) -> str:
    return json.dumps(export_json(lts, annotate_rates=annotate_rates), indent=2)
