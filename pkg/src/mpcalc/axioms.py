"""Equational laws, static-operator expansion and a normalization prover.

The fifteen laws cover commutativity/associativity/identity of choice
(A1-A3), the rate-merging schema A4, the expansion law A5 for parallel
composition with its nil degenerations A6-A8, and distribution of hiding
(A9-A12) and relabeling (A13-A15) over prefixes and sums.

A6 and A7 keep the nil parallel context around the continuations
(<a,rate>.(P |[S]| 0) rather than <a,rate>.P): dropping it is unsound
whenever a continuation mentions a name in S, e.g. <a,1>.<s,1>.0 |[s]| 0
deadlocks after a while <a,1>.<s,1>.0 does not.  Innermost expansion
removes the kept context in the next round, so fully expanded results are
unaffected.

normalize implements the proof strategy: expand away static operators,
then per sum flatten with A1-A3 under a fixed total order and merge with
A4 wherever the cumulative-rate side condition holds, to a fixpoint.
normalize_with_trace performs the same computation as an explicit,
replayable sequence of single law applications.
"""

from __future__ import annotations

import dataclasses as d
from fractions import Fraction

from . import terms as t
from .errors import LawError, NotPerformanceClosed, NotWellFormed
from .semantics import build_lts, weight

LAW_IDS = tuple(f"A{i}" for i in range(1, 16))

Path = tuple[int, ...]


@d.dataclass(frozen=True)
class RewriteStep:
    law: str
    position: Path = ()
    direction: str = "lr"  # lr | rl
    binding: tuple[tuple[str, str], ...] = ()

    def __str__(self) -> str:
        where = ".".join(map(str, self.position)) or "root"
        arrow = "->" if self.direction == "lr" else "<-"
        extra = "".join(f" {k}={v}" for k, v in self.binding)
        return f"{self.law} {arrow} at {where}{extra}"


def _with_child(term: t.ProcessTerm, i: int, child: t.ProcessTerm) -> t.ProcessTerm:
    if isinstance(term, t.Prefix) and i == 0:
        return t.Prefix(term.name, term.rate, child)
    if isinstance(term, t.Choice) and i in (0, 1):
        return t.Choice(child, term.right) if i == 0 else t.Choice(term.left, child)
    if isinstance(term, t.Parallel) and i in (0, 1):
        if i == 0:
            return t.Parallel(term.sync, child, term.right)
        return t.Parallel(term.sync, term.left, child)
    if isinstance(term, t.Hide) and i == 0:
        return t.Hide(term.hidden, child)
    if isinstance(term, t.Relabel) and i == 0:
        return t.Relabel(term.mapping, child)
    if isinstance(term, t.Rec) and i == 0:
        return t.Rec(term.var, child)
    raise LawError(f"no child {i} in {type(term).__name__}")


def subterm_at(term: t.ProcessTerm, position: Path) -> t.ProcessTerm:
    for i in position:
        kids = t.children(term)
        if i >= len(kids):
            raise LawError(f"position {position} does not exist")
        term = kids[i]
    return term


def replace_at(term: t.ProcessTerm, position: Path, new: t.ProcessTerm) -> t.ProcessTerm:
    if not position:
        return new
    head = position[0]
    kids = t.children(term)
    if head >= len(kids):
        raise LawError(f"position {position} does not exist")
    return _with_child(term, head, replace_at(kids[head], position[1:], new))


def summand_list(term: t.ProcessTerm) -> list[t.ProcessTerm]:
    if isinstance(term, t.Choice):
        return summand_list(term.left) + summand_list(term.right)
    return [term]


def nest_right(parts: list[t.ProcessTerm]) -> t.ProcessTerm:
    if not parts:
        return t.NIL
    acc = parts[-1]
    for p in reversed(parts[:-1]):
        acc = t.Choice(p, acc)
    return acc


def _prefix_sum(term: t.ProcessTerm, law: str) -> list[t.Prefix]:
    parts = summand_list(term)
    if not all(isinstance(p, t.Prefix) for p in parts):
        raise LawError(f"{law} needs a sum of prefixes, got {term}")
    return parts  # type: ignore[return-value]


def _cumulative(body: t.ProcessTerm, law: str) -> dict[str, Fraction]:
    """Per-name summed rates of a body that is nil or a sum of
    exponentially timed prefixes."""
    if body == t.NIL:
        return {}
    out: dict[str, Fraction] = {}
    for p in _prefix_sum(body, law):
        if p.rate.passive:
            raise LawError(f"{law} is stated for exponentially timed rates")
        out[p.name] = out.get(p.name, Fraction(0)) + p.rate.value
    return out


def _a4(term: t.ProcessTerm) -> t.ProcessTerm:
    branches = _prefix_sum(term, "A4")
    if len(branches) < 2:
        raise LawError("A4 requires at least two branches")
    name = branches[0].name
    if any(b.name != name for b in branches):
        raise LawError("A4 branches must share one action name")
    if any(b.rate.passive for b in branches):
        raise LawError("A4 is stated for exponentially timed rates")
    maps = [_cumulative(b.body, "A4") for b in branches]
    if any(m != maps[0] for m in maps[1:]):
        raise LawError("A4 cumulative derivative rates differ across branches")
    total = sum((b.rate.value for b in branches), Fraction(0))
    inner: list[t.ProcessTerm] = []
    for b in branches:
        share = b.rate.value / total
        if b.body == t.NIL:
            continue
        for p in _prefix_sum(b.body, "A4"):
            inner.append(t.Prefix(p.name, t.Rate(share * p.rate.value), p.body))
    return t.Prefix(name, t.Rate(total), nest_right(inner))


def _a5(term: t.Parallel) -> t.ProcessTerm:
    left = _prefix_sum(term.left, "A5")
    right = _prefix_sum(term.right, "A5")
    sync = term.sync
    par = lambda a, b: t.Parallel(sync, a, b)
    out: list[t.ProcessTerm] = []
    for k in left:
        if k.name not in sync:
            out.append(t.Prefix(k.name, k.rate, par(k.body, term.right)))
    for h in right:
        if h.name not in sync:
            out.append(t.Prefix(h.name, h.rate, par(term.left, h.body)))
    for k in left:
        if k.name in sync and not k.rate.passive:
            for h in right:
                if h.name == k.name and h.rate.passive:
                    scaled = k.rate.value * h.rate.value / weight(term.right, k.name)
                    out.append(t.Prefix(k.name, t.Rate(scaled), par(k.body, h.body)))
    for h in right:
        if h.name in sync and not h.rate.passive:
            for k in left:
                if k.name == h.name and k.rate.passive:
                    scaled = h.rate.value * k.rate.value / weight(term.left, h.name)
                    out.append(t.Prefix(h.name, t.Rate(scaled), par(k.body, h.body)))
    for k in left:
        if k.name in sync and k.rate.passive:
            for h in right:
                if h.name == k.name and h.rate.passive:
                    wl = weight(term.left, k.name)
                    wr = weight(term.right, k.name)
                    value = (k.rate.value / wl) * (h.rate.value / wr) * (wl + wr)
                    out.append(t.Prefix(k.name, t.Rate(value, passive=True), par(k.body, h.body)))
    return nest_right(out)


def _a6(term: t.Parallel) -> t.ProcessTerm:
    # Context kept around continuations; see module docstring.
    parts = _prefix_sum(term.left, "A6")
    kept = [
        t.Prefix(p.name, p.rate, t.Parallel(term.sync, p.body, t.NIL))
        for p in parts
        if p.name not in term.sync
    ]
    return nest_right(kept)


def _a7(term: t.Parallel) -> t.ProcessTerm:
    parts = _prefix_sum(term.right, "A7")
    kept = [
        t.Prefix(p.name, p.rate, t.Parallel(term.sync, t.NIL, p.body))
        for p in parts
        if p.name not in term.sync
    ]
    return nest_right(kept)


def _rewrite(law: str, direction: str, x: t.ProcessTerm) -> t.ProcessTerm:
    if law == "A1":
        if isinstance(x, t.Choice):
            return t.Choice(x.right, x.left)
        raise LawError("A1 needs a choice")
    if law == "A2":
        if direction == "lr":
            if isinstance(x, t.Choice) and isinstance(x.left, t.Choice):
                return t.Choice(x.left.left, t.Choice(x.left.right, x.right))
            raise LawError("A2 needs (P1 + P2) + P3")
        if isinstance(x, t.Choice) and isinstance(x.right, t.Choice):
            return t.Choice(t.Choice(x.left, x.right.left), x.right.right)
        raise LawError("A2 (right-to-left) needs P1 + (P2 + P3)")
    if law == "A3":
        if direction == "rl":
            return t.Choice(x, t.NIL)
        if isinstance(x, t.Choice) and x.right == t.NIL:
            return x.left
        raise LawError("A3 needs P + 0")
    if direction != "lr":
        raise LawError(f"{law} is applied left-to-right only")
    if law == "A4":
        return _a4(x)
    if law in ("A5", "A6", "A7", "A8"):
        if not isinstance(x, t.Parallel):
            raise LawError(f"{law} needs a parallel composition")
        left_nil, right_nil = x.left == t.NIL, x.right == t.NIL
        if law == "A8":
            if left_nil and right_nil:
                return t.NIL
            raise LawError("A8 needs 0 |[S]| 0")
        if law == "A6":
            if right_nil and not left_nil:
                return _a6(x)
            raise LawError("A6 needs P |[S]| 0")
        if law == "A7":
            if left_nil and not right_nil:
                return _a7(x)
            raise LawError("A7 needs 0 |[S]| P")
        if left_nil or right_nil:
            raise LawError("A5 needs prefix sums on both sides")
        return _a5(x)
    if law in ("A9", "A10", "A11", "A12"):
        if not isinstance(x, t.Hide):
            raise LawError(f"{law} needs a hiding")
        if law == "A9":
            if x.body == t.NIL:
                return t.NIL
            raise LawError("A9 needs 0 / H")
        if law == "A12":
            if isinstance(x.body, t.Choice):
                return t.Choice(
                    t.Hide(x.hidden, x.body.left), t.Hide(x.hidden, x.body.right)
                )
            raise LawError("A12 needs (P1 + P2) / H")
        if not isinstance(x.body, t.Prefix):
            raise LawError(f"{law} needs a prefixed body")
        inside = x.body.name in x.hidden
        if law == "A10" and not inside:
            raise LawError("A10 needs the name hidden")
        if law == "A11" and inside:
            raise LawError("A11 needs the name not hidden")
        new_name = t.TAU if inside else x.body.name
        return t.Prefix(new_name, x.body.rate, t.Hide(x.hidden, x.body.body))
    if law in ("A13", "A14", "A15"):
        if not isinstance(x, t.Relabel):
            raise LawError(f"{law} needs a relabeling")
        if law == "A13":
            if x.body == t.NIL:
                return t.NIL
            raise LawError("A13 needs 0[phi]")
        if law == "A15":
            if isinstance(x.body, t.Choice):
                return t.Choice(
                    t.Relabel(x.mapping, x.body.left), t.Relabel(x.mapping, x.body.right)
                )
            raise LawError("A15 needs (P1 + P2)[phi]")
        if not isinstance(x.body, t.Prefix):
            raise LawError("A14 needs a prefixed body")
        renamed = x.apply(x.body.name) if x.body.name != t.TAU else t.TAU
        return t.Prefix(renamed, x.body.rate, t.Relabel(x.mapping, x.body.body))
    raise LawError(f"unknown law {law!r}")


def apply_law(term: t.ProcessTerm, step: RewriteStep) -> t.ProcessTerm:
    if step.law not in LAW_IDS:
        raise LawError(f"unknown law {step.law!r}")
    if step.direction not in ("lr", "rl"):
        raise LawError(f"unknown direction {step.direction!r}")
    redex = subterm_at(term, step.position)
    return replace_at(term, step.position, _rewrite(step.law, step.direction, redex))


def _require_nonrecursive(term: t.ProcessTerm) -> None:
    for sub in t.subterms(term):
        if isinstance(sub, (t.Rec, t.Var)):
            raise NotWellFormed("static expansion is defined for nonrecursive terms")
        if isinstance(sub, t.Success):
            raise NotWellFormed("tests cannot be expanded")


def expand_static(term: t.ProcessTerm) -> t.ProcessTerm:
    """Remove Parallel/Hide/Relabel by innermost application of A5-A15."""
    _require_nonrecursive(term)

    def parallel(sync, left, right) -> t.ProcessTerm:
        if left == t.NIL and right == t.NIL:
            return t.NIL
        x = t.Parallel(sync, left, right)
        if right == t.NIL:
            expanded = _a6(x)
        elif left == t.NIL:
            expanded = _a7(x)
        else:
            expanded = _a5(x)
        return nest_right([
            t.Prefix(p.name, p.rate, ex(p.body)) for p in summand_list(expanded)
            if isinstance(p, t.Prefix)
        ]) if expanded != t.NIL else t.NIL

    def hide(hidden, body) -> t.ProcessTerm:
        if body == t.NIL:
            return t.NIL
        out = []
        for p in _prefix_sum(body, "A10"):
            name = t.TAU if p.name in hidden else p.name
            out.append(t.Prefix(name, p.rate, hide(hidden, p.body)))
        return nest_right(out)

    def relabel(mapping, body) -> t.ProcessTerm:
        if body == t.NIL:
            return t.NIL
        rename = dict(mapping)
        out = []
        for p in _prefix_sum(body, "A14"):
            out.append(
                t.Prefix(rename.get(p.name, p.name), p.rate, relabel(mapping, p.body))
            )
        return nest_right(out)

    def ex(x: t.ProcessTerm) -> t.ProcessTerm:
        if isinstance(x, t.Prefix):
            return t.Prefix(x.name, x.rate, ex(x.body))
        if isinstance(x, t.Choice):
            # nil summands are dropped on the way (A3), keeping operand
            # sums in the prefix-sum shape the laws expect
            left, right = ex(x.left), ex(x.right)
            if left == t.NIL:
                return right
            if right == t.NIL:
                return left
            return t.Choice(left, right)
        if isinstance(x, t.Parallel):
            return parallel(x.sync, ex(x.left), ex(x.right))
        if isinstance(x, t.Hide):
            return hide(x.hidden, ex(x.body))
        if isinstance(x, t.Relabel):
            return relabel(x.mapping, ex(x.body))
        return x

    return ex(term)


def _sort_key(term: t.ProcessTerm):
    if isinstance(term, t.Prefix):
        return (
            1,
            0 if term.name == t.TAU else 1,
            term.name,
            1 if term.rate.passive else 0,
            term.rate.value,
            _sort_key(term.body),
        )
    if isinstance(term, t.Choice):
        return (2, tuple(_sort_key(p) for p in summand_list(term)))
    return (0,)


def _group_key(part: t.Prefix):
    body_map = tuple(sorted(_cumulative_or_none(part.body).items()))
    return (part.name, body_map)


def _cumulative_or_none(body: t.ProcessTerm) -> dict[str, Fraction]:
    try:
        return _cumulative(body, "A4")
    except LawError:
        return {"?unmergeable?": Fraction(0)}


def _mergeable(parts: list[t.ProcessTerm]) -> dict[tuple, list[int]]:
    """Indices of exponential prefix summands grouped by A4's side
    condition; only groups of two or more can be merged."""
    groups: dict[tuple, list[int]] = {}
    for i, p in enumerate(parts):
        if isinstance(p, t.Prefix) and not p.rate.passive:
            if not _has_passive_top(p.body):
                groups.setdefault(_group_key(p), []).append(i)
    return {k: v for k, v in groups.items() if len(v) >= 2}


def _has_passive_top(body: t.ProcessTerm) -> bool:
    if body == t.NIL:
        return False
    parts = summand_list(body)
    return any(not isinstance(p, t.Prefix) or p.rate.passive for p in parts)


def _canon(term: t.ProcessTerm) -> t.ProcessTerm:
    if isinstance(term, t.Prefix):
        return t.Prefix(term.name, term.rate, _canon(term.body))
    if not isinstance(term, t.Choice):
        return term
    parts = [_canon(p) for p in summand_list(term) if p != t.NIL]
    while True:
        groups = _mergeable(parts)
        if not groups:
            break
        key = min(groups, key=lambda k: min(groups[k]))
        indices = set(groups[key])
        members = [parts[i] for i in sorted(indices)]
        merged = _a4(nest_right(members))
        merged = t.Prefix(merged.name, merged.rate, _canon(merged.body))
        parts = [p for i, p in enumerate(parts) if i not in indices] + [merged]
    parts.sort(key=_sort_key)
    return nest_right(parts)


def normalize(term: t.ProcessTerm, state_bound: int = 10000) -> t.ProcessTerm:
    """Normal form under the A1-A4 strategy after static expansion.

    Defined for nonrecursive performance-closed terms; such terms expand
    to exponentially timed prefix trees, which A4 can always merge when
    its cumulative-rate condition holds.
    """
    if not build_lts(term, state_bound).performance_closed:
        raise NotPerformanceClosed("normalization is defined for performance-closed terms")
    return _canon(expand_static(term))


@d.dataclass(frozen=True)
class ProveReport:
    proved: bool
    normal_left: t.ProcessTerm
    normal_right: t.ProcessTerm
    trace_left: tuple[RewriteStep, ...]
    trace_right: tuple[RewriteStep, ...]
    decider_equivalent: bool | None = None

    @property
    def completeness_gap(self) -> bool:
        return not self.proved and bool(self.decider_equivalent)


def axiom_prove(
    p1: t.ProcessTerm,
    p2: t.ProcessTerm,
    consult_decider: bool = True,
    state_bound: int = 10000,
) -> ProveReport:
    """Prove p1 = p2 by comparing normal forms; on failure consult the
    decision procedure so completeness gaps of the strategy are visible
    rather than silent."""
    n1, trace1 = normalize_with_trace(p1, state_bound)
    n2, trace2 = normalize_with_trace(p2, state_bound)
    proved = n1 == n2
    decided: bool | None = True if proved else None
    if not proved and consult_decider:
        from .decider import decide_equiv

        decided = decide_equiv(p1, p2, state_bound, with_test_witness=False).equivalent
    return ProveReport(proved, n1, n2, tuple(trace1), tuple(trace2), decided)


class _TraceEngine:
    """Replays the normalize strategy as single Table 2 steps on the whole
    term, so the trace can be checked by literal re-application."""

    def __init__(self, term: t.ProcessTerm):
        self.term = term
        self.steps: list[RewriteStep] = []

    def apply(self, law: str, position: Path, direction: str = "lr", binding=()) -> None:
        step = RewriteStep(law, tuple(position), direction, tuple(binding))
        self.term = apply_law(self.term, step)
        self.steps.append(step)

    # --- static elimination ---------------------------------------------

    def _innermost_static(self) -> Path | None:
        found: Path | None = None

        def visit(x: t.ProcessTerm, path: Path) -> bool:
            deeper = False
            for i, child in enumerate(t.children(x)):
                deeper |= visit(child, path + (i,))
            if deeper:
                return True
            nonlocal found
            if isinstance(x, (t.Parallel, t.Hide, t.Relabel)) and found is None:
                found = path
                return True
            return False

        visit(self.term, ())
        return found

    def expand(self) -> None:
        while (pos := self._innermost_static()) is not None:
            node = subterm_at(self.term, pos)
            if isinstance(node, t.Parallel):
                # collapsed inner terms may have left nil summands behind;
                # A5-A7 need clean prefix-sum operands
                self._clean_spine(pos + (0,))
                self._clean_spine(pos + (1,))
                node = subterm_at(self.term, pos)
                left_nil, right_nil = node.left == t.NIL, node.right == t.NIL
                if left_nil and right_nil:
                    self.apply("A8", pos)
                elif right_nil:
                    self.apply("A6", pos)
                elif left_nil:
                    self.apply("A7", pos)
                else:
                    self.apply("A5", pos)
            elif isinstance(node, t.Hide):
                if node.body == t.NIL:
                    self.apply("A9", pos)
                elif isinstance(node.body, t.Choice):
                    self.apply("A12", pos)
                elif isinstance(node.body, t.Prefix):
                    law = "A10" if node.body.name in node.hidden else "A11"
                    self.apply(law, pos, binding=(("name", node.body.name),))
                else:
                    raise LawError(f"cannot expand hiding of {node.body}")
            else:
                assert isinstance(node, t.Relabel)
                if node.body == t.NIL:
                    self.apply("A13", pos)
                elif isinstance(node.body, t.Choice):
                    self.apply("A15", pos)
                elif isinstance(node.body, t.Prefix):
                    self.apply("A14", pos, binding=(("name", node.body.name),))
                else:
                    raise LawError(f"cannot expand relabeling of {node.body}")

    # --- spine surgery ----------------------------------------------------

    def _spine(self, pos: Path) -> list[Path]:
        paths: list[Path] = []
        path = pos
        while isinstance(subterm_at(self.term, path), t.Choice):
            paths.append(path + (0,))
            path = path + (1,)
        paths.append(path)
        return paths

    def _flatten(self, pos: Path) -> None:
        while True:
            path = pos
            rotated = False
            while isinstance(node := subterm_at(self.term, path), t.Choice):
                if isinstance(node.left, t.Choice):
                    self.apply("A2", path)
                    rotated = True
                    break
                path = path + (1,)
            if not rotated:
                return

    def _drop_nils(self, pos: Path) -> None:
        while isinstance(subterm_at(self.term, pos), t.Choice):
            elements = self._spine(pos)
            for i, epath in enumerate(elements):
                if subterm_at(self.term, epath) == t.NIL:
                    parent = epath[:-1] if i < len(elements) - 1 else elements[i - 1][:-1]
                    if i < len(elements) - 1:
                        self.apply("A1", parent)
                    self.apply("A3", parent)
                    break
            else:
                return

    def _clean_spine(self, pos: Path) -> None:
        self._flatten(pos)
        self._drop_nils(pos)

    def _swap(self, pos: Path, i: int, n: int) -> None:
        node_path = pos + (1,) * i
        if i + 1 == n - 1:
            self.apply("A1", node_path)
        else:
            self.apply("A2", node_path, "rl")
            self.apply("A1", node_path + (0,))
            self.apply("A2", node_path)

    def _sort_spine(self, pos: Path, key) -> None:
        while True:
            elements = self._spine(pos)
            n = len(elements)
            keys = [key(subterm_at(self.term, e)) for e in elements]
            for i in range(n - 1):
                if keys[i] > keys[i + 1]:
                    self._swap(pos, i, n)
                    break
            else:
                return

    def canonize(self, pos: Path = ()) -> None:
        node = subterm_at(self.term, pos)
        if isinstance(node, t.Prefix):
            self.canonize(pos + (0,))
            return
        if not isinstance(node, t.Choice):
            return
        self._flatten(pos)
        self._drop_nils(pos)
        node = subterm_at(self.term, pos)
        if not isinstance(node, t.Choice):
            self.canonize(pos)
            return
        for epath in self._spine(pos):
            element = subterm_at(self.term, epath)
            if isinstance(element, t.Prefix):
                self.canonize(epath + (0,))
        while True:
            elements = self._spine(pos)
            parts = [subterm_at(self.term, e) for e in elements]
            groups = _mergeable(parts)
            if not groups:
                break
            key = min(groups, key=lambda k: min(groups[k]))

            def member(part: t.ProcessTerm) -> bool:
                return (
                    isinstance(part, t.Prefix)
                    and not part.rate.passive
                    and not _has_passive_top(part.body)
                    and _group_key(part) == key
                )

            # stable partition floating the group to the spine tail, where
            # a contiguous sum is an addressable subterm
            self._sort_spine(pos, key=lambda p: 1 if member(p) else 0)
            parts = [subterm_at(self.term, e) for e in self._spine(pos)]
            start = next(i for i, p in enumerate(parts) if member(p))
            width = len(parts) - start
            merge_at = pos + (1,) * start
            self.apply("A4", merge_at, binding=(("width", str(width)),))
            self.canonize(merge_at + (0,))
        self._sort_spine(pos, key=_sort_key)


def normalize_with_trace(
    term: t.ProcessTerm, state_bound: int = 10000
) -> tuple[t.ProcessTerm, list[RewriteStep]]:
    """normalize, as an explicit replayable rewrite sequence."""
    if not build_lts(term, state_bound).performance_closed:
        raise NotPerformanceClosed("normalization is defined for performance-closed terms")
    _require_nonrecursive(term)
    engine = _TraceEngine(term)
    engine.expand()
    engine.canonize()
    return engine.term, engine.steps
