"""Process terms of a Markovian process calculus.

Actions are pairs <name, rate> where the rate is either exponentially timed
(a positive rational, the parameter of an exponential delay) or passive
(a positive rational weight, written *w, resolved by reactive preselection
against same-name exponential partners).  The silent name is "tau"; the
name "z" is reserved for test failure branches and may not occur in a
process term.
"""

from __future__ import annotations

import dataclasses as d
from fractions import Fraction
from typing import Iterator

from .errors import NotWellFormed, ReservedNameError

TAU = "tau"
FAILURE_NAME = "z"


@d.dataclass(frozen=True)
class Rate:
    """Exponential rate or passive weight; value is always > 0."""

    value: Fraction
    passive: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))
        if self.value <= 0:
            raise ValueError(f"rate must be positive, got {self.value}")

    @staticmethod
    def exp(value) -> Rate:
        return Rate(Fraction(value), passive=False)

    @staticmethod
    def weight(value) -> Rate:
        return Rate(Fraction(value), passive=True)

    def __str__(self) -> str:
        text = str(self.value)
        return f"*{text}" if self.passive else text


class ProcessTerm:
    """Base class; concrete nodes are frozen dataclasses below."""

    # Hash caching: terms are used as LMTS state keys and multiset keys, so
    # the default recursive dataclass hash would be quadratic overall.
    def __hash__(self) -> int:
        try:
            return self._hash  # type: ignore[attr-defined]
        except AttributeError:
            pass
        fields = tuple(getattr(self, f.name) for f in d.fields(self))  # type: ignore[arg-type]
        value = hash((self.__class__.__name__, fields))
        object.__setattr__(self, "_hash", value)
        return value

    def __str__(self) -> str:
        return pretty(self)


@d.dataclass(frozen=True, eq=True)
class Nil(ProcessTerm):
    __hash__ = ProcessTerm.__hash__


@d.dataclass(frozen=True, eq=True)
class Success(ProcessTerm):
    """Success state of a test; behaves like Nil, prints as "s".

    Never produced by the process-term parser, only by test conversion.
    """

    __hash__ = ProcessTerm.__hash__


@d.dataclass(frozen=True, eq=True)
class Prefix(ProcessTerm):
    name: str
    rate: Rate
    body: ProcessTerm
    __hash__ = ProcessTerm.__hash__


@d.dataclass(frozen=True, eq=True)
class Choice(ProcessTerm):
    left: ProcessTerm
    right: ProcessTerm
    __hash__ = ProcessTerm.__hash__


@d.dataclass(frozen=True, eq=True)
class Parallel(ProcessTerm):
    sync: frozenset[str]
    left: ProcessTerm
    right: ProcessTerm
    __hash__ = ProcessTerm.__hash__

    def __post_init__(self) -> None:
        object.__setattr__(self, "sync", frozenset(self.sync))


@d.dataclass(frozen=True, eq=True)
class Hide(ProcessTerm):
    hidden: frozenset[str]
    body: ProcessTerm
    __hash__ = ProcessTerm.__hash__

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden", frozenset(self.hidden))


@d.dataclass(frozen=True, eq=True)
class Relabel(ProcessTerm):
    # Sorted (old, new) pairs with identity entries dropped: canonical and
    # hashable.  tau may not be renamed and nothing may be renamed to tau.
    mapping: tuple[tuple[str, str], ...]
    body: ProcessTerm
    __hash__ = ProcessTerm.__hash__

    def __post_init__(self) -> None:
        pairs = {}
        for old, new in self.mapping:
            if TAU in (old, new):
                raise ValueError("relabeling must keep tau fixed")
            if old in pairs and pairs[old] != new:
                raise ValueError(f"ambiguous relabeling of {old}")
            pairs[old] = new
        canon = tuple(sorted((o, n) for o, n in pairs.items() if o != n))
        object.__setattr__(self, "mapping", canon)

    def apply(self, name: str) -> str:
        if name == TAU:
            return TAU
        return dict(self.mapping).get(name, name)


@d.dataclass(frozen=True, eq=True)
class Var(ProcessTerm):
    name: str
    __hash__ = ProcessTerm.__hash__


@d.dataclass(frozen=True, eq=True)
class Rec(ProcessTerm):
    var: str
    body: ProcessTerm
    __hash__ = ProcessTerm.__hash__


NIL = Nil()
SUCCESS = Success()


def children(term: ProcessTerm) -> tuple[ProcessTerm, ...]:
    if isinstance(term, Prefix):
        return (term.body,)
    if isinstance(term, (Choice, Parallel)):
        return (term.left, term.right)
    if isinstance(term, (Hide, Relabel)):
        return (term.body,)
    if isinstance(term, Rec):
        return (term.body,)
    return ()


def subterms(term: ProcessTerm) -> Iterator[ProcessTerm]:
    yield term
    for child in children(term):
        yield from subterms(child)


def visible_names(term: ProcessTerm) -> frozenset[str]:
    """All visible action names occurring syntactically in the term.

    Sync sets, hide sets and both sides of relabelings count: they all
    shape which names the term can interact on.
    """
    names: set[str] = set()
    for sub in subterms(term):
        if isinstance(sub, Prefix) and sub.name != TAU:
            names.add(sub.name)
        elif isinstance(sub, Parallel):
            names |= sub.sync
        elif isinstance(sub, Hide):
            names |= sub.hidden
        elif isinstance(sub, Relabel):
            for old, new in sub.mapping:
                names.add(old)
                names.add(new)
    return frozenset(names)


def uses_failure_name(term: ProcessTerm) -> bool:
    return FAILURE_NAME in visible_names(term)


def free_vars(term: ProcessTerm) -> frozenset[str]:
    if isinstance(term, Var):
        return frozenset({term.name})
    if isinstance(term, Rec):
        return free_vars(term.body) - {term.var}
    out: frozenset[str] = frozenset()
    for child in children(term):
        out |= free_vars(child)
    return out


@d.dataclass(frozen=True)
class WellFormedness:
    closed: bool
    guarded: bool

    @property
    def ok(self) -> bool:
        return self.closed and self.guarded


def _guarded(term: ProcessTerm, pending: frozenset[str]) -> bool:
    # pending holds recursion variables whose binder has not yet been
    # crossed by a prefix on the current path.
    if isinstance(term, Var):
        return term.name not in pending
    if isinstance(term, Prefix):
        return _guarded(term.body, frozenset())
    if isinstance(term, Rec):
        return _guarded(term.body, pending | {term.var})
    return all(_guarded(child, pending) for child in children(term))


def check_wellformed(term: ProcessTerm) -> WellFormedness:
    """Closedness plus guardedness of every recursion variable.

    A variable is guarded when every occurrence below its binder sits
    inside at least one action prefix of the binder's body.
    """
    return WellFormedness(
        closed=not free_vars(term),
        guarded=_guarded(term, frozenset()),
    )


def require_analyzable(term: ProcessTerm, *, allow_failure_name: bool = False) -> None:
    wf = check_wellformed(term)
    if not wf.closed:
        raise NotWellFormed(f"term has free variables {sorted(free_vars(term))}")
    if not wf.guarded:
        raise NotWellFormed("unguarded recursion")
    if uses_failure_name(term) and not allow_failure_name:
        raise ReservedNameError(f"name {FAILURE_NAME!r} is reserved for tests")


def substitute(term: ProcessTerm, var: str, replacement: ProcessTerm) -> ProcessTerm:
    """Replace free occurrences of var.  The replacement must be closed
    (always the case for recursion unfolding), so no capture can occur."""
    if isinstance(term, Var):
        return replacement if term.name == var else term
    if isinstance(term, Rec):
        if term.var == var:  # shadowed
            return term
        return Rec(term.var, substitute(term.body, var, replacement))
    if isinstance(term, Prefix):
        return Prefix(term.name, term.rate, substitute(term.body, var, replacement))
    if isinstance(term, Choice):
        return Choice(substitute(term.left, var, replacement), substitute(term.right, var, replacement))
    if isinstance(term, Parallel):
        return Parallel(term.sync, substitute(term.left, var, replacement), substitute(term.right, var, replacement))
    if isinstance(term, Hide):
        return Hide(term.hidden, substitute(term.body, var, replacement))
    if isinstance(term, Relabel):
        return Relabel(term.mapping, substitute(term.body, var, replacement))
    return term


def alpha_normalize(term: ProcessTerm) -> ProcessTerm:
    """Rename recursion binders to canonical names X1, X2, ... by binder
    nesting depth, so alpha-equivalent closed terms become identical."""
    free = free_vars(term)

    def fresh(depth: int) -> str:
        name = f"X{depth}"
        while name in free:
            name += "_"
        return name

    def go(t: ProcessTerm, env: dict[str, str], depth: int) -> ProcessTerm:
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, Rec):
            name = fresh(depth + 1)
            body = go(t.body, {**env, t.var: name}, depth + 1)
            return Rec(name, body)
        if isinstance(t, Prefix):
            return Prefix(t.name, t.rate, go(t.body, env, depth))
        if isinstance(t, Choice):
            return Choice(go(t.left, env, depth), go(t.right, env, depth))
        if isinstance(t, Parallel):
            return Parallel(t.sync, go(t.left, env, depth), go(t.right, env, depth))
        if isinstance(t, Hide):
            return Hide(t.hidden, go(t.body, env, depth))
        if isinstance(t, Relabel):
            return Relabel(t.mapping, go(t.body, env, depth))
        return t

    return go(term, {}, 0)


# Pretty printing.  Binding strength, tightest first: prefix, then hiding
# and relabeling, then parallel, then choice.  rec swallows everything to
# its right, so it is parenthesized whenever it appears as an operand.

_LEVEL_CHOICE = 0
_LEVEL_PAR = 1
_LEVEL_POSTFIX = 2
_LEVEL_PREFIX = 3
_LEVEL_ATOM = 4


def _level(term: ProcessTerm) -> int:
    if isinstance(term, (Nil, Success, Var)):
        return _LEVEL_ATOM
    if isinstance(term, Prefix):
        return _LEVEL_PREFIX
    if isinstance(term, (Hide, Relabel)):
        return _LEVEL_POSTFIX
    if isinstance(term, Parallel):
        return _LEVEL_PAR
    return _LEVEL_CHOICE  # Choice and Rec


def pretty(term: ProcessTerm, min_level: int = 0) -> str:
    if isinstance(term, Nil):
        text = "0"
    elif isinstance(term, Success):
        text = "s"
    elif isinstance(term, Var):
        text = term.name
    elif isinstance(term, Prefix):
        text = f"<{term.name},{term.rate}>.{pretty(term.body, _LEVEL_PREFIX)}"
    elif isinstance(term, Hide):
        text = f"{pretty(term.body, _LEVEL_POSTFIX)} / {{{','.join(sorted(term.hidden))}}}"
    elif isinstance(term, Relabel):
        renames = ",".join(f"{o}->{n}" for o, n in term.mapping)
        text = f"{pretty(term.body, _LEVEL_POSTFIX)}[{renames}]"
    elif isinstance(term, Parallel):
        op = f"|[{','.join(sorted(term.sync))}]|"
        text = f"{pretty(term.left, _LEVEL_POSTFIX)} {op} {pretty(term.right, _LEVEL_PAR)}"
    elif isinstance(term, Choice):
        text = f"{pretty(term.left, _LEVEL_PAR)} + {pretty(term.right, _LEVEL_CHOICE)}"
    elif isinstance(term, Rec):
        text = f"rec {term.var} : {pretty(term.body, _LEVEL_CHOICE)}"
    else:
        raise TypeError(f"not a process term: {term!r}")
    if _level(term) < min_level:
        return f"({text})"
    return text
