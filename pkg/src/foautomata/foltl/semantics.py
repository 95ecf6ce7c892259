"""Finite-word semantics, normal forms, closure and surrogate tables."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Collection, Mapping

from ..core.evaluate import EvaluationError, compile_formula
from ..core.signature import SymbolDecl, prime_name
from ..core.structure import Word
from .syntax import (
    BOTTOM,
    FUTURE,
    QUANTIFIERS,
    SO_QUANTIFIERS,
    TEMPORAL,
    TOP,
    UNARY_TEMPORAL,
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    Release,
    SOExists,
    SOForall,
    Since,
    Top,
    Triggered,
    Until,
    WeakNext,
    WeakYesterday,
    Yesterday,
    alpha_key,
    children,
    free_vars,
    rebuild,
    subformulas,
)


# -- satisfaction ------------------------------------------------------------

_TCACHE: dict = {}


def _compile_temporal(f: Formula) -> Callable:
    """Closure ``(W, D, i, E) -> bool`` where W is a list of letter interps."""
    fn = _TCACHE.get(f)
    if fn is not None:
        return fn
    if not any(isinstance(g, TEMPORAL) for g in subformulas(f)):
        fo = compile_formula(f)

        def fn(W, D, i, E):
            return fo(W[i], D, E)

    elif isinstance(f, Not):
        sub = _compile_temporal(f.arg)
        fn = lambda W, D, i, E: not sub(W, D, i, E)  # noqa: E731
    elif isinstance(f, And):
        subs = [_compile_temporal(a) for a in f.args]
        fn = lambda W, D, i, E: all(s(W, D, i, E) for s in subs)  # noqa: E731
    elif isinstance(f, Or):
        subs = [_compile_temporal(a) for a in f.args]
        fn = lambda W, D, i, E: any(s(W, D, i, E) for s in subs)  # noqa: E731
    elif isinstance(f, Implies):
        l, r = _compile_temporal(f.left), _compile_temporal(f.right)
        fn = lambda W, D, i, E: (not l(W, D, i, E)) or r(W, D, i, E)  # noqa: E731
    elif isinstance(f, Iff):
        l, r = _compile_temporal(f.left), _compile_temporal(f.right)
        fn = lambda W, D, i, E: l(W, D, i, E) == r(W, D, i, E)  # noqa: E731
    elif isinstance(f, QUANTIFIERS):
        name, sort = f.var.name, f.var.sort
        body = _compile_temporal(f.body)
        want = isinstance(f, Exists)

        def fn(W, D, i, E):
            old = E.get(name)
            had = name in E
            try:
                for e in D[sort]:
                    E[name] = e
                    if body(W, D, i, E) is want:
                        return want
                return not want
            finally:
                if had:
                    E[name] = old
                else:
                    E.pop(name, None)

    elif isinstance(f, Next):
        sub = _compile_temporal(f.arg)
        fn = lambda W, D, i, E: i < len(W) - 1 and sub(W, D, i + 1, E)  # noqa: E731
    elif isinstance(f, WeakNext):
        sub = _compile_temporal(f.arg)
        fn = lambda W, D, i, E: i == len(W) - 1 or sub(W, D, i + 1, E)  # noqa: E731
    elif isinstance(f, Yesterday):
        sub = _compile_temporal(f.arg)
        fn = lambda W, D, i, E: i > 0 and sub(W, D, i - 1, E)  # noqa: E731
    elif isinstance(f, WeakYesterday):
        sub = _compile_temporal(f.arg)
        fn = lambda W, D, i, E: i == 0 or sub(W, D, i - 1, E)  # noqa: E731
    elif isinstance(f, Until):
        l, r = _compile_temporal(f.left), _compile_temporal(f.right)

        def fn(W, D, i, E):
            for k in range(i, len(W)):
                if r(W, D, k, E):
                    return True
                if not l(W, D, k, E):
                    return False
            return False

    elif isinstance(f, Release):
        l, r = _compile_temporal(f.left), _compile_temporal(f.right)

        def fn(W, D, i, E):
            # dual of (!l U !r)
            for k in range(i, len(W)):
                if not r(W, D, k, E):
                    return False
                if l(W, D, k, E):
                    return True
            return True

    elif isinstance(f, Since):
        l, r = _compile_temporal(f.left), _compile_temporal(f.right)

        def fn(W, D, i, E):
            for k in range(i, -1, -1):
                if r(W, D, k, E):
                    return True
                if not l(W, D, k, E):
                    return False
            return False

    elif isinstance(f, Triggered):
        l, r = _compile_temporal(f.left), _compile_temporal(f.right)

        def fn(W, D, i, E):
            for k in range(i, -1, -1):
                if not r(W, D, k, E):
                    return False
                if l(W, D, k, E):
                    return True
            return True

    elif isinstance(f, SO_QUANTIFIERS):
        raise EvaluationError("second-order quantifiers under temporal operators are not supported")
    else:
        raise TypeError(f"not a formula: {f!r}")
    if len(_TCACHE) > 50000:
        _TCACHE.clear()
    _TCACHE[f] = fn
    return fn


def satisfies(word: Word, phi: Formula, i: int = 0, env: Mapping[str, str] | None = None) -> bool:
    """Truth of ``phi`` at position ``i`` of a non-empty word."""
    if len(word) == 0:
        raise EvaluationError("satisfaction is defined on non-empty words only")
    if not 0 <= i < len(word):
        raise IndexError(f"position {i} out of range for a word of length {len(word)}")
    env = dict(env or {})
    for v in free_vars(phi):
        if v.name not in env:
            raise EvaluationError(f"free variable {v.name} is not assigned")
    W = [l.interp() for l in word.letters]
    return bool(_compile_temporal(phi)(W, word.domains, i, env))


def satisfies_pure_past(word: Word, phi: Formula) -> bool:
    """Pure-past sentences are evaluated at the last position."""
    if not is_pure_past(phi):
        raise ValueError("formula uses a future operator")
    return satisfies(word, phi, len(word) - 1)


def is_pure_past(phi: Formula) -> bool:
    return not any(isinstance(g, FUTURE) for g in subformulas(phi))


def is_monodic(phi: Formula) -> bool:
    return all(len(free_vars(g)) <= 1 for g in subformulas(phi) if isinstance(g, TEMPORAL))


# -- negated normal form -----------------------------------------------------

_DUAL = {
    Next: WeakNext,
    WeakNext: Next,
    Yesterday: WeakYesterday,
    WeakYesterday: Yesterday,
    Until: Release,
    Release: Until,
    Since: Triggered,
    Triggered: Since,
    Exists: Forall,
    Forall: Exists,
    SOExists: SOForall,
    SOForall: SOExists,
}


def nnf(phi: Formula) -> Formula:
    """Push negations down to atoms and equalities; removes -> and <->."""
    return _nnf(phi, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Top):
        return BOTTOM if neg else TOP
    if isinstance(f, Bottom):
        return TOP if neg else BOTTOM
    if isinstance(f, (Atom, Eq)):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, (And, Or)):
        node = f.__class__ if not neg else (Or if isinstance(f, And) else And)
        return node(tuple(_nnf(a, neg) for a in f.args))
    if isinstance(f, Implies):
        return _nnf(Or((Not(f.left), f.right)), neg)
    if isinstance(f, Iff):
        if neg:
            return Or((And((_nnf(f.left, False), _nnf(f.right, True))), And((_nnf(f.left, True), _nnf(f.right, False)))))
        return And((Or((_nnf(f.left, True), _nnf(f.right, False))), Or((_nnf(f.left, False), _nnf(f.right, True)))))
    node = _DUAL[type(f)] if neg else type(f)
    if isinstance(f, UNARY_TEMPORAL):
        return node(_nnf(f.arg, neg))
    if isinstance(f, (Until, Release, Since, Triggered)):
        return node(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, QUANTIFIERS):
        return node(f.var, _nnf(f.body, neg))
    if isinstance(f, SO_QUANTIFIERS):
        return node(f.symbols, _nnf(f.body, neg))
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(phi: Formula) -> bool:
    for g in subformulas(phi):
        if isinstance(g, (Implies, Iff)):
            return False
        if isinstance(g, Not) and not isinstance(g.arg, (Atom, Eq)):
            return False
    return True


# -- stepped normal form -----------------------------------------------------


def snf(phi: Formula) -> Formula:
    """Stepped normal form of an NNF formula."""
    f = phi
    if isinstance(f, (Top, Bottom, Atom, Eq, Not)):
        return f
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, snf(f.body))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(snf(a) for a in f.args))
    if isinstance(f, UNARY_TEMPORAL):
        return f
    if isinstance(f, Until):
        return Or((snf(f.right), And((snf(f.left), Next(f)))))
    if isinstance(f, Release):
        return And((snf(f.right), Or((snf(f.left), WeakNext(f)))))
    if isinstance(f, Since):
        return Or((snf(f.right), And((snf(f.left), Yesterday(f)))))
    if isinstance(f, Triggered):
        return And((snf(f.right), Or((snf(f.left), WeakYesterday(f)))))
    raise ValueError(f"snf expects an NNF formula, got {f}")


# -- closure -----------------------------------------------------------------

FUTURE_ROOTED = "future"
PAST_ROOTED = "past"

_STEP_GUARD = {Until: Next, Release: WeakNext, Since: Yesterday, Triggered: WeakYesterday}


@dataclass
class ClosureSet:
    members: tuple[Formula, ...]
    index: dict = field(repr=False)

    def __contains__(self, f: Formula) -> bool:
        return alpha_key(f) in self.index

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def id_of(self, f: Formula) -> int:
        return self.index[alpha_key(f)]


def closure(phi: Formula, mode: str = FUTURE_ROOTED) -> ClosureSet:
    """Least set containing the root guard, all subformulas, and the step
    guards of every U/R/S/T member.  Members are kept in discovery order."""
    if mode not in (FUTURE_ROOTED, PAST_ROOTED):
        raise ValueError(f"unknown closure mode {mode!r}")
    root = Next(phi) if mode == FUTURE_ROOTED else Yesterday(phi)
    members: list[Formula] = []
    index: dict[str, int] = {}
    todo = [root]
    while todo:
        f = todo.pop(0)
        key = alpha_key(f)
        if key in index:
            continue
        index[key] = len(members)
        members.append(f)
        if type(f) in _STEP_GUARD:
            todo.append(_STEP_GUARD[type(f)](f))
        todo.extend(children(f))
    return ClosureSet(tuple(members), index)


# -- surrogates --------------------------------------------------------------

KINDS = {Next: "xs", WeakNext: "ws", Yesterday: "ys", WeakYesterday: "zs"}
FUTURE_KINDS = frozenset({"xs", "ws"})
PAST_KINDS = frozenset({"ys", "zs"})


def surrogate_name(kind: str, psi: Formula) -> str:
    digest = hashlib.sha1(alpha_key(psi).encode()).hexdigest()[:10]
    return f"{kind}${digest}"


@dataclass
class Surrogate:
    kind: str
    formula: Formula
    decl: SymbolDecl
    args: tuple

    @property
    def name(self) -> str:
        return self.decl.name


@dataclass
class SurrogateTable:
    """One fresh predicate per guarded closure member, split by kind."""

    entries: dict = field(default_factory=dict)  # (kind, alpha key) -> Surrogate

    def of_kind(self, kind: str) -> list[Surrogate]:
        return [s for (k, _), s in self.entries.items() if k == kind]

    @property
    def XS(self):
        return self.of_kind("xs")

    @property
    def wXS(self):
        return self.of_kind("ws")

    @property
    def YS(self):
        return self.of_kind("ys")

    @property
    def ZS(self):
        return self.of_kind("zs")

    def lookup(self, kind: str, psi: Formula) -> Surrogate:
        try:
            return self.entries[(kind, alpha_key(psi))]
        except KeyError:
            raise KeyError(f"no {kind} surrogate for {psi}") from None

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def decls(self) -> tuple[SymbolDecl, ...]:
        return tuple(s.decl for s in self.entries.values())


def surrogate_table(cl: ClosureSet) -> SurrogateTable:
    table = SurrogateTable()
    for f in cl:
        kind = KINDS.get(type(f))
        if kind is None:
            continue
        psi = f.arg
        key = (kind, alpha_key(psi))
        if key in table.entries:
            continue
        args = free_vars(psi)
        decl = SymbolDecl(surrogate_name(kind, psi), "predicate", tuple(v.sort for v in args))
        table.entries[key] = Surrogate(kind, psi, decl, args)
    return table


def snf_surrogate(
    psi: Formula,
    table: SurrogateTable,
    primed: bool | Collection[str] = False,
) -> Formula:
    """snf(psi) with every X/wX/Y/Z guard replaced by its surrogate atom.

    ``primed`` selects which guards use the primed surrogate: ``True`` for
    all of them, ``False`` for none, or a collection of kinds such as
    ``{"xs", "ws"}``.
    """
    if primed is True:
        kinds = set(KINDS.values())
    elif primed is False:
        kinds = set()
    else:
        kinds = set(primed)

    def walk(f: Formula) -> Formula:
        if isinstance(f, UNARY_TEMPORAL):
            kind = KINDS[type(f)]
            s = table.lookup(kind, f.arg)
            name = prime_name(s.name) if kind in kinds else s.name
            return Atom(name, s.args)
        kids = children(f)
        if not kids:
            return f
        return rebuild(f, tuple(walk(k) for k in kids))

    return walk(snf(psi))
