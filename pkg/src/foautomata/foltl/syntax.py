"""Abstract syntax of first-order temporal formulas.

Nodes are frozen dataclasses, so structurally equal trees compare equal
and can be used as dict keys.  Bound-variable names do matter for ``==``;
use :func:`alpha_key` when alpha-equivalence is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

from ..core.signature import INFIX_FUNCTIONS, INFIX_PREDICATES, SymbolDecl


class RenameCollision(ValueError):
    pass


# -- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    name: str
    args: tuple

    def __str__(self):
        return print_term(self)


Term = Var | Const | App


# -- formulas --------------------------------------------------------------


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    pred: str
    args: tuple = ()


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    args: tuple


@dataclass(frozen=True, repr=False)
class Or(Formula):
    args: tuple


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True, repr=False)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class WeakNext(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class Yesterday(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class WeakYesterday(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Since(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Triggered(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class SOExists(Formula):
    """Existential second-order quantification over a block of symbols."""

    symbols: tuple  # of SymbolDecl
    body: Formula


@dataclass(frozen=True, repr=False)
class SOForall(Formula):
    symbols: tuple
    body: Formula


TOP = Top()
BOTTOM = Bottom()

UNARY_TEMPORAL = (Next, WeakNext, Yesterday, WeakYesterday)
BINARY_TEMPORAL = (Until, Release, Since, Triggered)
TEMPORAL = UNARY_TEMPORAL + BINARY_TEMPORAL
FUTURE = (Next, WeakNext, Until, Release)
PAST = (Yesterday, WeakYesterday, Since, Triggered)
QUANTIFIERS = (Exists, Forall)
SO_QUANTIFIERS = (SOExists, SOForall)

Formula.__repr__ = lambda self: f"<{type(self).__name__} {to_text(self)}>"


def prop(name: str) -> Atom:
    return Atom(name, ())


def conj(*fs: Formula) -> Formula:
    """Conjunction of the arguments; nested conjunctions are flattened."""
    items: list[Formula] = []
    for f in fs:
        if isinstance(f, And):
            items.extend(f.args)
        else:
            items.append(f)
    if not items:
        return TOP
    if len(items) == 1:
        return items[0]
    return And(tuple(items))


def disj(*fs: Formula) -> Formula:
    items: list[Formula] = []
    for f in fs:
        if isinstance(f, Or):
            items.extend(f.args)
        else:
            items.append(f)
    if not items:
        return BOTTOM
    if len(items) == 1:
        return items[0]
    return Or(tuple(items))


def forall_vars(vars_: tuple, body: Formula) -> Formula:
    for v in reversed(vars_):
        body = Forall(v, body)
    return body


# -- traversal -------------------------------------------------------------


def children(f: Formula) -> tuple:
    if isinstance(f, (Top, Bottom, Atom, Eq)):
        return ()
    if isinstance(f, (Not,) + UNARY_TEMPORAL):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff) + BINARY_TEMPORAL):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS + SO_QUANTIFIERS):
        return (f.body,)
    raise TypeError(f"not a formula: {f!r}")


def rebuild(f: Formula, kids: tuple) -> Formula:
    if isinstance(f, (Not,) + UNARY_TEMPORAL):
        return type(f)(kids[0])
    if isinstance(f, (And, Or)):
        return type(f)(tuple(kids))
    if isinstance(f, (Implies, Iff) + BINARY_TEMPORAL):
        return type(f)(kids[0], kids[1])
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, kids[0])
    if isinstance(f, SO_QUANTIFIERS):
        return type(f)(f.symbols, kids[0])
    return f


def subformulas(f: Formula) -> Iterator[Formula]:
    """Preorder walk, root first."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def is_temporal(f: Formula) -> bool:
    return any(isinstance(g, TEMPORAL) for g in subformulas(f))


def has_second_order(f: Formula) -> bool:
    return any(isinstance(g, SO_QUANTIFIERS) for g in subformulas(f))


def term_vars(t: Term, out: list):
    if isinstance(t, Var):
        if t not in out:
            out.append(t)
    elif isinstance(t, App):
        for a in t.args:
            term_vars(a, out)


def free_vars(f: Formula) -> tuple[Var, ...]:
    """Free variables in order of first occurrence (left-to-right preorder)."""
    out: list[Var] = []

    def walk(g: Formula, bound: frozenset):
        if isinstance(g, Atom):
            for a in g.args:
                _collect(a, bound)
        elif isinstance(g, Eq):
            _collect(g.left, bound)
            _collect(g.right, bound)
        elif isinstance(g, QUANTIFIERS):
            walk(g.body, bound | {g.var.name})
        else:
            for k in children(g):
                walk(k, bound)

    def _collect(t, bound):
        found: list[Var] = []
        term_vars(t, found)
        for v in found:
            if v.name not in bound and v not in out:
                out.append(v)

    walk(f, frozenset())
    return tuple(out)


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def term_symbols(t: Term, out: set):
    if isinstance(t, Const):
        out.add(t.name)
    elif isinstance(t, App):
        out.add(t.name)
        for a in t.args:
            term_symbols(a, out)


def symbols_of(f: Formula) -> set[str]:
    """Names of all non-logical symbols occurring free (not SO-bound)."""
    out: set[str] = set()

    def walk(g: Formula, bound: frozenset):
        if isinstance(g, Atom):
            if g.pred not in bound:
                out.add(g.pred)
            for a in g.args:
                _terms(a, bound)
        elif isinstance(g, Eq):
            _terms(g.left, bound)
            _terms(g.right, bound)
        elif isinstance(g, SO_QUANTIFIERS):
            walk(g.body, bound | {s.name for s in g.symbols})
        else:
            for k in children(g):
                walk(k, bound)

    def _terms(t, bound):
        found: set[str] = set()
        term_symbols(t, found)
        out.update(found - bound)

    walk(f, frozenset())
    return out


def map_atoms(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild ``f`` with every Atom/Eq leaf replaced by ``fn(leaf)``."""
    if isinstance(f, (Atom, Eq)):
        return fn(f)
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(map_atoms(k, fn) for k in kids))


def _rename_term(t: Term, mapping: Mapping[str, str]) -> Term:
    if isinstance(t, Const):
        return Const(mapping.get(t.name, t.name))
    if isinstance(t, App):
        return App(mapping.get(t.name, t.name), tuple(_rename_term(a, mapping) for a in t.args))
    return t


def rename_symbols(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Plain symbol substitution without collision checks."""
    if not mapping:
        return f

    def leaf(g):
        if isinstance(g, Atom):
            return Atom(mapping.get(g.pred, g.pred), tuple(_rename_term(a, mapping) for a in g.args))
        return Eq(_rename_term(g.left, mapping), _rename_term(g.right, mapping))

    def walk(g):
        if isinstance(g, (Atom, Eq)):
            return leaf(g)
        if isinstance(g, SO_QUANTIFIERS):
            bound = {s.name for s in g.symbols}
            inner = {k: v for k, v in mapping.items() if k not in bound}
            return type(g)(g.symbols, rename_symbols(g.body, inner))
        kids = children(g)
        if not kids:
            return g
        return rebuild(g, tuple(walk(k) for k in kids))

    return walk(f)


def rename_formula(phi: Formula, mapping: Mapping[str, str]) -> Formula:
    """Replace symbol occurrences per ``mapping``.

    Raises RenameCollision when the mapping is not injective on the symbols
    of ``phi`` or when a target name already occurs in ``phi`` unrenamed.
    """
    present = symbols_of(phi)
    used = {k: v for k, v in mapping.items() if k in present and k != v}
    targets = list(used.values())
    if len(set(targets)) != len(targets):
        raise RenameCollision("mapping is not injective on the formula's symbols")
    for t in targets:
        if t in present and t not in used:
            raise RenameCollision(f"target symbol {t} already occurs in the formula")
    return rename_symbols(phi, used)


def substitute_vars(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Replace free variables by terms (no capture avoidance needed for
    the callers in this package: replacement terms are closed)."""

    def term(t):
        if isinstance(t, Var):
            return mapping.get(t.name, t)
        if isinstance(t, App):
            return App(t.name, tuple(term(a) for a in t.args))
        return t

    def walk(g, m):
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(term(a) for a in g.args)) if m else g
        if isinstance(g, Eq):
            return Eq(term(g.left), term(g.right)) if m else g
        if isinstance(g, QUANTIFIERS) and g.var.name in m:
            return g
        kids = children(g)
        if not kids:
            return g
        return rebuild(g, tuple(walk(k, m) for k in kids))

    return walk(f, mapping)


# -- alpha-equivalence -----------------------------------------------------


def alpha_key(f: Formula) -> str:
    """Canonical text of ``f`` with bound variables renamed by binding depth.

    Two formulas are alpha-equivalent iff their keys are equal.
    """
    return to_text(_canon(f, {}, 0))


def _canon(f: Formula, env: dict, depth: int) -> Formula:
    def term(t):
        if isinstance(t, Var):
            return env.get(t.name, t)
        if isinstance(t, App):
            return App(t.name, tuple(term(a) for a in t.args))
        return t

    if isinstance(f, Atom):
        return Atom(f.pred, tuple(term(a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(term(f.left), term(f.right))
    if isinstance(f, QUANTIFIERS):
        v = Var(f"${depth}", f.var.sort)
        inner = dict(env)
        inner[f.var.name] = v
        return type(f)(v, _canon(f.body, inner, depth + 1))
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(_canon(k, env, depth) for k in kids))


# -- printing --------------------------------------------------------------

_BINARY_OPS = {
    Until: "U",
    Release: "R",
    Since: "S",
    Triggered: "T",
    Implies: "->",
    Iff: "<->",
}
_UNARY_OPS = {Not: "!", Next: "X ", WeakNext: "wX ", Yesterday: "Y ", WeakYesterday: "Z "}


def print_term(t: Term, nested: bool = False) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if t.name in INFIX_FUNCTIONS and len(t.args) == 2:
        s = f"{print_term(t.args[0], True)} {t.name} {print_term(t.args[1], True)}"
        return f"({s})" if nested else s
    return f"{t.name}({', '.join(print_term(a) for a in t.args)})"


def _decl_text(s: SymbolDecl) -> str:
    if s.kind == "constant":
        return f"{s.name}:{s.result}"
    if s.kind == "function":
        return f"{s.name}({', '.join(s.args)}):{s.result}"
    return f"{s.name}({', '.join(s.args)})"


def _is_tight(f: Formula) -> bool:
    if isinstance(f, Atom):
        return not (f.pred in INFIX_PREDICATES and len(f.args) == 2)
    return isinstance(f, (Top, Bottom, Not) + UNARY_TEMPORAL)


def _wrap(f: Formula) -> str:
    s = to_text(f)
    return s if _is_tight(f) else f"({s})"


def to_text(f: Formula) -> str:
    """Canonical concrete syntax; the parser reads it back to an equal tree."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        if f.pred in INFIX_PREDICATES and len(f.args) == 2:
            return f"{print_term(f.args[0], True)} {f.pred} {print_term(f.args[1], True)}"
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(print_term(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{print_term(f.left, True)} = {print_term(f.right, True)}"
    if type(f) in _UNARY_OPS:
        return _UNARY_OPS[type(f)] + _wrap(f.arg)
    if isinstance(f, And):
        return " & ".join(_wrap(a) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a) for a in f.args)
    if type(f) in _BINARY_OPS:
        return f"{_wrap(f.left)} {_BINARY_OPS[type(f)]} {_wrap(f.right)}"
    if isinstance(f, Exists):
        return f"exists {f.var.name}:{f.var.sort}. {to_text(f.body)}"
    if isinstance(f, Forall):
        return f"forall {f.var.name}:{f.var.sort}. {to_text(f.body)}"
    if isinstance(f, SOExists):
        return f"exists2 [{', '.join(_decl_text(s) for s in f.symbols)}]. {to_text(f.body)}"
    if isinstance(f, SOForall):
        return f"forall2 [{', '.join(_decl_text(s) for s in f.symbols)}]. {to_text(f.body)}"
    raise TypeError(f"not a formula: {f!r}")
