"""Monadic automata to finite-control automata via types and abstract states."""

from __future__ import annotations

import itertools
from typing import Iterator, Mapping

from ..automaton.model import MONADIC, Automaton, AutomatonError, classify
from ..core.evaluate import eval_fo
from ..core.signature import Signature, SymbolDecl, prime_name
from ..core.structure import Structure
from ..foltl.semantics import nnf
from ..foltl.syntax import (
    BOTTOM,
    SO_QUANTIFIERS,
    TOP,
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Top,
    Var,
    conj,
    disj,
    prop,
    subformulas,
    symbols_of,
)

Type = frozenset  # names of the unary state predicates an element satisfies
AbstractState = frozenset  # set of types


class PreconditionError(AutomatonError):
    pass


def unary_predicates(gamma: Signature) -> list[SymbolDecl]:
    """The monadic part of a state signature; propositions are skipped."""
    out = []
    for s in gamma:
        if s.kind == "predicate" and s.arity == 1:
            out.append(s)
        elif not s.is_proposition:
            raise PreconditionError(f"state symbol {s.name} is not a unary predicate")
    return out


def _names(preds) -> list[str]:
    return [p.name if isinstance(p, SymbolDecl) else p for p in preds]


def types_of(gamma: Signature) -> list[Type]:
    """All 2^n types, ordered by their bit vectors over the declaration order."""
    names = _names(unary_predicates(gamma))
    return [
        Type(n for n, b in zip(names, bits) if b)
        for bits in itertools.product((0, 1), repeat=len(names))
    ]


def abstract_states(gamma: Signature) -> Iterator[AbstractState]:
    """All 2^(2^n) sets of types, lazily, in canonical order."""
    types = types_of(gamma)
    for bits in itertools.product((0, 1), repeat=len(types)):
        yield AbstractState(t for t, b in zip(types, bits) if b)


def type_bits(t: Type, gamma: Signature) -> str:
    return "".join("1" if n in t else "0" for n in _names(unary_predicates(gamma)))


def type_name(t: Type, gamma: Signature) -> str:
    return f"b${type_bits(t, gamma)}"


def _ordered(s: AbstractState, gamma: Signature) -> list[Type]:
    return [t for t in types_of(gamma) if t in s]


def gamma_type(t: Type, gamma: Signature, x: Var | None = None) -> Formula:
    """Conjunction of p(x) for p in t and not p(x) for the other predicates."""
    preds = unary_predicates(gamma)
    if x is None:
        x = Var("x", preds[0].args[0]) if preds else Var("x", gamma.sorts[0])
    return conj(*[Atom(p.name, (x,)) if p.name in t else Not(Atom(p.name, (x,))) for p in preds])


def gamma_state(s: AbstractState, gamma: Signature, sort: str | None = None) -> Formula:
    preds = unary_predicates(gamma)
    if sort is None:
        sort = preds[0].args[0] if preds else gamma.sorts[0]
    x = Var("x", sort)
    parts = []
    for t in types_of(gamma):
        ex = Exists(x, gamma_type(t, gamma, x))
        parts.append(ex if t in s else Not(ex))
    return conj(*parts)


def restrict_formula(
    psi: Formula,
    s1: AbstractState,
    s2: AbstractState,
    h: Mapping[str, tuple[Type, Type]],
    gamma: Signature,
) -> Formula:
    """Replace state atoms by truth values read off the assumption ``h``;
    quantifiers range over the type pairs of ``s1`` and ``s2``."""
    unary = {p.name for p in unary_predicates(gamma)}
    primed = {prime_name(n): n for n in unary}
    o1, o2 = _ordered(s1, gamma), _ordered(s2, gamma)

    def state_atom(f: Atom, h) -> Formula:
        arg = f.args[0]
        if not isinstance(arg, Var):
            raise PreconditionError(f"state predicate applied to a non-variable term in {f}")
        if arg.name not in h:
            raise PreconditionError(f"variable {arg.name} has no assumption")
        t1, t2 = h[arg.name]
        if f.pred in unary:
            return TOP if f.pred in t1 else BOTTOM
        return TOP if primed[f.pred] in t2 else BOTTOM

    def walk(f: Formula, h) -> Formula:
        if isinstance(f, (Top, Bottom)):
            return f
        if isinstance(f, Eq):
            raise PreconditionError("equality is not allowed")
        if isinstance(f, Atom):
            if f.pred in unary or f.pred in primed:
                return state_atom(f, h)
            return f
        if isinstance(f, Not):
            if not isinstance(f.arg, (Atom, Eq)):
                raise PreconditionError("formula is not in negated normal form")
            inner = walk(f.arg, h)
            if isinstance(inner, Top):
                return BOTTOM
            if isinstance(inner, Bottom):
                return TOP
            return Not(inner)
        if isinstance(f, (And, Or)):
            return type(f)(tuple(walk(a, h) for a in f.args))
        if isinstance(f, (Exists, Forall)):
            options = []
            for t1 in o1:
                for t2 in o2:
                    inner = dict(h)
                    inner[f.var.name] = (t1, t2)
                    options.append(walk(f.body, inner))
            return type(f)(f.var, disj(*options))
        raise PreconditionError(f"unsupported connective in {f}")

    return walk(psi, dict(h))


def witness_structure(s: AbstractState, gamma: Signature, valuation: Mapping[str, bool] | None = None, sort: str | None = None) -> Structure:
    """One element per type of ``s``; propositions per ``valuation``."""
    if not s:
        raise PreconditionError("the empty abstract state has no model over a nonempty domain")
    preds = unary_predicates(gamma)
    if sort is None:
        sort = preds[0].args[0] if preds else gamma.sorts[0]
    types = _ordered(s, gamma)
    elems = [f"{sort}_{i}" for i in range(len(types))]
    tables = {p.name: [(e,) for e, t in zip(elems, types) if p.name in t] for p in preds}
    valuation = valuation or {}
    for sym in gamma:
        if sym.is_proposition:
            tables[sym.name] = [()] if valuation.get(sym.name, False) else []
    domains = {srt: tuple(elems) for srt in gamma.sorts}
    return Structure(gamma, domains, {}, {}, tables)


def entails_initial(s: AbstractState, phi: Formula, gamma: Signature, valuation: Mapping[str, bool] | None = None) -> bool:
    """Whether every model of the abstract state satisfies ``phi``, decided
    on the canonical witness (equality-free monadic sentences cannot tell
    elementarily equivalent models apart)."""
    if any(isinstance(g, Eq) for g in subformulas(phi)):
        raise PreconditionError("equality is not allowed")
    return eval_fo(witness_structure(s, gamma, valuation), phi)


def _b_state(s: AbstractState, gamma: Signature, primed: bool = False) -> Formula:
    def name(t):
        n = type_name(t, gamma)
        return prime_name(n) if primed else n

    return conj(*[prop(name(t)) if t in s else Not(prop(name(t))) for t in types_of(gamma)])


def _check_preconditions(a: Automaton):
    cls = classify(a)
    if cls != MONADIC:
        raise PreconditionError(f"automaton is {cls}, not monadic")
    for s in a.sigma:
        if s.kind != "predicate":
            raise PreconditionError(f"word symbol {s.name} is a {s.kind}; the word signature must be relational")
    sorts = {srt for sig in (a.sigma, a.gamma) for s in sig for srt in s.args}
    if len(sorts) > 1:
        raise PreconditionError(f"word and state symbols use several sorts: {sorted(sorts)}")
    sigma_names = set(a.sigma.names)
    for label, f in (("initial condition", a.init), ("transition relation", a.trans), ("acceptance condition", a.final)):
        if any(isinstance(g, SO_QUANTIFIERS) for g in subformulas(f)):
            raise PreconditionError(f"{label} uses second-order quantifiers")
        if any(isinstance(g, Eq) for g in subformulas(f)):
            raise PreconditionError(f"{label} uses equality")
        if label != "transition relation" and symbols_of(f) & sigma_names:
            raise PreconditionError(f"{label} mentions word symbols")


def monadic_to_finite_control(a: Automaton) -> Automaton:
    """Finite-control automaton whose states record which types are realized.

    State propositions of ``a`` are carried over unchanged.
    """
    _check_preconditions(a)
    gamma = a.gamma
    props = [s for s in gamma if s.is_proposition]
    types = types_of(gamma)
    states = [s for s in abstract_states(gamma) if s]
    decls = [SymbolDecl(type_name(t, gamma), "predicate") for t in types]
    sorts = tuple(dict.fromkeys(a.sigma.sorts + gamma.sorts))
    gamma_star = Signature(sorts, tuple(decls) + tuple(props))
    init, trans, final = nnf(a.init), nnf(a.trans), nnf(a.final)

    def condition(phi: Formula) -> Formula:
        options = []
        for s in states:
            for bits in itertools.product((False, True), repeat=len(props)):
                val = {p.name: b for p, b in zip(props, bits)}
                if entails_initial(s, phi, gamma, val):
                    lits = [prop(p.name) if b else Not(prop(p.name)) for p, b in zip(props, bits)]
                    options.append(conj(_b_state(s, gamma), *lits))
        return disj(*options)

    # The empty abstract state stays in the guard enumeration: dropping it
    # would leave the all-false valuation of Gamma* unconstrained.
    guards = []
    all_states = list(abstract_states(gamma))
    for s1 in all_states:
        for s2 in all_states:
            guards.append(
                Implies(conj(_b_state(s1, gamma), _b_state(s2, gamma, True)), restrict_formula(trans, s1, s2, {}, gamma))
            )
    return Automaton(a.sigma, gamma_star, condition(init), conj(*guards), condition(final))
