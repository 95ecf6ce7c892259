"""Symbolic finite automata: loading, direct simulation, and encoding as
finite-control first-order automata."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..automaton.model import Automaton
from ..core.signature import Signature, SymbolDecl, prime_name
from ..foltl.parser import ParseError, SortError, parse_formula
from ..foltl.syntax import Atom, Const, Formula, Iff, Not, conj, disj, forall_vars, free_vars, prop
from .presets import eval_int_formula, resolve_signature

CHAR = "c"
STATE_PREFIX = "q$"
GUARD_PREFIX = "p$"


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class SFA:
    sig: Signature  # guard vocabulary
    sort: str
    var: str
    guards: Mapping[str, Formula]
    states: tuple[str, ...]
    initial: str
    final: frozenset
    transitions: tuple[tuple[str, str, str], ...]  # (source, guard name, target)

    def __post_init__(self):
        if not self.states:
            raise SchemaError("states: at least one state is required")
        if len(set(self.states)) != len(self.states):
            raise SchemaError("states: duplicate state names")
        if self.initial not in self.states:
            raise SchemaError(f"initial: {self.initial} is not a declared state")
        for q in self.final:
            if q not in self.states:
                raise SchemaError(f"final: {q} is not a declared state")
        for i, (q, g, r) in enumerate(self.transitions):
            for field_, v in (("from", q), ("to", r)):
                if v not in self.states:
                    raise SchemaError(f"transitions[{i}].{field_}: {v} is not a declared state")
            if g not in self.guards:
                raise SchemaError(f"transitions[{i}].guard: {g} is not a declared guard")
        for name, g in self.guards.items():
            extra = [v.name for v in free_vars(g) if v.name != self.var]
            if extra:
                raise SchemaError(f"guards.{name}: free variables other than {self.var}: {extra}")

    def used_guards(self) -> list[str]:
        return list(dict.fromkeys(g for _, g, _ in self.transitions))


def sfa_from_json(obj: Mapping) -> SFA:
    """Build an s-FA from its JSON object (schema in docs/formats.md)."""
    if not isinstance(obj, Mapping):
        raise SchemaError("s-FA file must hold a JSON object")
    for key in ("sort", "guards", "states", "initial", "transitions"):
        if key not in obj:
            raise SchemaError(f"{key}: missing field")
    sort = obj["sort"]
    var = obj.get("var", "x")
    sig = resolve_signature(obj.get("signature", "int" if sort == "Int" else {"sorts": [sort], "symbols": []}))
    if sort not in sig.sorts:
        raise SchemaError(f"sort: {sort} is not a sort of the guard signature")
    if not isinstance(obj["guards"], Mapping):
        raise SchemaError("guards: must map guard names to formulas")
    guards = {}
    for name, text in obj["guards"].items():
        try:
            guards[name] = parse_formula(text, sig, free={var: sort})
        except (ParseError, SortError) as e:
            raise SchemaError(f"guards.{name}: {e}") from e
    trans = []
    for i, t in enumerate(obj["transitions"]):
        try:
            trans.append((t["from"], t["guard"], t["to"]))
        except (KeyError, TypeError):
            raise SchemaError(f"transitions[{i}]: needs from, guard and to") from None
    return SFA(sig, sort, var, guards, tuple(obj["states"]), obj["initial"], frozenset(obj.get("final", [])), tuple(trans))


def load_sfa(path: str) -> SFA:
    with open(path) as fh:
        return sfa_from_json(json.load(fh))


# -- direct simulation ---------------------------------------------------------


def simulate(m: SFA, chars: Sequence, guard_sets: Mapping[str, Iterable] | None = None) -> bool:
    """Run the s-FA on a character sequence by the usual subset simulation.

    With ``guard_sets`` each guard is read as the given set of characters;
    otherwise guards are evaluated on integer characters directly.
    """
    sets = None if guard_sets is None else {g: set(v) for g, v in guard_sets.items()}

    def sat(g, ch):
        if sets is not None:
            return ch in sets[g]
        return eval_int_formula(m.guards[g], {m.var: ch})

    current = {m.initial}
    for ch in chars:
        current = {r for (q, g, r) in m.transitions if q in current and sat(g, ch)}
        if not current:
            return False
    return bool(current & m.final)


def guard_sets_concrete(m: SFA, values: Iterable[int]) -> dict[str, set]:
    values = list(values)
    return {g: {v for v in values if eval_int_formula(m.guards[g], {m.var: v})} for g in m.guards}


# -- encoding --------------------------------------------------------------------


def state_bits(m: SFA) -> int:
    """Number of state propositions: ceil(log2 |Q|) + 1."""
    return math.ceil(math.log2(len(m.states))) + 1


def state_props(m: SFA) -> list[str]:
    return [f"{STATE_PREFIX}{i}" for i in range(state_bits(m))]


def guard_pred(name: str) -> str:
    return GUARD_PREFIX + name


def state_formula(m: SFA, q: str, primed: bool = False) -> Formula:
    """Binary code of the state's position in the declaration order."""
    idx = m.states.index(q)
    lits = []
    for i, p in enumerate(state_props(m)):
        a = prop(prime_name(p) if primed else p)
        lits.append(a if (idx >> i) & 1 else Not(a))
    return conj(*lits)


def encode_sfa(m: SFA, with_guard_theory: bool = False) -> Automaton:
    """Finite-control automaton over letters (c, p_psi tables).

    Letter i carries the character as the constant ``c`` and, per guard
    used in a transition, the rigid unary predicate ``p$guard`` holding of
    the characters that satisfy it.  With ``with_guard_theory`` the guard
    vocabulary's rigid symbols are added to the word signature so that
    ``guard_axioms`` can pin the predicates down.
    """
    used = m.used_guards()
    syms = [SymbolDecl(CHAR, "constant", (), m.sort, False)]
    syms += [SymbolDecl(guard_pred(g), "predicate", (m.sort,), None, True) for g in used]
    if with_guard_theory:
        syms += [s for s in m.sig if s.rigid]
    sigma = Signature(m.sig.sorts if with_guard_theory else (m.sort,), tuple(syms),
                      m.sig.numerals if with_guard_theory else None)
    gamma = Signature(sigma.sorts, tuple(SymbolDecl(p, "predicate") for p in state_props(m)))
    c = Const(CHAR)
    options = [
        conj(state_formula(m, q), Atom(guard_pred(g), (c,)), state_formula(m, r, True))
        for (q, g, r) in m.transitions
    ]
    init = state_formula(m, m.initial)
    final = disj(*[state_formula(m, q) for q in m.states if q in m.final])
    return Automaton(sigma, gamma, init, disj(*options), final)


def guard_axioms(m: SFA) -> list[Formula]:
    """forall x. p$g(x) <-> g(x), one per used guard."""
    from ..foltl.syntax import Var

    x = Var(m.var, m.sort)
    return [forall_vars((x,), Iff(Atom(guard_pred(g), (x,)), m.guards[g])) for g in m.used_guards()]


def structure_word(m: SFA, a: Automaton, chars: Sequence[str], guard_sets: Mapping[str, Iterable], domain: Sequence[str]):
    """The letter sequence matching a character word: c is the character,
    each p$g is the guard's set (the same at every position)."""
    from ..core.structure import Structure, Word

    domains = {s: tuple(domain) for s in a.sigma.sorts}
    tables = {guard_pred(g): [(e,) for e in guard_sets[g]] for g in m.used_guards()}
    letters = [Structure(a.sigma, domains, {CHAR: ch}, {}, tables) for ch in chars]
    return Word(a.sigma, domains, letters)
