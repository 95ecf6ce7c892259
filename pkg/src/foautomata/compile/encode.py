"""Temporal sentences to first-order automata via surrogate predicates."""

from __future__ import annotations

from dataclasses import dataclass

from ..automaton.model import Automaton
from ..core.signature import Signature, prime_name
from ..foltl.semantics import (
    FUTURE_KINDS,
    FUTURE_ROOTED,
    PAST_ROOTED,
    ClosureSet,
    SurrogateTable,
    closure,
    is_pure_past,
    nnf,
    snf_surrogate,
    surrogate_table,
)
from ..foltl.syntax import Atom, Formula, Iff, Not, conj, forall_vars, free_vars, symbols_of


class EncodingError(ValueError):
    pass


@dataclass
class Compiled:
    """An encoded automaton with the intermediate tables, for reporting."""

    automaton: Automaton
    closure: ClosureSet
    table: SurrogateTable

    def stats(self) -> dict:
        return {
            "closure": len(self.closure),
            "surrogates": len(self.table),
            "xs": len(self.table.XS),
            "ws": len(self.table.wXS),
            "ys": len(self.table.YS),
            "zs": len(self.table.ZS),
        }


def _atom(s, primed=False) -> Atom:
    """Surrogate ``s`` applied to its free variables."""
    return Atom(prime_name(s.name) if primed else s.name, s.args)


def _check(phi: Formula, sigma: Signature):
    if free_vars(phi):
        raise EncodingError("only sentences can be encoded")
    extra = {n for n in symbols_of(phi) if n not in sigma}
    if extra:
        raise EncodingError(f"formula mentions symbols outside the word signature: {sorted(extra)}")


def _transition(table: SurrogateTable, literal: bool) -> Formula:
    # X/wX conjuncts read the next state; Y/Z conjuncts write the next
    # state from the current one.  Guards inside snf are primed by kind
    # (X/wX primed, Y/Z unprimed) unless ``literal`` asks for uniform
    # priming per group.
    line1 = True if literal else FUTURE_KINDS
    line2 = False if literal else FUTURE_KINDS
    parts = []
    for s in table.XS + table.wXS:
        parts.append(forall_vars(s.args, Iff(_atom(s), snf_surrogate(s.formula, table, line1))))
    for s in table.YS + table.ZS:
        parts.append(forall_vars(s.args, Iff(_atom(s, True), snf_surrogate(s.formula, table, line2))))
    return conj(*parts)


def _past_init(table: SurrogateTable) -> list[Formula]:
    parts = [forall_vars(s.args, _atom(s)) for s in table.ZS]
    parts += [forall_vars(s.args, Not(_atom(s))) for s in table.YS]
    return parts


def compile_foltl(phi: Formula, sigma: Signature, literal: bool = False) -> Compiled:
    _check(phi, sigma)
    psi = nnf(phi)
    cl = closure(psi, FUTURE_ROOTED)
    table = surrogate_table(cl)
    gamma = Signature(sigma.sorts, table.decls())
    root = table.lookup("xs", psi)
    init = conj(_atom(root), *_past_init(table))
    final = conj(
        *[forall_vars(s.args, _atom(s)) for s in table.wXS],
        *[forall_vars(s.args, Not(_atom(s))) for s in table.XS],
    )
    return Compiled(Automaton(sigma, gamma, init, _transition(table, literal), final), cl, table)


def encode_foltl(phi: Formula, sigma: Signature, literal: bool = False) -> Automaton:
    """Automaton accepting exactly the non-empty words satisfying ``phi``.

    Surrogate ``xs``/``ws`` of a formula holds in the i-th run state iff the
    formula holds at position i; ``ys``/``zs`` iff it held at position i-1.
    ``literal=True`` primes every guard in the X/wX conjuncts and none in
    the Y/Z conjuncts; that variant only agrees with the above reading for
    sentences without past operators (see tests).
    """
    return compile_foltl(phi, sigma, literal).automaton


def compile_pure_past(phi: Formula, sigma: Signature) -> Compiled:
    if not is_pure_past(phi):
        raise EncodingError("formula uses a future operator")
    _check(phi, sigma)
    psi = nnf(phi)
    cl = closure(psi, PAST_ROOTED)
    table = surrogate_table(cl)
    gamma = Signature(sigma.sorts, table.decls())
    root = table.lookup("ys", psi)
    init = conj(*_past_init(table))
    return Compiled(Automaton(sigma, gamma, init, _transition(table, False), _atom(root)), cl, table)


def encode_pure_past(phi: Formula, sigma: Signature) -> Automaton:
    """Deterministic automaton accepting the words whose last position
    satisfies the pure-past sentence ``phi``."""
    return compile_pure_past(phi, sigma).automaton
