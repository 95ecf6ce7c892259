"""Boolean and regular operations on first-order automata."""

from __future__ import annotations

from typing import Callable

from ..core.signature import PRIME, Signature, SymbolDecl, fresh_name, prime_name
from ..foltl.syntax import (
    TOP,
    Formula,
    Not,
    SOExists,
    SO_QUANTIFIERS,
    conj,
    disj,
    prop,
    rename_formula,
    rename_symbols,
    subformulas,
)
from .model import Automaton, AutomatonError, Sigma11Automaton, make_automaton, so_prefix


def _taken(*automata: Automaton) -> set[str]:
    names: set[str] = set()
    for a in automata:
        for sig in (a.sigma, a.gamma):
            for s in sig:
                names.add(s.name)
                names.add(prime_name(s.name))
        for f in a.formulas:
            for g in subformulas(f):
                if isinstance(g, SO_QUANTIFIERS):
                    names.update(d.name for d in g.symbols)
    return names


def rename_state(a: Automaton, mapping: dict[str, str]) -> Automaton:
    """Rename state symbols (and their primed copies) throughout."""
    full = dict(mapping)
    full.update({prime_name(k): prime_name(v) for k, v in mapping.items()})
    return make_automaton(
        a.sigma,
        a.gamma.rename(mapping),
        rename_formula(a.init, full),
        rename_formula(a.trans, full),
        rename_formula(a.final, full),
    )


def make_disjoint(a1: Automaton, a2: Automaton) -> tuple[Automaton, Automaton]:
    """Rename the state symbols of ``a2`` that clash with ``a1``."""
    if a1.sigma != a2.sigma:
        raise AutomatonError("automata have different word signatures")
    taken = _taken(a1, a2)
    clash = set(a1.gamma.names) & set(a2.gamma.names)
    mapping = {}
    for name in a2.gamma.names:
        if name in clash:
            new = fresh_name(name.rstrip(PRIME), taken)
            taken.update({new, prime_name(new)})
            mapping[name] = new
    return a1, (rename_state(a2, mapping) if mapping else a2)


def _fresh_prop(base: str, *automata: Automaton) -> SymbolDecl:
    return SymbolDecl(fresh_name(base, _taken(*automata)), "predicate")


def _combine(build: Callable[..., Formula], parts: list[Formula], taken: set[str]) -> Formula:
    """Apply ``build`` to the matrices of ``parts`` and put all their
    existential second-order prefixes in front, renamed apart."""
    decls: list[SymbolDecl] = []
    matrices = []
    for f in parts:
        block, matrix = so_prefix(f)
        mapping = {}
        for d in block:
            if d.name in taken:
                new = fresh_name(d.name.rstrip(PRIME), taken)
                mapping[d.name] = new
                d = d.renamed(new)
            taken.add(d.name)
            decls.append(d)
        matrices.append(rename_symbols(matrix, mapping))
    body = build(*matrices)
    return SOExists(tuple(decls), body) if decls else body


def intersection(a1: Automaton, a2: Automaton) -> Automaton:
    a1, a2 = make_disjoint(a1, a2)
    taken = _taken(a1, a2)
    gamma = a1.gamma.union(a2.gamma)
    return make_automaton(
        a1.sigma,
        gamma,
        _combine(lambda x, y: conj(x, y), [a1.init, a2.init], taken),
        _combine(lambda x, y: conj(x, y), [a1.trans, a2.trans], taken),
        _combine(lambda x, y: conj(x, y), [a1.final, a2.final], taken),
    )


def union(a1: Automaton, a2: Automaton) -> Automaton:
    a1, a2 = make_disjoint(a1, a2)
    p0 = _fresh_prop("p0", a1, a2)
    p, pp = prop(p0.name), prop(prime_name(p0.name))
    taken = _taken(a1, a2) | {p0.name, prime_name(p0.name)}
    gamma = a1.gamma.union(a2.gamma, Signature(a1.gamma.sorts, (p0,)))
    init = _combine(lambda x, y: disj(conj(p, x), conj(Not(p), y)), [a1.init, a2.init], taken)
    trans = _combine(
        lambda x, y: disj(conj(p, x, pp), conj(Not(p), y, Not(pp))), [a1.trans, a2.trans], taken
    )
    final = _combine(lambda x, y: disj(conj(p, x), conj(Not(p), y)), [a1.final, a2.final], taken)
    return make_automaton(a1.sigma, gamma, init, trans, final)


def _double_prime(a: Automaton, taken: set[str]) -> dict[str, str]:
    """Γ -> Γ'' renaming for the state symbols of ``a``."""
    out = {}
    for s in a.gamma:
        new = s.name + PRIME * 2
        if new in taken:
            raise AutomatonError(f"double-primed name {new} is already in use")
        out[s.name] = new
        taken.add(new)
    return out


def concatenation(a1: Automaton, a2: Automaton) -> Sigma11Automaton:
    """Runs of ``a1`` hand over to ``a2`` after an accepting state of ``a1``.

    The hand-over transition reads its letter with ``a2``, so the second
    factor is never the empty word.
    """
    a1, a2 = make_disjoint(a1, a2)
    pd = _fresh_prop("p", a1, a2)
    p, pp = prop(pd.name), prop(prime_name(pd.name))
    taken = _taken(a1, a2) | {pd.name, prime_name(pd.name)}
    dp = _double_prime(a2, taken)
    gamma2_dd = [s.renamed(dp[s.name]) for s in a2.gamma]
    init2_dd = rename_symbols(a2.init, dp)
    trans2_dd = rename_symbols(a2.trans, dp)
    gamma = a1.gamma.union(a2.gamma, Signature(a1.gamma.sorts, (pd,)))

    def jump(t1, t2, f1, i2dd, t2dd):
        return disj(
            conj(p, t1, pp),
            conj(Not(p), t2, Not(pp)),
            conj(p, Not(pp), f1, conj(i2dd, t2dd)),
        )

    trans = _combine(jump, [a1.trans, a2.trans, a1.final, init2_dd, trans2_dd], taken)
    trans = _prefix(tuple(gamma2_dd), trans)
    init = _combine(lambda x: conj(p, x), [a1.init], taken)
    final = _combine(lambda x: conj(Not(p), x), [a2.final], taken)
    return Sigma11Automaton(a1.sigma, gamma, init, trans, final)


def _prefix(decls: tuple, f: Formula) -> Formula:
    if not decls:
        return f
    block, matrix = so_prefix(f)
    return SOExists(decls + block, matrix)


def kleene_star(a: Automaton) -> Sigma11Automaton:
    """Adds a restart transition from accepting states; initial and
    acceptance conditions are unchanged, so the empty word is accepted
    only if ``a`` accepts it."""
    taken = _taken(a)
    dp = _double_prime(a, taken)
    gamma_dd = tuple(s.renamed(dp[s.name]) for s in a.gamma)
    trans = _combine(
        lambda t, f, i_dd, t_dd: disj(t, conj(f, conj(i_dd, t_dd))),
        [a.trans, a.final, rename_symbols(a.init, dp), rename_symbols(a.trans, dp)],
        taken,
    )
    trans = _prefix(gamma_dd, trans)
    return Sigma11Automaton(a.sigma, a.gamma, a.init, trans, a.final)


def sigma11_to_fo(a: Automaton) -> Automaton:
    """Move existential second-order prefixes into the state signature."""
    taken = _taken(a)
    lifted: list[SymbolDecl] = []
    out = []
    for label, f in (("initial condition", a.init), ("transition relation", a.trans), ("acceptance condition", a.final)):
        block, matrix = so_prefix(f)
        if any(isinstance(g, SO_QUANTIFIERS) for g in subformulas(matrix)):
            raise AutomatonError(f"{label}: second-order quantifiers are not in an outermost existential prefix")
        mapping = {}
        for d in block:
            new = fresh_name(d.name.rstrip(PRIME), taken)
            taken.update({new, prime_name(new)})
            mapping[d.name] = new
            lifted.append(SymbolDecl(new, d.kind, d.args, d.result, False))
        out.append(rename_symbols(matrix, mapping))
    if not lifted:
        return Automaton(a.sigma, a.gamma, *a.formulas)
    sorts = tuple(dict.fromkeys(a.gamma.sorts + a.sigma.sorts))
    gamma = a.gamma.union(Signature(sorts, tuple(lifted)))
    return Automaton(a.sigma, gamma, *out)


def complement_deterministic(a: Automaton) -> Automaton:
    """Sink-completion followed by negating acceptance.  The caller vouches
    that ``a`` is deterministic."""
    if a.is_sigma11:
        raise AutomatonError("complement needs a first-order automaton; apply sigma11_to_fo first")
    sd = _fresh_prop("sink", a)
    s, sp = prop(sd.name), prop(prime_name(sd.name))
    gamma = a.gamma.with_symbols([sd])
    init = conj(Not(s), a.init)
    trans = disj(conj(Not(s), Not(sp), a.trans), conj(s, sp))
    final = Not(conj(Not(s), a.final))
    return Automaton(a.sigma, gamma, init, trans, final)


def top_automaton(sigma: Signature) -> Automaton:
    """Γ = ∅ and every condition true: accepts every word."""
    return Automaton(sigma, Signature(sigma.sorts), TOP, TOP, TOP)
