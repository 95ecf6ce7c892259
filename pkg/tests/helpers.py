"""Small builders shared by the test modules."""

from foautomata.automaton.model import make_automaton
from foautomata.automaton.oracle import Oracle, domain_assignments
from foautomata.core.signature import Signature, SymbolDecl, prime_signature
from foautomata.core.structure import enumerate_words
from foautomata.foltl.parser import parse_formula


def decl(spec: str) -> SymbolDecl:
    """'q' proposition, 'p:S' / 'r:S,S' predicates, 'c->S' constant,
    'f:S->S' function; a leading '^' makes the symbol rigid."""
    rigid = spec.startswith("^")
    spec = spec.lstrip("^")
    if "->" in spec:
        head, result = spec.split("->")
        if ":" in head:
            name, args = head.split(":")
            return SymbolDecl(name, "function", tuple(args.split(",")), result, rigid)
        return SymbolDecl(head, "constant", (), result, rigid)
    if ":" in spec:
        name, args = spec.split(":")
        return SymbolDecl(name, "predicate", tuple(args.split(",")), None, rigid)
    return SymbolDecl(spec, "predicate", (), None, rigid)


def mksig(*specs, sorts=None) -> Signature:
    decls = tuple(decl(s) for s in specs)
    if sorts is None:
        found = []
        for d in decls:
            for s in d.args + ((d.result,) if d.result else ()):
                if s not in found:
                    found.append(s)
        sorts = found
    return Signature(tuple(sorts), decls)


def auto(sigma, gamma, init, trans, final):
    """Automaton from formula texts (reserved names allowed)."""
    full = gamma.union(sigma)
    tsig = full.union(prime_signature(gamma))
    return make_automaton(
        sigma,
        gamma,
        parse_formula(init, full, reserved=True),
        parse_formula(trans, tsig, reserved=True),
        parse_formula(final, full, reserved=True),
    )


def sorts_of(*sigs):
    out = []
    for s in sigs:
        for x in s.sorts:
            if x not in out:
                out.append(x)
    return out


def languages(a, max_len, bound=2, min_len=0):
    """Oracle language per domain assignment up to ``bound`` elements."""
    out = {}
    for doms in domain_assignments(sorts_of(a.sigma, a.gamma), bound):
        key = tuple(sorted((s, len(d)) for s, d in doms.items()))
        out[key] = Oracle(a, doms).language(a.sigma, max_len, min_len)
    return out


def words(sig, max_len, bound=2, min_len=0):
    for doms in domain_assignments(list(sig.sorts), bound):
        yield from enumerate_words(sig, doms, max_len, min_len)
