"""Bounded unrolling of an automaton into one first-order formula."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..automaton.algebra import sigma11_to_fo
from ..automaton.model import FINITE_CONTROL, Automaton, AutomatonError, classify
from ..core.signature import SymbolDecl, prime_name
from ..foltl.syntax import TOP, Formula, Iff, conj, disj, prop, rename_symbols

STEP = "#"


def mangle(name: str, step: int) -> str:
    """Name of the step-``step`` copy of a non-rigid symbol.

    ``#`` never occurs in user or generated names, so the map is injective.
    """
    return f"{name}{STEP}{step}"


def unmangle(name: str) -> tuple[str, int | None]:
    base, sep, step = name.rpartition(STEP)
    if not sep or not step.isdigit():
        return name, None
    return base, int(step)


@dataclass
class UnrolledFormula:
    automaton: Automaton
    k: int
    with_final: bool
    init: Formula
    steps: list[Formula]
    final: Formula | None
    index: dict = field(default_factory=dict)  # (base, step or None) -> mangled name
    decls: list = field(default_factory=list)  # SymbolDecl under mangled names, in declaration order

    @property
    def formula(self) -> Formula:
        parts = [self.init, *self.steps]
        if self.final is not None:
            parts.append(self.final)
        return conj(*parts)

    @property
    def runs(self) -> Formula:
        """The unrolling without the acceptance conjunct."""
        return conj(self.init, *self.steps)


def _step_map(a: Automaton, i: int) -> dict[str, str]:
    m = {}
    for s in a.gamma:
        m[s.name] = mangle(s.name, i)
        m[prime_name(s.name)] = mangle(s.name, i + 1)
    for s in a.sigma.non_rigid:
        m[s.name] = mangle(s.name, i)
    return m


def unroll(a: Automaton, k: int, with_final: bool = True) -> UnrolledFormula:
    """Initial condition at step 0, k transition copies, and optionally the
    acceptance condition at step k.  Rigid symbols keep their names."""
    if k < 0:
        raise ValueError("unrolling depth must be non-negative")
    if a.is_sigma11:
        a = sigma11_to_fo(a)
    state0 = {s.name: mangle(s.name, 0) for s in a.gamma}
    init = rename_symbols(a.init, state0)
    steps = [rename_symbols(a.trans, _step_map(a, i)) for i in range(k)]
    final = None
    if with_final:
        final = rename_symbols(a.final, {s.name: mangle(s.name, k) for s in a.gamma})
    index: dict = {}
    decls: list[SymbolDecl] = []
    for s in a.sigma:
        if s.rigid:
            index[(s.name, None)] = s.name
            decls.append(s)
    for s in a.sigma.non_rigid:
        for i in range(k):
            index[(s.name, i)] = mangle(s.name, i)
            decls.append(s.renamed(mangle(s.name, i)))
    for s in a.gamma:
        for i in range(k + 1):
            index[(s.name, i)] = mangle(s.name, i)
            decls.append(s.renamed(mangle(s.name, i)))
    names = [d.name for d in decls]
    if len(set(names)) != len(names):
        raise AutomatonError("name mangling collision")
    return UnrolledFormula(a, k, with_final, init, steps, final, index, decls)


def loop_formula(a: Automaton, k: int) -> Formula:
    """Disjunction over 0 <= i <= k and i < j <= k-1 of the state
    propositions agreeing at steps i and j (bounds as in the decision
    procedure's proof)."""
    if classify(a) != FINITE_CONTROL:
        raise AutomatonError("loop formula needs a finite-control automaton")
    props = [s.name for s in a.gamma]
    options = []
    for i in range(0, k + 1):
        for j in range(i + 1, k):
            options.append(conj(*[Iff(prop(mangle(p, i)), prop(mangle(p, j))) for p in props]) if props else TOP)
    return disj(*options)
