"""SMT-LIB 2 printing of unrolled formulas, and s-expression reading."""

from __future__ import annotations

from typing import Iterable

from ..core.signature import SymbolDecl, is_numeral
from ..core.theory import UNINTERPRETED, Theory
from ..foltl.syntax import (
    And,
    App,
    Atom,
    Bottom,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    Var,
    rename_symbols,
    symbols_of,
)
from .unroll import UnrolledFormula, mangle


class EmissionError(ValueError):
    pass


def quote(name: str) -> str:
    if "|" in name or "\\" in name:
        raise EmissionError(f"symbol name {name!r} cannot be quoted")
    return f"|{name}|"


def _var(name: str) -> str:
    return quote("?" + name)


class Printer:
    def __init__(self, theory: Theory):
        self.sorts = dict(theory.smt.sorts)
        self.interp = dict(theory.smt.interpreted)

    def sort(self, s: str) -> str:
        if s not in self.sorts:
            raise EmissionError(f"sort {s} is not mapped to a solver sort")
        target = self.sorts[s]
        return quote(s) if target == UNINTERPRETED else target

    def term(self, t) -> str:
        if isinstance(t, Var):
            return _var(t.name)
        if isinstance(t, Const):
            if is_numeral(t.name):
                return t.name
            return self.interp.get(t.name, quote(t.name))
        if isinstance(t, App):
            head = self.interp.get(t.name, quote(t.name))
            return f"({head} {' '.join(self.term(a) for a in t.args)})"
        raise TypeError(f"not a term: {t!r}")

    def formula(self, f: Formula) -> str:
        if isinstance(f, Top):
            return "true"
        if isinstance(f, Bottom):
            return "false"
        if isinstance(f, Atom):
            head = self.interp.get(f.pred, quote(f.pred))
            if not f.args:
                return head
            return f"({head} {' '.join(self.term(a) for a in f.args)})"
        if isinstance(f, Eq):
            return f"(= {self.term(f.left)} {self.term(f.right)})"
        if isinstance(f, Not):
            return f"(not {self.formula(f.arg)})"
        if isinstance(f, And):
            return f"(and {' '.join(self.formula(a) for a in f.args)})"
        if isinstance(f, Or):
            return f"(or {' '.join(self.formula(a) for a in f.args)})"
        if isinstance(f, Implies):
            return f"(=> {self.formula(f.left)} {self.formula(f.right)})"
        if isinstance(f, Iff):
            return f"(= {self.formula(f.left)} {self.formula(f.right)})"
        if isinstance(f, (Exists, Forall)):
            q = "exists" if isinstance(f, Exists) else "forall"
            return f"({q} (({_var(f.var.name)} {self.sort(f.var.sort)})) {self.formula(f.body)})"
        raise EmissionError(f"cannot emit {type(f).__name__} (temporal or second-order)")

    def declaration(self, d: SymbolDecl) -> str:
        result = "Bool" if d.kind == "predicate" else self.sort(d.result)
        args = " ".join(self.sort(s) for s in d.args)
        return f"(declare-fun {quote(d.name)} ({args}) {result})"


def axiom_copies(u: UnrolledFormula, theory: Theory) -> list[Formula]:
    """Rigid-only axioms once; other axioms once per letter (steps 0..k-1)."""
    sigma = u.automaton.sigma
    flexible = {s.name for s in sigma.non_rigid}
    out = []
    for ax in theory.axioms:
        if symbols_of(ax) & flexible:
            for i in range(u.k):
                out.append(rename_symbols(ax, {n: mangle(n, i) for n in flexible}))
        else:
            out.append(ax)
    return out


def emit_smtlib(
    u: UnrolledFormula,
    theory: Theory,
    extra: Iterable[Formula] = (),
    formula: Formula | None = None,
    comment: str | None = None,
) -> str:
    """Single-shot script checking the unrolling (or ``formula`` over the
    same declarations) together with the theory's step copies."""
    p = Printer(theory)
    lines = []
    if comment:
        lines.append(f"; {comment}")
    lines.append("(set-option :produce-models true)")
    lines.append(f"(set-logic {theory.smt.logic})")
    used_sorts = []
    for d in u.decls:
        for s in d.args + ((d.result,) if d.result else ()):
            if s not in used_sorts:
                used_sorts.append(s)
    for s in u.automaton.sigma.sorts + u.automaton.gamma.sorts:
        if s not in used_sorts:
            used_sorts.append(s)
    for s in used_sorts:
        if s not in p.sorts:
            raise EmissionError(f"sort {s} is not mapped to a solver sort")
        if p.sorts[s] == UNINTERPRETED:
            lines.append(f"(declare-sort {quote(s)} 0)")
    seen = set()
    for d in u.decls:
        if d.name in p.interp:
            continue
        if d.name in seen:
            raise EmissionError(f"name mangling collision on {d.name}")
        seen.add(d.name)
        lines.append(p.declaration(d))
    for ax in axiom_copies(u, theory):
        lines.append(f"(assert {p.formula(ax)})")
    for f in extra:
        lines.append(f"(assert {p.formula(f)})")
    body = u.formula if formula is None else formula
    lines.append(f"(assert {p.formula(body)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# -- reading solver output ---------------------------------------------------


class SexpError(ValueError):
    pass


class Symbol(str):
    """An SMT-LIB symbol, as opposed to a string literal."""


def parse_sexps(text: str) -> list:
    """Parse every s-expression in ``text``.  Symbols become ``Symbol``,
    numerals ``int``, string literals ``str``; quoted ``|x|`` symbols are
    unquoted."""
    out: list = []
    stack: list[list] = [out]
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == ";":
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
        elif c == "(":
            stack.append([])
            i += 1
        elif c == ")":
            if len(stack) == 1:
                raise SexpError(f"unbalanced ')' at offset {i}")
            done = stack.pop()
            stack[-1].append(done)
            i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SexpError("unterminated quoted symbol")
            stack[-1].append(Symbol(text[i + 1 : j]))
            i = j + 1
        elif c == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise SexpError("unterminated string literal")
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            stack[-1].append("".join(buf))
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '()|";':
                j += 1
            tok = text[i:j]
            stack[-1].append(int(tok) if tok.isdigit() else Symbol(tok))
            i = j
    if len(stack) != 1:
        raise SexpError("unbalanced '('")
    return out
