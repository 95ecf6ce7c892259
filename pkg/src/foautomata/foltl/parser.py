"""Recursive-descent parser for the formula grammar (see docs/grammar.md)."""

from __future__ import annotations

import re
from typing import Mapping

from ..core.signature import (
    INFIX_FUNCTIONS,
    INFIX_PREDICATES,
    Signature,
    SymbolDecl,
    is_numeral,
)
from .syntax import (
    BOTTOM,
    TOP,
    And,
    App,
    Atom,
    Const,
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
    Triggered,
    Until,
    Var,
    WeakNext,
    WeakYesterday,
    Yesterday,
)


class ParseError(ValueError):
    def __init__(self, message: str, pos: int | None = None, text: str = ""):
        self.pos = pos
        where = f" at column {pos + 1}" if pos is not None else ""
        super().__init__(f"{message}{where}")
        self.text = text


class SortError(ParseError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\$[A-Za-z0-9_]*)*'*(?:\^[rw])?)
  | (?P<num>\d+)
  | (?P<op><->|->|<=|>=|!=|[()\[\],.:!&|=<>+\-*/])
    """,
    re.VERBOSE,
)

_PREFIX = {"X": Next, "wX": WeakNext, "Y": Yesterday, "Z": WeakYesterday, "wY": WeakYesterday}
_INFIX_TEMPORAL = {"U": Until, "R": Release, "S": Since, "T": Triggered}
_KEYWORDS = set(_PREFIX) | {"true", "false", "exists", "forall", "exists2", "forall2"}
_COMPARISONS = ("=", "!=") + INFIX_PREDICATES


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, sig, free, reserved, dmt_vars):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig
        self.scope: dict[str, str] = dict(free or {})
        self.so_scope: dict[str, SymbolDecl] = {}
        self.reserved = reserved
        self.dmt_vars = dmt_vars or {}

    # token helpers
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value, k=0):
        tok = self.peek(k)
        return tok[0] in ("op", "ident") and tok[1] == value

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] == "eof":
            self.fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        return self.advance()

    def fail(self, msg, tok=None, cls=ParseError):
        tok = tok or self.peek()
        raise cls(msg, tok[2], self.text)

    def ident(self):
        tok = self.peek()
        if tok[0] != "ident":
            self.fail(f"expected identifier, found {tok[1] or 'end of input'!r}")
        name = tok[1]
        if not self.reserved and ("$" in name or "'" in name):
            self.fail(f"identifier {name} uses a reserved decoration")
        if "^" in name and name not in self.dmt_vars:
            self.fail(f"read/write variable {name} is not declared")
        self.advance()
        return name, tok

    def lookup(self, name) -> SymbolDecl | None:
        if name in self.so_scope:
            return self.so_scope[name]
        return self.sig.get(name)

    # formulas
    def formula(self) -> Formula:
        left = self.implication()
        while self.at("<->"):
            self.advance()
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        items = [self.conjunction()]
        while self.at("|"):
            self.advance()
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction(self):
        items = [self.binary_temporal()]
        while self.at("&"):
            self.advance()
            items.append(self.binary_temporal())
        return items[0] if len(items) == 1 else And(tuple(items))

    def binary_temporal(self):
        left = self.unary()
        tok = self.peek()
        if tok[0] == "ident" and tok[1] in _INFIX_TEMPORAL:
            self.advance()
            return _INFIX_TEMPORAL[tok[1]](left, self.binary_temporal())
        return left

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "!":
            self.advance()
            return Not(self.unary())
        if tok[0] == "ident":
            if tok[1] in _PREFIX:
                self.advance()
                return _PREFIX[tok[1]](self.unary())
            if tok[1] in ("exists", "forall"):
                return self.quantifier()
            if tok[1] in ("exists2", "forall2"):
                return self.so_quantifier()
        return self.atomic()

    def quantifier(self):
        kind = self.advance()[1]
        binders = []
        while True:
            name, tok = self.ident()
            if name in _KEYWORDS:
                self.fail(f"{name} is a keyword", tok)
            self.expect(":")
            sort, stok = self.ident()
            if sort not in self.sig.sorts:
                self.fail(f"unknown sort {sort}", stok, SortError)
            binders.append(Var(name, sort))
            if self.at(","):
                self.advance()
                continue
            break
        self.expect(".")
        saved = dict(self.scope)
        for v in binders:
            self.scope[v.name] = v.sort
        body = self.formula()
        self.scope = saved
        node = Exists if kind == "exists" else Forall
        for v in reversed(binders):
            body = node(v, body)
        return body

    def so_quantifier(self):
        kind = self.advance()[1]
        self.expect("[")
        decls = []
        while not self.at("]"):
            decls.append(self.decl())
            if self.at(","):
                self.advance()
        self.expect("]")
        self.expect(".")
        saved = dict(self.so_scope)
        for d in decls:
            self.so_scope[d.name] = d
        body = self.formula()
        self.so_scope = saved
        return (SOExists if kind == "exists2" else SOForall)(tuple(decls), body)

    def decl(self) -> SymbolDecl:
        name, _ = self.ident()
        if self.at(":"):
            self.advance()
            sort, _ = self.ident()
            return SymbolDecl(name, "constant", (), sort, False)
        self.expect("(")
        args = []
        while not self.at(")"):
            s, _ = self.ident()
            args.append(s)
            if self.at(","):
                self.advance()
        self.expect(")")
        if self.at(":"):
            self.advance()
            sort, _ = self.ident()
            return SymbolDecl(name, "function", tuple(args), sort, False)
        return SymbolDecl(name, "predicate", tuple(args), None, False)

    def atomic(self):
        tok = self.peek()
        if tok[0] == "ident" and tok[1] == "true":
            self.advance()
            return TOP
        if tok[0] == "ident" and tok[1] == "false":
            self.advance()
            return BOTTOM
        if tok[0] == "op" and tok[1] == "(":
            start = self.i
            try:
                self.advance()
                inner = self.formula()
                self.expect(")")
                if self.peek()[1] not in _COMPARISONS + INFIX_FUNCTIONS:
                    return inner
            except ParseError:
                pass
            self.i = start
            return self.comparison()
        if tok[0] == "ident":
            sym = self.lookup(tok[1])
            if sym is not None and sym.kind == "predicate" and tok[1] not in self.scope:
                name, _ = self.ident()
                args = self.arguments(sym, tok)
                return Atom(name, args)
        return self.comparison()

    def arguments(self, sym: SymbolDecl, tok) -> tuple:
        args = []
        if sym.args:
            self.expect("(")
            while True:
                args.append(self.term())
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect(")")
        if len(args) != len(sym.args):
            self.fail(f"{sym.name} expects {len(sym.args)} arguments, got {len(args)}", tok, SortError)
        for (term, sort), want in zip(args, sym.args):
            if sort != want:
                self.fail(f"argument of {sym.name} has sort {sort}, expected {want}", tok, SortError)
        return tuple(t for t, _ in args)

    def comparison(self):
        start_tok = self.peek()
        left, lsort = self.term()
        tok = self.peek()
        if tok[1] not in _COMPARISONS or tok[0] != "op":
            self.fail(f"expected a formula, found {start_tok[1] or 'end of input'!r}", start_tok)
        self.advance()
        right, rsort = self.term()
        if tok[1] in ("=", "!="):
            if lsort != rsort:
                self.fail(f"cannot compare sorts {lsort} and {rsort}", tok, SortError)
            eq = Eq(left, right)
            return Not(eq) if tok[1] == "!=" else eq
        sym = self.lookup(tok[1])
        if sym is None or sym.kind != "predicate" or len(sym.args) != 2:
            self.fail(f"relation {tok[1]} is not declared as a binary predicate", tok)
        if (lsort, rsort) != sym.args:
            self.fail(f"{tok[1]} expects sorts {sym.args}, got {(lsort, rsort)}", tok, SortError)
        return Atom(tok[1], (left, right))

    # terms
    def term(self):
        return self.sum()

    def _infix(self, ops, sub):
        left, lsort = sub()
        while self.peek()[0] == "op" and self.peek()[1] in ops:
            tok = self.advance()
            right, rsort = sub()
            sym = self.lookup(tok[1])
            if sym is None or sym.kind != "function" or len(sym.args) != 2:
                self.fail(f"operator {tok[1]} is not declared as a binary function", tok)
            if (lsort, rsort) != sym.args:
                self.fail(f"{tok[1]} expects sorts {sym.args}, got {(lsort, rsort)}", tok, SortError)
            left, lsort = App(tok[1], (left, right)), sym.result
        return left, lsort

    def sum(self):
        return self._infix(("+", "-"), self.product)

    def product(self):
        return self._infix(("*", "/"), self.primary)

    def primary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "(":
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        if tok[0] == "num":
            self.advance()
            if self.sig.numerals is None:
                self.fail(f"numeral {tok[1]} used but the signature declares no numeral sort", tok)
            return Const(tok[1]), self.sig.numerals
        name, tok = self.ident()
        if name in _KEYWORDS:
            self.fail(f"{name} is a keyword, not a term", tok)
        if name in self.scope and not self.at("("):
            return Var(name, self.scope[name]), self.scope[name]
        if name in self.dmt_vars:
            return Var(name, self.dmt_vars[name]), self.dmt_vars[name]
        sym = self.lookup(name)
        if sym is None:
            self.fail(f"unbound variable or unknown symbol {name}", tok)
        if sym.kind == "predicate":
            self.fail(f"predicate {name} used as a term", tok, SortError)
        if sym.kind == "constant":
            return Const(name), sym.result
        args = self.arguments(sym, tok)
        return App(name, args), sym.result


def parse_formula(
    text: str,
    sig: Signature,
    free: Mapping[str, str] | None = None,
    reserved: bool = False,
    dmt_vars: Mapping[str, str] | None = None,
) -> Formula:
    """Parse and sort-check ``text`` against ``sig``.

    ``free`` declares variables allowed to occur free (name -> sort); by
    default the result must be a sentence.  ``reserved`` admits generated
    names (primes and ``$``), as found in automaton files.
    """
    p = _Parser(text, sig, free, reserved, dmt_vars)
    f = p.formula()
    tok = p.peek()
    if tok[0] != "eof":
        p.fail(f"unexpected token {tok[1]!r}")
    return f


def parse_term(text: str, sig: Signature, free: Mapping[str, str] | None = None, reserved: bool = False):
    p = _Parser(text, sig, free, reserved, None)
    t, sort = p.term()
    if p.peek()[0] != "eof":
        p.fail(f"unexpected token {p.peek()[1]!r}")
    return t, sort


__all__ = ["ParseError", "SortError", "parse_formula", "parse_term", "tokenize", "is_numeral"]
