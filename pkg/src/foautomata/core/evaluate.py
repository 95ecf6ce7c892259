"""First-order evaluation over finite structures.

Formulas are compiled once into closures taking ``(interp, domains, env)``.
The closures evaluate in Kleene's three-valued logic: an interpretation may
be partial (a predicate table given as a dict with missing rows, or a
constant mapped to ``None``) and the result is ``None`` when the missing
entries matter.  Complete interpretations always give ``True``/``False``.
The partial mode drives :func:`find_models`, a backtracking search used by
the oracles.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Iterator, Mapping

from ..foltl.syntax import (
    TEMPORAL,
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
    SOExists,
    SOForall,
    Top,
    Var,
    free_vars,
    subformulas,
    symbols_of,
)
from .signature import SymbolDecl, is_numeral
from .structure import Structure, _tuples, symbol_choices


class EvaluationError(ValueError):
    pass


class ResourceError(RuntimeError):
    """An enumeration budget was exhausted."""


_CACHE: dict = {}


def _term(t) -> Callable:
    if isinstance(t, Var):
        name = t.name

        def var(I, E):
            try:
                return E[name]
            except KeyError:
                raise EvaluationError(f"unassigned variable {name}") from None

        return var
    if isinstance(t, Const):
        name = t.name
        if is_numeral(name):
            return lambda I, E: name

        def const(I, E):
            try:
                return I[name]
            except KeyError:
                raise EvaluationError(f"symbol {name} is not interpreted") from None

        return const
    if isinstance(t, App):
        name = t.name
        args = [_term(a) for a in t.args]

        def app(I, E):
            vals = tuple(a(I, E) for a in args)
            if None in vals:
                return None
            try:
                return I[name].get(vals)
            except KeyError:
                raise EvaluationError(f"symbol {name} is not interpreted") from None

        return app
    raise TypeError(f"not a term: {t!r}")


def compile_formula(f: Formula) -> Callable:
    fn = _CACHE.get(f)
    if fn is None:
        fn = _compile(f)
        if len(_CACHE) > 50000:
            _CACHE.clear()
        _CACHE[f] = fn
    return fn


def _compile(f: Formula) -> Callable:
    if isinstance(f, Top):
        return lambda I, D, E: True
    if isinstance(f, Bottom):
        return lambda I, D, E: False
    if isinstance(f, Atom):
        name = f.pred
        if not f.args:

            def proposition(I, D, E):
                try:
                    tbl = I[name]
                except KeyError:
                    raise EvaluationError(f"symbol {name} is not interpreted") from None
                if type(tbl) is frozenset:
                    return () in tbl
                return tbl.get(())

            return proposition
        args = [_term(a) for a in f.args]

        def atom(I, D, E):
            vals = tuple(a(I, E) for a in args)
            if None in vals:
                return None
            try:
                tbl = I[name]
            except KeyError:
                raise EvaluationError(f"symbol {name} is not interpreted") from None
            if type(tbl) is frozenset:
                return vals in tbl
            return tbl.get(vals)

        return atom
    if isinstance(f, Eq):
        left, right = _term(f.left), _term(f.right)

        def eq(I, D, E):
            a = left(I, E)
            if a is None:
                return None
            b = right(I, E)
            if b is None:
                return None
            return a == b

        return eq
    if isinstance(f, Not):
        sub = compile_formula(f.arg)

        def neg(I, D, E):
            v = sub(I, D, E)
            return None if v is None else not v

        return neg
    if isinstance(f, And):
        subs = [compile_formula(a) for a in f.args]

        def conj(I, D, E):
            unknown = False
            for s in subs:
                v = s(I, D, E)
                if v is False:
                    return False
                if v is None:
                    unknown = True
            return None if unknown else True

        return conj
    if isinstance(f, Or):
        subs = [compile_formula(a) for a in f.args]

        def disj(I, D, E):
            unknown = False
            for s in subs:
                v = s(I, D, E)
                if v is True:
                    return True
                if v is None:
                    unknown = True
            return None if unknown else False

        return disj
    if isinstance(f, Implies):
        left, right = compile_formula(f.left), compile_formula(f.right)

        def implies(I, D, E):
            a = left(I, D, E)
            if a is False:
                return True
            b = right(I, D, E)
            if b is True:
                return True
            if a is None or b is None:
                return None
            return False

        return implies
    if isinstance(f, Iff):
        left, right = compile_formula(f.left), compile_formula(f.right)

        def iff(I, D, E):
            a = left(I, D, E)
            if a is None:
                return None
            b = right(I, D, E)
            if b is None:
                return None
            return a == b

        return iff
    if isinstance(f, (Exists, Forall)):
        name, sort = f.var.name, f.var.sort
        body = compile_formula(f.body)
        want = isinstance(f, Exists)

        def quant(I, D, E):
            missing = object()
            old = E.get(name, missing)
            unknown = False
            try:
                for e in D[sort]:
                    E[name] = e
                    v = body(I, D, E)
                    if v is want:
                        return want
                    if v is None:
                        unknown = True
            finally:
                if old is missing:
                    E.pop(name, None)
                else:
                    E[name] = old
            return None if unknown else (not want)

        return quant
    if isinstance(f, (SOExists, SOForall)):
        decls = f.symbols
        body = compile_formula(f.body)
        want = isinstance(f, SOExists)

        def so_quant(I, D, E):
            unknown = False
            inner = dict(I)
            choices = [symbol_choices(d, D) for d in decls]
            for combo in itertools.product(*choices):
                for d, val in zip(decls, combo):
                    inner[d.name] = val
                v = body(inner, D, E)
                if v is want:
                    return want
                if v is None:
                    unknown = True
            return None if unknown else (not want)

        return so_quant
    if isinstance(f, TEMPORAL):
        raise EvaluationError(f"temporal operator in a first-order context: {f}")
    raise TypeError(f"not a formula: {f!r}")


def eval_fo(struct: Structure, phi: Formula, env: Mapping[str, str] | None = None) -> bool:
    """Classical truth value of a first-order formula in ``struct``."""
    for g in subformulas(phi):
        if isinstance(g, TEMPORAL):
            raise EvaluationError("eval_fo needs a first-order formula")
    env = dict(env or {})
    for v in free_vars(phi):
        if v.name not in env:
            raise EvaluationError(f"free variable {v.name} is not assigned")
        if env[v.name] not in struct.domains.get(v.sort, ()):
            raise EvaluationError(f"{v.name} is assigned outside the domain of {v.sort}")
    for name in symbols_of(phi):
        if name not in struct.sig:
            raise EvaluationError(f"symbol {name} is not in the structure's signature")
    return bool(compile_formula(phi)(struct.interp(), struct.domains, env))


def _slots(syms: Iterable[SymbolDecl], domains: Mapping[str, tuple]) -> list:
    out = []
    for sym in syms:
        if sym.kind == "constant":
            out.append((sym, None, tuple(domains[sym.result])))
        elif sym.kind == "function":
            for row in _tuples(sym, domains):
                out.append((sym, row, tuple(domains[sym.result])))
        else:
            for row in _tuples(sym, domains):
                out.append((sym, row, (False, True)))
    return out


def find_models(
    phi: Formula,
    fixed: Mapping,
    open_syms: Iterable[SymbolDecl],
    domains: Mapping[str, tuple],
    budget: int | None = 1_000_000,
) -> Iterator[dict]:
    """Yield every completion of ``fixed`` over ``open_syms`` satisfying ``phi``.

    ``fixed`` is a flat interpretation (see ``Structure.interp``).  Each
    yielded dict maps the open symbol names to complete values.  Partial
    assignments whose three-valued evaluation is already false are pruned.
    """
    fn = compile_formula(phi)
    open_syms = list(open_syms)
    slots = _slots(open_syms, domains)
    interp = dict(fixed)
    for sym in open_syms:
        interp[sym.name] = None if sym.kind == "constant" else {}
    nodes = [0]

    def finish() -> dict:
        out = {}
        for sym in open_syms:
            val = interp[sym.name]
            if sym.kind == "predicate":
                out[sym.name] = frozenset(t for t, b in val.items() if b)
            elif sym.kind == "function":
                out[sym.name] = dict(val)
            else:
                out[sym.name] = val
        return out

    def search(i: int) -> Iterator[dict]:
        if i == len(slots):
            if fn(interp, domains, {}) is True:
                yield finish()
            return
        sym, row, values = slots[i]
        for v in values:
            nodes[0] += 1
            if budget is not None and nodes[0] > budget:
                raise ResourceError(f"model search exceeded {budget} nodes")
            if row is None:
                interp[sym.name] = v
            else:
                interp[sym.name][row] = v
            if fn(interp, domains, {}) is not False:
                yield from search(i + 1)
        if row is None:
            interp[sym.name] = None
        else:
            del interp[sym.name][row]

    if not slots:
        if fn(interp, domains, {}) is True:
            yield {}
        return
    if fn(interp, domains, {}) is False:
        return
    yield from search(0)
