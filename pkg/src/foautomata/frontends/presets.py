"""Integer-arithmetic vocabulary shared by the s-FA and DMT loaders."""

from __future__ import annotations

import operator

from ..core.signature import Signature, SignatureError, SymbolDecl
from ..core.theory import SmtConfig, Theory
from ..foltl.syntax import And, App, Atom, Bottom, Const, Eq, Iff, Implies, Not, Or, Top, Var

INT = "Int"

_FUNCS = {"+": operator.add, "-": operator.sub, "*": operator.mul}
_PREDS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}
_SMT = {"+": "+", "-": "-", "*": "*", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def int_signature() -> Signature:
    """Rigid + - * and < <= > >= over Int, with integer numerals."""
    syms = [SymbolDecl(f, "function", (INT, INT), INT, True) for f in _FUNCS]
    syms += [SymbolDecl(p, "predicate", (INT, INT), None, True) for p in _PREDS]
    return Signature((INT,), tuple(syms), numerals=INT)


def int_theory(extra_sorts: dict | None = None, axioms=()) -> Theory:
    sorts = {INT: INT}
    sorts.update(extra_sorts or {})
    return Theory(tuple(axioms), SmtConfig("ALL", sorts, dict(_SMT)))


def resolve_signature(obj) -> Signature:
    """A signature object, or the string ``"int"`` for the preset."""
    if obj == "int":
        return int_signature()
    if isinstance(obj, str):
        raise SignatureError(f"unknown signature preset {obj!r}")
    return Signature.from_json(obj)


class ConcreteError(ValueError):
    pass


def eval_int_term(t, env: dict):
    if isinstance(t, Var):
        if t.name not in env:
            raise ConcreteError(f"variable {t.name} has no value")
        return env[t.name]
    if isinstance(t, Const):
        if t.name in env:
            return env[t.name]
        try:
            return int(t.name)
        except ValueError:
            raise ConcreteError(f"constant {t.name} has no value") from None
    if isinstance(t, App) and t.name in _FUNCS and len(t.args) == 2:
        return _FUNCS[t.name](eval_int_term(t.args[0], env), eval_int_term(t.args[1], env))
    raise ConcreteError(f"cannot evaluate {t!r} over the integers")


def eval_int_formula(f, env: dict) -> bool:
    """Quantifier-free formulas over the preset, evaluated on Python ints."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Atom) and f.pred in _PREDS:
        return _PREDS[f.pred](eval_int_term(f.args[0], env), eval_int_term(f.args[1], env))
    if isinstance(f, Eq):
        return eval_int_term(f.left, env) == eval_int_term(f.right, env)
    if isinstance(f, Not):
        return not eval_int_formula(f.arg, env)
    if isinstance(f, And):
        return all(eval_int_formula(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(eval_int_formula(a, env) for a in f.args)
    if isinstance(f, Implies):
        return (not eval_int_formula(f.left, env)) or eval_int_formula(f.right, env)
    if isinstance(f, Iff):
        return eval_int_formula(f.left, env) == eval_int_formula(f.right, env)
    raise ConcreteError(f"cannot evaluate {type(f).__name__} over the integers")
