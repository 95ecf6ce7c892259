"""Data-aware processes modulo theories, encoded as data-control automata."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from ..automaton.model import Automaton
from ..core.signature import Signature, SymbolDecl, prime_name
from ..foltl.parser import ParseError, SortError, parse_formula, parse_term
from ..foltl.syntax import (
    TOP,
    And,
    Atom,
    Bottom,
    Const,
    Eq,
    Exists,
    Formula,
    Implies,
    Not,
    Top,
    conj,
    disj,
    free_vars,
    prop,
    rename_symbols,
    substitute_vars,
    symbols_of,
)
from .presets import resolve_signature
from .sfa import SchemaError

VAR_PREFIX = "c$"
ACTION_PREFIX = "act$"


@dataclass(frozen=True)
class DMT:
    sig: Signature  # the theory vocabulary
    variables: Mapping[str, str]  # name -> sort
    init: Mapping[str, object]  # name -> closed term
    actions: tuple[tuple[str, Formula], ...]  # (name, constraint over v^r / v^w)
    final: Formula = TOP  # over the variable names, as constants

    def __post_init__(self):
        missing = [v for v in self.variables if v not in self.init]
        if missing:
            raise SchemaError(f"init: no initial value for {missing}")
        extra = [v for v in self.init if v not in self.variables]
        if extra:
            raise SchemaError(f"init: undeclared variables {extra}")
        names = [a for a, _ in self.actions]
        if len(set(names)) != len(names):
            raise SchemaError("actions: duplicate action names")
        for name, f in self.actions:
            _check_constraint(name, f)


def _literal(f: Formula) -> bool:
    if isinstance(f, (Atom, Eq, Top, Bottom)):
        return True
    return isinstance(f, Not) and isinstance(f.arg, (Atom, Eq))


def _check_constraint(name: str, f: Formula):
    body = f
    while isinstance(body, Exists):
        body = body.body
    parts = body.args if isinstance(body, And) else (body,)
    if not all(_literal(p) for p in parts):
        raise SchemaError(f"actions.{name}: constraint must be an existentially quantified conjunction of literals")


def var_const(v: str) -> str:
    return VAR_PREFIX + v


def action_prop(a: str) -> str:
    return ACTION_PREFIX + a


def dmt_from_json(obj: Mapping) -> DMT:
    """Build a DMT from its JSON object (schema in docs/formats.md)."""
    if not isinstance(obj, Mapping):
        raise SchemaError("DMT file must hold a JSON object")
    for key in ("variables", "init"):
        if key not in obj:
            raise SchemaError(f"{key}: missing field")
    sig = resolve_signature(obj.get("signature", "int"))
    variables = dict(obj["variables"])
    for v, s in variables.items():
        if s not in sig.sorts:
            raise SchemaError(f"variables.{v}: unknown sort {s}")
        if v in sig:
            raise SchemaError(f"variables.{v}: clashes with a signature symbol")
    init = {}
    for v, text in obj["init"].items():
        try:
            term, srt = parse_term(str(text), sig)
        except (ParseError, SortError) as e:
            raise SchemaError(f"init.{v}: {e}") from e
        if v in variables and srt != variables[v]:
            raise SchemaError(f"init.{v}: sort {srt} does not match {variables[v]}")
        init[v] = term
    dmt_vars = {}
    for v, s in variables.items():
        dmt_vars[f"{v}^r"] = s
        dmt_vars[f"{v}^w"] = s
    actions = []
    for i, act in enumerate(obj.get("actions", [])):
        try:
            name, text = act["name"], act["constraint"]
        except (KeyError, TypeError):
            raise SchemaError(f"actions[{i}]: needs name and constraint") from None
        try:
            actions.append((name, parse_formula(text, sig, dmt_vars=dmt_vars)))
        except (ParseError, SortError) as e:
            raise SchemaError(f"actions.{name}: {e}") from e
    final = TOP
    if "final" in obj:
        vsig = sig.with_symbols([SymbolDecl(v, "constant", (), s, False) for v, s in variables.items()])
        try:
            final = parse_formula(obj["final"], vsig)
        except (ParseError, SortError) as e:
            raise SchemaError(f"final: {e}") from e
    return DMT(sig, variables, init, tuple(actions), final)


def load_dmt(path: str) -> DMT:
    with open(path) as fh:
        return dmt_from_json(json.load(fh))


def encode_dmt(b: DMT, exactly_one_action: bool = True) -> Automaton:
    """Data-control automaton: one state constant per variable, one letter
    proposition per action.

    The plain transition is the disjunction over actions of
    ``act$a -> a[v^r := c$v, v^w := c$v']``.  With ``exactly_one_action``
    (default) every implication is required and exactly one action
    proposition holds per letter.  Without actions the transition is true.
    """
    gamma = Signature(b.sig.sorts, tuple(SymbolDecl(var_const(v), "constant", (), s, False) for v, s in b.variables.items()))
    sigma = b.sig.with_symbols([SymbolDecl(action_prop(a), "predicate") for a, _ in b.actions])
    reads = {f"{v}^r": Const(var_const(v)) for v in b.variables}
    writes = {f"{v}^w": Const(prime_name(var_const(v))) for v in b.variables}
    guarded = []
    for name, f in b.actions:
        body = substitute_vars(f, {**reads, **writes})
        guarded.append(Implies(prop(action_prop(name)), body))
    if not b.actions:
        trans = TOP
    elif exactly_one_action:
        props = [prop(action_prop(a)) for a, _ in b.actions]
        at_most = [Not(conj(p, q)) for i, p in enumerate(props) for q in props[i + 1 :]]
        trans = conj(*guarded, disj(*props), *at_most)
    else:
        trans = disj(*guarded)
    init = conj(*[Eq(Const(var_const(v)), t) for v, t in b.init.items()])
    final = rename_symbols(b.final, {v: var_const(v) for v in b.variables})
    assert not free_vars(init) and not (symbols_of(final) & set(b.variables))
    return Automaton(sigma, gamma, init, trans, final)
