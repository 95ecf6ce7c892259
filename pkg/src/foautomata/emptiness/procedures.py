"""Emptiness checking: the bounded semi-decision loop and the
finite-control decision procedure, plus best-effort witness extraction."""

from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction

from ..automaton.model import FINITE_CONTROL, Automaton, AutomatonError, classify
from ..automaton.oracle import accepts_oracle
from ..core.structure import Structure, Word, validate_word
from ..core.theory import UNINTERPRETED, Theory
from ..foltl.syntax import Not, conj, symbols_of
from .smtlib import Symbol, emit_smtlib, quote
from .solver import ModelError, Sat, SolverError, Unknown, Unsat, parse_model, parse_value, solve
from .unroll import UnrolledFormula, loop_formula, unroll

log = logging.getLogger(__name__)

VERDICT_SCHEMA = "verdict/1"
DEFAULT_KMAX = 25


@dataclass
class NotEmpty:
    k: int
    witness: Word | None = None
    diagnostics: list = field(default_factory=list)

    def line(self):
        return f"NOTEMPTY {self.k}"


@dataclass
class Empty:
    k: int

    def line(self):
        return f"EMPTY {self.k}"


@dataclass
class BoundExhausted:
    k_max: int

    def line(self):
        return f"BOUND {self.k_max}"


@dataclass
class Inconclusive:
    k: int
    reason: str

    def line(self):
        reason = " ".join(self.reason.split())
        return f"INCONCLUSIVE k={self.k} {reason}"


def verdict_line(result) -> str:
    return f"{result.line()} ({VERDICT_SCHEMA})"


@dataclass
class SolverConfig:
    command: str | None = None  # None: $FOAUTOMATA_SOLVER or z3
    timeout: float = 30.0
    dump_dir: str | None = None
    continue_on_unknown: bool = False
    validate: bool = True

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


class _Client:
    def __init__(self, theory: Theory, config: SolverConfig):
        self.theory = theory
        self.config = config

    def check(self, u: UnrolledFormula, label: str, formula=None, extra_smt=()):
        script = emit_smtlib(u, self.theory, formula=formula, comment=f"{label} k={u.k}")
        if extra_smt:
            head, tail = script.rsplit("(check-sat)\n", 1)
            script = head + "".join(f"(assert {e})\n" for e in extra_smt) + "(check-sat)\n" + tail
        if self.config.dump_dir:
            os.makedirs(self.config.dump_dir, exist_ok=True)
            path = os.path.join(self.config.dump_dir, f"{label}_k{u.k}.smt2")
            with open(path, "w") as fh:
                fh.write(script)
        verdict = solve(script, self.config.command, self.config.timeout)
        log.debug("%s k=%d: %s", label, u.k, type(verdict).__name__)
        return verdict


def _hard_error(verdict):
    if isinstance(verdict, SolverError):
        raise SolverFailure(verdict.diagnostics)


class SolverFailure(RuntimeError):
    pass


def _found(client: _Client, u: UnrolledFormula, verdict: Sat) -> NotEmpty:
    word, diags = extract_witness(verdict.model, u, client.theory)
    if word is not None and client.config.validate:
        problem = revalidate(client, u, word)
        if problem:
            diags.append(f"witness rejected: {problem}")
            word = None
    return NotEmpty(u.k, word, diags)


def non_empty_semi(a: Automaton, theory: Theory, k_max: int = DEFAULT_KMAX, config: SolverConfig | None = None):
    """Search for an accepted word of length k = 0, 1, ..., k_max."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    client = _Client(theory, config or SolverConfig())
    for k in range(k_max + 1):
        u = unroll(a, k, with_final=True)
        verdict = client.check(u, "semi")
        _hard_error(verdict)
        if isinstance(verdict, Sat):
            return _found(client, u, verdict)
        if isinstance(verdict, Unknown):
            if client.config.continue_on_unknown:
                continue
            return Inconclusive(k, verdict.reason)
    return BoundExhausted(k_max)


def termination_bound(a: Automaton) -> int:
    return 2 ** len(a.gamma.names) + 1


def decide_finite_control(a: Automaton, theory: Theory, k_max: int = DEFAULT_KMAX, config: SolverConfig | None = None):
    """Decide emptiness of a finite-control automaton.

    Each depth first looks for an accepted run of length k, then asks whether
    every run of length k repeats a control state (loop formula).  The loop
    stops at 2^|Gamma|+1 at the latest, even if ``k_max`` is smaller.
    """
    if a.is_sigma11:
        raise AutomatonError("decide_finite_control expects a first-order automaton")
    if classify(a) != FINITE_CONTROL:
        raise AutomatonError(f"automaton is {classify(a)}, not finite-control")
    client = _Client(theory, config or SolverConfig())
    limit = max(k_max, termination_bound(a))
    unknown_seen = None
    for k in range(limit + 1):
        u = unroll(a, k, with_final=True)
        verdict = client.check(u, "fc-accept")
        _hard_error(verdict)
        if isinstance(verdict, Sat):
            return _found(client, u, verdict)
        if isinstance(verdict, Unknown):
            if not client.config.continue_on_unknown:
                return Inconclusive(k, verdict.reason)
            unknown_seen = unknown_seen or (k, verdict.reason)
        loop = loop_formula(a, k)
        verdict = client.check(u, "fc-loop", formula=conj(u.runs, Not(loop)))
        _hard_error(verdict)
        if isinstance(verdict, Unsat):
            if unknown_seen:
                return Inconclusive(k, f"empty at depth {k} but depth {unknown_seen[0]} was unknown ({unknown_seen[1]})")
            return Empty(k)
        if isinstance(verdict, Unknown):
            if not client.config.continue_on_unknown:
                return Inconclusive(k, verdict.reason)
            unknown_seen = unknown_seen or (k, verdict.reason)
    return BoundExhausted(limit)


# -- witnesses ----------------------------------------------------------------


class _Infinite(Exception):
    pass


def _universes(model_text: str) -> dict[str, list[str]]:
    """Uninterpreted-sort universes from the model's element declarations."""
    from .smtlib import parse_sexps

    out: dict[str, list[str]] = {}
    for top in parse_sexps(model_text):
        items = top[1:] if isinstance(top, list) and top[:1] == ["model"] else top
        if not isinstance(items, list):
            continue
        for item in items:
            if isinstance(item, list) and len(item) == 4 and item[0] == "declare-fun" and item[2] == []:
                out.setdefault(str(item[3]), []).append(str(item[1]))
    for k in out:
        out[k] = sorted(out[k])
    return out


def _show(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


class _ModelEval:
    def __init__(self, defs: dict, elements: set[str]):
        self.defs = defs
        self.elements = elements

    def value(self, expr, env):
        if isinstance(expr, Symbol):
            if expr in env:
                return env[expr]
            if expr in self.elements:
                return str(expr)
            if str(expr) in self.defs and not isinstance(self.defs[str(expr)], tuple):
                return self.value(self.defs[str(expr)], {})
            return parse_value(expr)
        if isinstance(expr, int):
            return expr
        if isinstance(expr, list) and expr:
            op, args = expr[0], expr[1:]
            if op == "ite":
                return self.value(args[1] if self.value(args[0], env) else args[2], env)
            if op == "=":
                vals = [self.value(x, env) for x in args]
                return all(v == vals[0] for v in vals)
            if op == "distinct":
                vals = [self.value(x, env) for x in args]
                return len(set(vals)) == len(vals)
            if op == "and":
                return all(self.value(x, env) for x in args)
            if op == "or":
                return any(self.value(x, env) for x in args)
            if op == "not":
                return not self.value(args[0], env)
            if op == "=>":
                return (not self.value(args[0], env)) or self.value(args[1], env)
            if op in ("-", "/") and all(not isinstance(x, list) or x[:1] in (["-"], ["/"]) for x in args):
                try:
                    return parse_value(expr)
                except ModelError:
                    pass
            if isinstance(op, Symbol) and str(op) in self.defs and isinstance(self.defs[str(op)], tuple):
                return self.apply(str(op), [self.value(x, env) for x in args])
        raise ModelError(f"cannot evaluate model term {expr!r}")

    def apply(self, name, vals):
        _, params, body = self.defs[name]
        return self.value(body, {Symbol(p[0]): v for p, v in zip(params, vals)})


def extract_witness(model_text: str, u: UnrolledFormula, theory: Theory):
    """Rebuild the accepted word from a solver model.

    Returns (word or None, diagnostics).  Interpreted symbols are left out
    of the word's signature.  Symbols the model leaves unconstrained get a
    default value (false, 0, or the first universe element).
    """
    diags: list[str] = []
    a = u.automaton
    sigma = a.sigma.restrict([s.name for s in a.sigma if s.name not in theory.smt.interpreted])
    try:
        defs = parse_model(model_text)
        universes = _universes(model_text)
    except (ModelError, ValueError) as e:
        return None, [f"unreadable model: {e}"]
    elements = {e for es in universes.values() for e in es}
    ev = _ModelEval(defs, elements)
    sorts = {s: theory.smt.sorts.get(s, UNINTERPRETED) for s in sigma.sorts}
    finite = {s: list(universes.get(s) or [f"{s}!val!0"]) for s, t in sorts.items() if t == UNINTERPRETED}
    for s, t in sorts.items():
        if t == "Bool":
            finite[s] = ["false", "true"]

    def default(sort):
        t = sorts[sort]
        if t in ("Int", "Real"):
            return "0"
        if t == "Bool":
            return "false"
        return finite[sort][0]

    def read(name, sym):
        if name not in defs:
            return None
        raw = defs[name]
        if sym.kind == "constant":
            return _show(ev.value(raw, {}))
        if sym.kind == "predicate" and not sym.args:
            return bool(ev.value(raw, {}))
        if not all(a_ in finite for a_ in sym.args):
            raise _Infinite(f"{sym.name} ranges over an infinite sort")
        table = {}
        for args in itertools.product(*[finite[s] for s in sym.args]):
            vals = [v == "true" if sorts[s] == "Bool" else v for v, s in zip(args, sym.args)]
            out = ev.apply(name, vals) if isinstance(raw, tuple) else ev.value(raw, {})
            table[args] = out if sym.kind == "predicate" else _show(out)
        return table

    letters_raw = []
    try:
        for i in range(u.k):
            letter = {}
            for sym in sigma:
                name = sym.name if sym.rigid else u.index[(sym.name, i)]
                letter[sym.name] = read(name, sym)
            letters_raw.append(letter)
    except _Infinite as e:
        return None, [f"no finite witness: {e}"]
    except (ModelError, KeyError, IndexError, TypeError) as e:
        return None, [f"cannot read witness from model: {e}"]

    # Infinite interpreted sorts: the domain is the set of values used.
    domains = {s: list(finite[s]) for s in finite}
    for s, t in sorts.items():
        if s in domains:
            continue
        used = []
        for letter in letters_raw:
            for sym in sigma:
                if sym.kind == "constant" and sym.result == s and letter[sym.name] is not None:
                    used.append(letter[sym.name])
        domains[s] = sorted(set(used) or {"0"}, key=_sort_key)
    letters = []
    for letter in letters_raw:
        consts, funcs, preds = {}, {}, {}
        for sym in sigma:
            v = letter[sym.name]
            if sym.kind == "constant":
                consts[sym.name] = default(sym.result) if v is None else v
            elif sym.kind == "function":
                funcs[sym.name] = v if v is not None else {t: default(sym.result) for t in itertools.product(*[domains[s] for s in sym.args])}
            elif not sym.args:
                preds[sym.name] = [()] if v else []
            else:
                preds[sym.name] = [t for t, b in (v or {}).items() if b]
        letters.append(Structure(sigma, domains, consts, funcs, preds))
    return Word(sigma, domains, letters), diags


def _sort_key(v: str):
    try:
        return (0, Fraction(v), v)
    except ValueError:
        return (1, 0, v)


def _literal(v: str, smt_sort: str) -> str:
    if smt_sort == "Bool":
        return v
    f = Fraction(v)
    if smt_sort == "Real":
        body = f"(/ {abs(f.numerator)}.0 {f.denominator}.0)" if f.denominator != 1 else f"{abs(f.numerator)}.0"
    else:
        body = str(abs(f.numerator))
    return f"(- {body})" if f < 0 else body


def revalidate(client: _Client, u: UnrolledFormula, word: Word) -> str | None:
    """Check a witness independently.  Axioms over the witness signature are
    re-evaluated letter by letter.  For words over interpreted sorts the
    unrolling is re-solved with every letter symbol pinned to its value;
    for finite uninterpreted domains the oracle runs the automaton."""
    theory = client.theory
    names = set(word.sig.names)
    axioms = [ax for ax in theory.axioms if symbols_of(ax) <= names]
    bad = validate_word(word, axioms)
    if bad is not None:
        return str(bad)
    sorts = {s: theory.smt.sorts.get(s, UNINTERPRETED) for s in word.sig.sorts}
    if all(t == UNINTERPRETED for t in sorts.values()) and not theory.smt.interpreted:
        if len(theory.axioms) != len(axioms):
            return None
        try:
            ok = accepts_oracle(u.automaton, word)
        except Exception as e:  # oracle budget or evaluation limits
            return f"oracle could not run: {e}"
        return None if ok else "oracle rejects the witness"
    pins = []
    for i, letter in enumerate(word.letters):
        for sym in word.sig:
            name = sym.name if sym.rigid else u.index[(sym.name, i)]
            if sym.kind == "constant" and sorts[sym.result] != UNINTERPRETED:
                pins.append(f"(= {quote(name)} {_literal(letter.constants[sym.name], sorts[sym.result])})")
            elif sym.kind == "predicate" and not sym.args:
                lit = quote(name)
                pins.append(lit if () in letter.predicates[sym.name] else f"(not {lit})")
    verdict = client.check(u, "witness", extra_smt=pins)
    if isinstance(verdict, Sat):
        return None
    return f"pinned re-check answered {type(verdict).__name__}"
