"""The symbolic automaton type, classification, and its file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from ..core.signature import Signature, SignatureError, prime_signature
from ..foltl.parser import parse_formula
from ..foltl.syntax import (
    SO_QUANTIFIERS,
    TEMPORAL,
    Formula,
    SOExists,
    free_vars,
    subformulas,
    symbols_of,
)

FINITE_CONTROL = "finite-control"
DATA_CONTROL = "data-control"
MONADIC = "monadic"
GENERAL = "general"
CLASS_ORDER = (FINITE_CONTROL, DATA_CONTROL, MONADIC, GENERAL)


class AutomatonError(ValueError):
    pass


def so_prefix(f: Formula) -> tuple[tuple, Formula]:
    """Split an outermost block of existential second-order quantifiers."""
    decls: list = []
    while isinstance(f, SOExists):
        decls.extend(f.symbols)
        f = f.body
    return tuple(decls), f


@dataclass(frozen=True)
class Automaton:
    """First-order automaton over word signature ``sigma`` and state
    signature ``gamma``.  ``trans`` may use the primed copy of ``gamma``."""

    sigma: Signature
    gamma: Signature
    init: Formula
    trans: Formula
    final: Formula

    def __post_init__(self):
        clash = set(self.sigma.names) & set(self.gamma.names)
        if clash:
            raise AutomatonError(f"word and state signatures share symbols: {sorted(clash)}")
        for s in self.gamma:
            if s.rigid:
                raise AutomatonError(f"state symbol {s.name} must be non-rigid")
        gp = prime_signature(self.gamma)
        clash = set(gp.names) & set(self.sigma.names)
        if clash:
            raise AutomatonError(f"primed state symbols clash with word symbols: {sorted(clash)}")
        rigid_sigma = {s.name for s in self.sigma.rigid}
        state_names = set(self.gamma.names) | rigid_sigma
        full = state_names | set(self.sigma.names) | set(gp.names)
        for label, f, allowed in (
            ("initial condition", self.init, state_names),
            ("transition relation", self.trans, full),
            ("acceptance condition", self.final, state_names),
        ):
            if free_vars(f):
                raise AutomatonError(f"{label} is not a sentence")
            if any(isinstance(g, TEMPORAL) for g in subformulas(f)):
                raise AutomatonError(f"{label} contains a temporal operator")
            extra = {n for n in symbols_of(f) if not n.isdigit()} - allowed
            if extra:
                raise AutomatonError(f"{label} mentions symbols outside its signature: {sorted(extra)}")
            self._check_second_order(label, f)

    def _check_second_order(self, label: str, f: Formula):
        if any(isinstance(g, SO_QUANTIFIERS) for g in subformulas(f)):
            raise AutomatonError(f"{label} uses second-order quantifiers; use Sigma11Automaton")

    @property
    def is_sigma11(self) -> bool:
        return any(isinstance(g, SO_QUANTIFIERS) for f in self.formulas for g in subformulas(f))

    @property
    def formulas(self) -> tuple[Formula, Formula, Formula]:
        return (self.init, self.trans, self.final)

    @property
    def gamma_primed(self) -> Signature:
        return prime_signature(self.gamma)

    def transition_signature(self) -> Signature:
        return self.gamma.union(self.sigma, self.gamma_primed)

    def control_class(self) -> str:
        return classify(self)

    def to_json(self) -> dict:
        return {
            "word_signature": self.sigma.to_json(),
            "state_signature": self.gamma.to_json(),
            "init": str(self.init),
            "trans": str(self.trans),
            "final": str(self.final),
            "control_class": classify(self),
            "sigma11": self.is_sigma11,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"

    @staticmethod
    def from_json(obj: Mapping) -> "Automaton":
        for key in ("word_signature", "state_signature", "init", "trans", "final"):
            if key not in obj:
                raise AutomatonError(f"automaton file is missing field {key!r}")
        try:
            sigma = Signature.from_json(obj["word_signature"])
            gamma = Signature.from_json(obj["state_signature"])
            full = gamma.union(sigma, prime_signature(gamma))
        except SignatureError as exc:
            raise AutomatonError(str(exc)) from None
        parts = [parse_formula(obj[k], full, reserved=True) for k in ("init", "trans", "final")]
        cls = Sigma11Automaton if any(
            isinstance(g, SO_QUANTIFIERS) for f in parts for g in subformulas(f)
        ) else Automaton
        return cls(sigma, gamma, *parts)

    @staticmethod
    def loads(text: str) -> "Automaton":
        return Automaton.from_json(json.loads(text))


@dataclass(frozen=True)
class Sigma11Automaton(Automaton):
    """Automaton whose conditions may start with an existential
    second-order prefix."""

    def _check_second_order(self, label: str, f: Formula):
        _, matrix = so_prefix(f)
        if any(isinstance(g, SO_QUANTIFIERS) for g in subformulas(matrix)):
            raise AutomatonError(f"{label}: second-order quantifiers must form an outermost existential prefix")


def make_automaton(sigma, gamma, init, trans, final) -> Automaton:
    """Automaton or Sigma11Automaton, whichever the formulas need."""
    parts = (init, trans, final)
    if any(isinstance(g, SO_QUANTIFIERS) for f in parts for g in subformulas(f)):
        return Sigma11Automaton(sigma, gamma, init, trans, final)
    return Automaton(sigma, gamma, init, trans, final)


def classify(a: Automaton) -> str:
    """Most specific control class of the state signature."""
    syms = list(a.gamma)
    if all(s.is_proposition for s in syms):
        return FINITE_CONTROL
    if all(s.is_proposition or s.kind == "constant" for s in syms):
        return DATA_CONTROL
    if all(s.kind == "predicate" and s.arity <= 1 for s in syms):
        return MONADIC
    return GENERAL
