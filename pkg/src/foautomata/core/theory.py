"""Theories: axioms for the oracle, sort and symbol mappings for the solver."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..foltl.syntax import Formula, free_vars, symbols_of
from .signature import Signature

UNINTERPRETED = "uninterpreted"


class TheoryError(ValueError):
    pass


@dataclass(frozen=True)
class SmtConfig:
    """How a signature maps onto a solver logic.

    ``sorts`` maps each sort either to a solver sort (``Int``, ``Real``,
    ``Bool``...) or to ``"uninterpreted"``; ``interpreted`` maps rigid
    symbols to solver operators (``"/": "div"``).
    """

    logic: str = "ALL"
    sorts: Mapping[str, str] = field(default_factory=dict)
    interpreted: Mapping[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"logic": self.logic, "sorts": dict(self.sorts), "interpreted": dict(self.interpreted)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SmtConfig":
        return cls(obj.get("logic", "ALL"), dict(obj.get("sorts", {})), dict(obj.get("interpreted", {})))


@dataclass(frozen=True)
class Theory:
    axioms: tuple[Formula, ...] = ()
    smt: SmtConfig = field(default_factory=SmtConfig)

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        for ax in self.axioms:
            if free_vars(ax):
                raise TheoryError(f"axiom is not a sentence: {ax}")

    def check(self, sig: Signature) -> None:
        for name in self.smt.interpreted:
            sym = sig.get(name)
            if sym is None:
                raise TheoryError(f"interpreted symbol {name} is not in the signature")
            if not sym.rigid:
                raise TheoryError(f"interpreted symbol {name} must be rigid")
        for ax in self.axioms:
            extra = {n for n in symbols_of(ax) if n not in sig}
            if extra:
                raise TheoryError(f"axiom mentions unknown symbols {sorted(extra)}: {ax}")

    def with_default_sorts(self, sig: Signature) -> "Theory":
        """Map every unmapped sort of ``sig`` to an uninterpreted sort."""
        sorts = dict(self.smt.sorts)
        for s in sig.sorts:
            sorts.setdefault(s, UNINTERPRETED)
        return Theory(self.axioms, SmtConfig(self.smt.logic, sorts, self.smt.interpreted))

    def to_json(self) -> dict:
        return {"axioms": [str(a) for a in self.axioms], "smt": self.smt.to_json()}

    @classmethod
    def from_json(cls, obj: Mapping, sig: Signature) -> "Theory":
        from ..foltl.parser import parse_formula

        axioms = tuple(parse_formula(t, sig) for t in obj.get("axioms", []))
        theory = cls(axioms, SmtConfig.from_json(obj.get("smt", {})))
        theory.check(sig)
        return theory
