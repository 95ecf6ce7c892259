"""Multi-sorted signatures with per-symbol rigidity flags.

Symbol names written by users are plain identifiers.  Two characters are
reserved for names the library generates itself: ``'`` marks a primed copy
(``c'`` is the next-state copy of ``c``) and ``$`` marks fresh symbols
(surrogates, sink propositions, lifted second-order symbols).  Since the
parser refuses both in user input, generated names never collide with user
symbols.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

PRIME = "'"
FRESH = "$"

USER_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
INFIX_FUNCTIONS = ("+", "-", "*", "/")
INFIX_PREDICATES = ("<", "<=", ">", ">=")


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class SymbolDecl:
    """One symbol: a constant, a function, or a predicate.

    Constants and functions carry a result sort; a predicate with no
    arguments is a proposition.
    """

    name: str
    kind: str
    args: tuple[str, ...] = ()
    result: str | None = None
    rigid: bool = False

    def __post_init__(self):
        if self.kind not in ("constant", "function", "predicate"):
            raise SignatureError(f"unknown symbol kind {self.kind!r}")
        if self.kind == "predicate" and self.result is not None:
            raise SignatureError(f"predicate {self.name} cannot have a result sort")
        if self.kind != "predicate" and self.result is None:
            raise SignatureError(f"{self.kind} {self.name} needs a result sort")
        if self.kind == "constant" and self.args:
            raise SignatureError(f"constant {self.name} cannot take arguments")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_proposition(self) -> bool:
        return self.kind == "predicate" and not self.args

    def renamed(self, name: str) -> "SymbolDecl":
        return SymbolDecl(name, self.kind, self.args, self.result, self.rigid)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "name": self.name}
        if self.kind == "constant":
            out["sort"] = self.result
        else:
            out["args"] = list(self.args)
            if self.kind == "function":
                out["result"] = self.result
        out["rigid"] = self.rigid
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "SymbolDecl":
        try:
            kind = obj["kind"]
            name = obj["name"]
        except KeyError as exc:
            raise SignatureError(f"symbol entry missing field {exc.args[0]!r}") from None
        rigid = bool(obj.get("rigid", False))
        if kind == "constant":
            if "sort" not in obj:
                raise SignatureError(f"constant {name}: missing field 'sort'")
            return cls(name, kind, (), obj["sort"], rigid)
        if kind == "function":
            if "result" not in obj:
                raise SignatureError(f"function {name}: missing field 'result'")
            return cls(name, kind, tuple(obj.get("args", ())), obj["result"], rigid)
        return cls(name, kind, tuple(obj.get("args", ())), None, rigid)


def prime_name(name: str) -> str:
    return name + PRIME


def unprime_name(name: str) -> str:
    if not name.endswith(PRIME):
        raise SignatureError(f"{name} is not a primed name")
    return name[:-1]


def is_numeral(name: str) -> bool:
    return name.isdigit()


def fresh_name(base: str, taken: Iterable[str]) -> str:
    """A name ``base$`` or ``base$N`` not in ``taken``."""
    taken = set(taken)
    candidate = f"{base}{FRESH}"
    n = 1
    while candidate in taken or prime_name(candidate) in taken:
        candidate = f"{base}{FRESH}{n}"
        n += 1
    return candidate


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...] = ()
    symbols: tuple[SymbolDecl, ...] = ()
    numerals: str | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(set(self.sorts)) != len(self.sorts):
            raise SignatureError("duplicate sort name")
        if self.numerals is not None and self.numerals not in self.sorts:
            raise SignatureError(f"numeral sort {self.numerals} is not declared")
        index = {}
        for sym in self.symbols:
            if sym.name in index:
                raise SignatureError(f"duplicate symbol name {sym.name}")
            if is_numeral(sym.name):
                raise SignatureError(f"numerals cannot be declared as symbols: {sym.name}")
            for s in sym.args + ((sym.result,) if sym.result else ()):
                if s not in self.sorts:
                    raise SignatureError(f"symbol {sym.name} uses undeclared sort {s}")
            index[sym.name] = sym
        object.__setattr__(self, "_index", index)

    def __contains__(self, name: str) -> bool:
        return name in self._index or (self.numerals is not None and is_numeral(name))

    def __iter__(self) -> Iterator[SymbolDecl]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def get(self, name: str) -> SymbolDecl | None:
        sym = self._index.get(name)
        if sym is None and self.numerals is not None and is_numeral(name):
            return SymbolDecl(name, "constant", (), self.numerals, True)
        return sym

    def __getitem__(self, name: str) -> SymbolDecl:
        sym = self.get(name)
        if sym is None:
            raise KeyError(name)
        return sym

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def of_kind(self, kind: str) -> tuple[SymbolDecl, ...]:
        return tuple(s for s in self.symbols if s.kind == kind)

    @property
    def rigid(self) -> tuple[SymbolDecl, ...]:
        return tuple(s for s in self.symbols if s.rigid)

    @property
    def non_rigid(self) -> tuple[SymbolDecl, ...]:
        return tuple(s for s in self.symbols if not s.rigid)

    def restrict(self, names: Iterable[str]) -> "Signature":
        keep = set(names)
        return Signature(self.sorts, tuple(s for s in self.symbols if s.name in keep), self.numerals)

    def union(self, *others: "Signature") -> "Signature":
        """Disjoint union of symbol sets; sorts are merged."""
        sorts = list(self.sorts)
        symbols = list(self.symbols)
        numerals = self.numerals
        seen = set(self.names)
        for other in others:
            for s in other.sorts:
                if s not in sorts:
                    sorts.append(s)
            for sym in other.symbols:
                if sym.name in seen:
                    raise SignatureError(f"signatures are not disjoint: {sym.name}")
                seen.add(sym.name)
                symbols.append(sym)
            if other.numerals is not None:
                if numerals is not None and numerals != other.numerals:
                    raise SignatureError("conflicting numeral sorts")
                numerals = other.numerals
        return Signature(tuple(sorts), tuple(symbols), numerals)

    def with_symbols(self, extra: Iterable[SymbolDecl]) -> "Signature":
        return self.union(Signature(self.sorts, tuple(extra)))

    def rename(self, mapping: Mapping[str, str]) -> "Signature":
        return Signature(
            self.sorts,
            tuple(s.renamed(mapping.get(s.name, s.name)) for s in self.symbols),
            self.numerals,
        )

    def to_json(self) -> dict:
        out: dict = {"sorts": list(self.sorts), "symbols": [s.to_json() for s in self.symbols]}
        if self.numerals is not None:
            out["numerals"] = self.numerals
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "Signature":
        if not isinstance(obj, Mapping):
            raise SignatureError("signature must be a JSON object")
        symbols = obj.get("symbols", [])
        if not isinstance(symbols, list):
            raise SignatureError("signature field 'symbols' must be a list")
        return cls(
            tuple(obj.get("sorts", ())),
            tuple(SymbolDecl.from_json(s) for s in symbols),
            obj.get("numerals"),
        )


def prime_signature(sig: Signature) -> Signature:
    """Rename every non-rigid symbol ``s`` to ``s'``; rigid symbols stay.

    Priming twice gives double-primed names, as in Σ''.
    """
    return sig.rename({s.name: prime_name(s.name) for s in sig.non_rigid})


def prime_map(sig: Signature, times: int = 1) -> dict[str, str]:
    return {s.name: s.name + PRIME * times for s in sig.non_rigid}
