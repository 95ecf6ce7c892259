"""Finite structures, words, and their JSON form."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .signature import Signature, SignatureError, SymbolDecl


class StructureError(ValueError):
    pass


class DomainError(StructureError):
    pass


def default_domains(sorts: Iterable[str], size: int | Mapping[str, int]) -> dict[str, tuple[str, ...]]:
    """Element ids ``S_0, S_1, ...`` per sort."""
    out = {}
    for s in sorts:
        n = size[s] if isinstance(size, Mapping) else size
        out[s] = tuple(f"{s}_{i}" for i in range(n))
    return out


def _tuples(sym: SymbolDecl, domains: Mapping[str, tuple]) -> list[tuple]:
    return list(itertools.product(*(domains[s] for s in sym.args)))


class Structure:
    """An explicit interpretation of a signature over finite domains.

    Predicates are frozensets of argument tuples, functions are dicts from
    argument tuples to elements, constants are elements.  Instances are
    treated as immutable and hash by content.
    """

    __slots__ = ("sig", "domains", "constants", "functions", "predicates", "_key")

    def __init__(
        self,
        sig: Signature,
        domains: Mapping[str, Iterable[str]],
        constants: Mapping[str, str] | None = None,
        functions: Mapping[str, Mapping[tuple, str]] | None = None,
        predicates: Mapping[str, Iterable[tuple]] | None = None,
        check: bool = True,
    ):
        self.sig = sig
        self.domains = {s: tuple(d) for s, d in domains.items()}
        self.constants = dict(constants or {})
        self.functions = {k: dict(v) for k, v in (functions or {}).items()}
        self.predicates = {k: frozenset(tuple(t) for t in v) for k, v in (predicates or {}).items()}
        if check:
            self._check()
        self._key = (
            tuple(sorted(self.domains.items())),
            tuple(sorted(self.constants.items())),
            tuple(sorted((k, tuple(sorted(v.items()))) for k, v in self.functions.items())),
            tuple(sorted((k, tuple(sorted(v))) for k, v in self.predicates.items())),
        )

    def _check(self):
        for s in self.sig.sorts:
            if s not in self.domains:
                raise DomainError(f"no domain given for sort {s}")
            if not self.domains[s]:
                raise DomainError(f"domain of sort {s} is empty")
        for sym in self.sig:
            if sym.kind == "constant":
                if sym.name not in self.constants:
                    raise StructureError(f"constant {sym.name} is not interpreted")
                if self.constants[sym.name] not in self.domains[sym.result]:
                    raise DomainError(f"value of {sym.name} is not in the domain of {sym.result}")
            elif sym.kind == "function":
                table = self.functions.get(sym.name)
                if table is None:
                    raise StructureError(f"function {sym.name} is not interpreted")
                for t in _tuples(sym, self.domains):
                    if t not in table:
                        raise StructureError(f"function {sym.name} is undefined on {t}")
                    if table[t] not in self.domains[sym.result]:
                        raise DomainError(f"{sym.name}{t} is not in the domain of {sym.result}")
                if len(table) != len(_tuples(sym, self.domains)):
                    raise StructureError(f"function {sym.name} has entries outside its domain")
            else:
                if sym.name not in self.predicates:
                    raise StructureError(f"predicate {sym.name} is not interpreted")
                for t in self.predicates[sym.name]:
                    if len(t) != sym.arity or any(e not in self.domains[s] for e, s in zip(t, sym.args)):
                        raise DomainError(f"tuple {t} of {sym.name} does not type-check")
        names = set(self.sig.names)
        for table in (self.constants, self.functions, self.predicates):
            for k in table:
                if k not in names:
                    raise StructureError(f"symbol {k} is not in the signature")

    def __eq__(self, other):
        return isinstance(other, Structure) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Structure({self.describe()})"

    def interp(self) -> dict:
        """Flat symbol -> value map used by the evaluator."""
        out: dict = {}
        out.update(self.constants)
        out.update(self.functions)
        out.update(self.predicates)
        return out

    def value(self, name: str):
        sym = self.sig[name]
        if sym.kind == "constant":
            return self.constants[name]
        if sym.kind == "function":
            return self.functions[name]
        return self.predicates[name]

    def holds(self, name: str, *args) -> bool:
        return tuple(args) in self.predicates[name]

    def restrict(self, names: Iterable[str]) -> "Structure":
        keep = set(names)
        sig = self.sig.restrict(keep)
        return Structure(
            sig,
            self.domains,
            {k: v for k, v in self.constants.items() if k in keep},
            {k: v for k, v in self.functions.items() if k in keep},
            {k: v for k, v in self.predicates.items() if k in keep},
            check=False,
        )

    def rename(self, mapping: Mapping[str, str]) -> "Structure":
        m = lambda k: mapping.get(k, k)  # noqa: E731
        return Structure(
            self.sig.rename(mapping),
            self.domains,
            {m(k): v for k, v in self.constants.items()},
            {m(k): v for k, v in self.functions.items()},
            {m(k): v for k, v in self.predicates.items()},
            check=False,
        )

    def describe(self) -> str:
        """Compact one-line summary, e.g. ``p=1 c=S_0 q={(S_1)}``."""
        parts = []
        for sym in self.sig:
            if sym.kind == "constant":
                parts.append(f"{sym.name}={self.constants[sym.name]}")
            elif sym.kind == "function":
                items = ", ".join(
                    f"{','.join(k)}->{v}" for k, v in sorted(self.functions[sym.name].items())
                )
                parts.append(f"{sym.name}={{{items}}}")
            elif sym.is_proposition:
                parts.append(f"{sym.name}={int(() in self.predicates[sym.name])}")
            else:
                items = ", ".join(f"({','.join(t)})" for t in sorted(self.predicates[sym.name]))
                parts.append(f"{sym.name}={{{items}}}")
        return " ".join(parts)

    def to_json(self) -> dict:
        consts, funcs, preds = {}, {}, {}
        for sym in self.sig:
            if sym.kind == "constant":
                consts[sym.name] = self.constants[sym.name]
            elif sym.kind == "function":
                funcs[sym.name] = [list(k) + [v] for k, v in sorted(self.functions[sym.name].items())]
            elif sym.is_proposition:
                preds[sym.name] = () in self.predicates[sym.name]
            else:
                preds[sym.name] = [list(t) for t in sorted(self.predicates[sym.name])]
        return {"constants": consts, "functions": funcs, "predicates": preds}

    @classmethod
    def from_json(cls, sig: Signature, domains: Mapping[str, Iterable[str]], obj: Mapping) -> "Structure":
        funcs = {}
        for name, rows in obj.get("functions", {}).items():
            funcs[name] = {tuple(r[:-1]): r[-1] for r in rows}
        preds = {}
        for name, rows in obj.get("predicates", {}).items():
            if isinstance(rows, bool):
                preds[name] = [()] if rows else []
            else:
                preds[name] = [tuple(r) for r in rows]
        return cls(sig, domains, obj.get("constants", {}), funcs, preds)


def join_structures(parts: list[Structure]) -> Structure:
    """Union of structures over pairwise-disjoint signatures."""
    if not parts:
        raise StructureError("nothing to join")
    if len(parts) == 1:
        return parts[0]
    sig = parts[0].sig
    try:
        sig = sig.union(*(p.sig for p in parts[1:]))
    except SignatureError as exc:
        raise SignatureError(f"cannot join: {exc}") from None
    domains: dict[str, tuple] = {}
    for p in parts:
        for s, d in p.domains.items():
            if s in domains and domains[s] != d:
                raise DomainError(f"parts disagree on the domain of sort {s}")
            domains[s] = d
    consts, funcs, preds = {}, {}, {}
    for p in parts:
        consts.update(p.constants)
        funcs.update(p.functions)
        preds.update(p.predicates)
    return Structure(sig, domains, consts, funcs, preds, check=False)


def symbol_choices(sym: SymbolDecl, domains: Mapping[str, tuple]) -> list:
    """All interpretations of one symbol, in canonical order."""
    if sym.kind == "constant":
        return list(domains[sym.result])
    rows = _tuples(sym, domains)
    if sym.kind == "function":
        return [dict(zip(rows, vals)) for vals in itertools.product(domains[sym.result], repeat=len(rows))]
    return [
        frozenset(t for t, b in zip(rows, bits) if b)
        for bits in itertools.product((False, True), repeat=len(rows))
    ]


def count_structures(sig: Signature, domains: Mapping[str, tuple]) -> int:
    n = 1
    for sym in sig:
        rows = 1
        for s in sym.args:
            rows *= len(domains[s])
        if sym.kind == "constant":
            n *= len(domains[sym.result])
        elif sym.kind == "function":
            n *= len(domains[sym.result]) ** rows
        else:
            n *= 2**rows
    return n


def enumerate_structures(sig: Signature, domains: Mapping[str, Iterable[str]]) -> Iterator[Structure]:
    """Every structure over ``sig`` with exactly the given domains.

    Symbols vary in declaration order (the first symbol slowest), tuples in
    lexicographic domain order.
    """
    domains = {s: tuple(d) for s, d in domains.items()}
    missing = [s for s in sig.sorts if s not in domains]
    if missing:
        raise DomainError(f"no domain given for sorts {missing}")
    syms = list(sig)
    for combo in itertools.product(*(symbol_choices(s, domains) for s in syms)):
        consts, funcs, preds = {}, {}, {}
        for sym, val in zip(syms, combo):
            if sym.kind == "constant":
                consts[sym.name] = val
            elif sym.kind == "function":
                funcs[sym.name] = val
            else:
                preds[sym.name] = val
        yield Structure(sig, domains, consts, funcs, preds, check=False)


@dataclass(frozen=True)
class Word:
    sig: Signature
    domains: Mapping[str, tuple]
    letters: tuple[Structure, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "domains", {s: tuple(d) for s, d in self.domains.items()})

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __iter__(self):
        return iter(self.letters)

    def __hash__(self):
        return hash(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters and self.domains == other.domains

    def __repr__(self):
        return "Word[" + " ; ".join(l.describe() for l in self.letters) + "]"

    def to_json(self) -> dict:
        return {
            "signature": self.sig.to_json(),
            "domains": {s: list(d) for s, d in self.domains.items()},
            "letters": [l.to_json() for l in self.letters],
        }

    @classmethod
    def from_json(cls, obj: Mapping, sig: Signature | None = None) -> "Word":
        if sig is None:
            if "signature" not in obj:
                raise StructureError("word file needs a 'signature' field")
            sig = Signature.from_json(obj["signature"])
        if "domains" not in obj:
            raise StructureError("word file needs a 'domains' field")
        domains = {s: tuple(d) for s, d in obj["domains"].items()}
        rigid = obj.get("rigid", {})
        letters = []
        for raw in obj.get("letters", []):
            merged = {k: dict(rigid.get(k, {})) for k in ("constants", "functions", "predicates")}
            for k in merged:
                merged[k].update(raw.get(k, {}))
            letters.append(Structure.from_json(sig, domains, merged))
        return cls(sig, domains, tuple(letters))


@dataclass(frozen=True)
class WordViolation:
    index: int
    reason: str

    def __str__(self):
        return f"letter {self.index}: {self.reason}"


def validate_word(word: Word, axioms: Iterable = ()) -> WordViolation | None:
    """None when the word is a proper word modulo the axioms.

    Checks shared domains, rigid-symbol constancy, and every axiom on every
    letter; reports the first violation found.
    """
    from .evaluate import eval_fo

    axioms = list(axioms)
    for i, letter in enumerate(word.letters):
        if letter.domains != word.domains:
            return WordViolation(i, "domains differ from the word's domains")
        if i > 0:
            first = word.letters[0]
            for sym in word.sig.rigid:
                if letter.value(sym.name) != first.value(sym.name):
                    return WordViolation(i, f"rigid symbol {sym.name} changes")
        for ax in axioms:
            if not eval_fo(letter, ax):
                return WordViolation(i, f"axiom violated: {ax}")
    return None


def enumerate_words(
    sig: Signature,
    domains: Mapping[str, Iterable[str]],
    max_len: int,
    min_len: int = 0,
) -> Iterator[Word]:
    """All words over ``sig`` with the given domains, shortest first.

    Rigid symbols are fixed once per word, so every yielded word is valid.
    """
    domains = {s: tuple(d) for s, d in domains.items()}
    rigid_sig = Signature(sig.sorts, sig.rigid, sig.numerals)
    flex_sig = Signature(sig.sorts, sig.non_rigid, sig.numerals)
    rigid_parts = list(enumerate_structures(rigid_sig, domains))
    flex_parts = list(enumerate_structures(flex_sig, domains))
    for n in range(min_len, max_len + 1):
        for r in rigid_parts:
            letters = [_reorder(sig, join_structures([r, f])) for f in flex_parts]
            for combo in itertools.product(letters, repeat=n):
                yield Word(sig, domains, combo)
            if n == 0:
                break


def _reorder(sig: Signature, s: Structure) -> Structure:
    return Structure(sig, s.domains, s.constants, s.functions, s.predicates, check=False)


def letters_of(sig: Signature, domains: Mapping[str, Iterable[str]]) -> dict:
    """Map rigid part -> list of full letters sharing it."""
    domains = {s: tuple(d) for s, d in domains.items()}
    rigid_sig = Signature(sig.sorts, sig.rigid, sig.numerals)
    flex_sig = Signature(sig.sorts, sig.non_rigid, sig.numerals)
    flex_parts = list(enumerate_structures(flex_sig, domains))
    out = {}
    for r in enumerate_structures(rigid_sig, domains):
        out[r] = [_reorder(sig, join_structures([r, f])) for f in flex_parts]
    return out
