"""Brute-force acceptance over explicit finite structures.

The oracle enumerates state structures with the backtracking model search
of :mod:`foautomata.core.evaluate`.  Reachable state sets are propagated
letter by letter, so a run is never materialized unless asked for.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from ..core.evaluate import EvaluationError, ResourceError, compile_formula, find_models
from ..core.signature import Signature, prime_name
from ..core.structure import Structure, Word, enumerate_structures, join_structures, letters_of
from ..foltl.syntax import symbols_of
from .model import Automaton


class DeterminismViolation(RuntimeError):
    pass


def _state(gamma: Signature, domains, values: Mapping) -> Structure:
    consts, funcs, preds = {}, {}, {}
    for sym in gamma:
        v = values[sym.name]
        if sym.kind == "constant":
            consts[sym.name] = v
        elif sym.kind == "function":
            funcs[sym.name] = v
        else:
            preds[sym.name] = v
    return Structure(gamma, domains, consts, funcs, preds, check=False)


class Oracle:
    """Memoizing acceptance checker for one automaton and fixed domains.

    ``budget`` bounds the number of search nodes per model search.
    """

    def __init__(self, a: Automaton, domains: Mapping[str, Iterable[str]], budget: int | None = 2_000_000):
        self.a = a
        self.domains = {s: tuple(d) for s, d in domains.items()}
        for s in a.gamma.sorts:
            if s not in self.domains and any(s in (d.args + ((d.result,) if d.result else ())) for d in a.gamma):
                raise EvaluationError(f"no domain for state sort {s}")
        self.budget = budget
        self.primed = [d.renamed(prime_name(d.name)) for d in a.gamma]
        self.unprime = {prime_name(d.name): d.name for d in a.gamma}
        self.rigid_sigma = [s.name for s in a.sigma.rigid]
        self._init: dict = {}
        self._succ: dict = {}
        self._step: dict = {}
        self._final: dict = {}
        for label, f in (("initial", a.init), ("final", a.final)):
            if symbols_of(f) & set(self.rigid_sigma):
                setattr(self, f"_{label}_uses_sigma", True)
            else:
                setattr(self, f"_{label}_uses_sigma", False)

    def _rigid_interp(self, letter: Structure | None) -> dict:
        if letter is None:
            return {}
        return {n: letter.value(n) for n in self.rigid_sigma}

    def _rigid_key(self, letter):
        if letter is None or not self.rigid_sigma:
            return None
        return tuple((n, _freeze(letter.value(n))) for n in self.rigid_sigma)

    def initial_states(self, first_letter: Structure | None = None) -> frozenset:
        if first_letter is None and self._initial_uses_sigma:
            raise EvaluationError("initial condition mentions word symbols; the empty word cannot fix them")
        key = self._rigid_key(first_letter) if self._initial_uses_sigma else None
        if key not in self._init:
            fixed = self._rigid_interp(first_letter) if self._initial_uses_sigma else {}
            self._init[key] = frozenset(
                _state(self.a.gamma, self.domains, m)
                for m in find_models(self.a.init, fixed, list(self.a.gamma), self.domains, self.budget)
            )
        return self._init[key]

    def is_final(self, state: Structure, letter: Structure | None = None) -> bool:
        if letter is None and self._final_uses_sigma:
            raise EvaluationError("acceptance condition mentions word symbols; the empty word cannot fix them")
        key = (state, self._rigid_key(letter) if self._final_uses_sigma else None)
        v = self._final.get(key)
        if v is None:
            interp = state.interp()
            if self._final_uses_sigma:
                interp.update(self._rigid_interp(letter))
            v = compile_formula(self.a.final)(interp, self.domains, {}) is True
            self._final[key] = v
        return v

    def successors(self, state: Structure, letter: Structure) -> frozenset:
        key = (state, letter)
        out = self._succ.get(key)
        if out is None:
            fixed = state.interp()
            fixed.update(letter.interp())
            found = []
            for m in find_models(self.a.trans, fixed, self.primed, self.domains, self.budget):
                found.append(_state(self.a.gamma, self.domains, {self.unprime[k]: v for k, v in m.items()}))
            out = frozenset(found)
            self._succ[key] = out
        return out

    def step(self, states: frozenset, letter: Structure) -> frozenset:
        key = (states, letter)
        out = self._step.get(key)
        if out is None:
            acc = set()
            for s in states:
                acc |= self.successors(s, letter)
            out = frozenset(acc)
            self._step[key] = out
        return out

    def reachable(self, word: Word) -> frozenset:
        states = self.initial_states(word.letters[0] if len(word) else None)
        for letter in word.letters:
            if not states:
                break
            states = self.step(states, letter)
        return states

    def accepts(self, word: Word) -> bool:
        first = word.letters[0] if len(word) else None
        return any(self.is_final(s, first) for s in self.reachable(word))

    def run(self, word: Word) -> list[Structure] | None:
        """One accepting run, or None."""
        first = word.letters[0] if len(word) else None
        layers = [self.initial_states(first)]
        for letter in word.letters:
            layers.append(self.step(layers[-1], letter))
        finals = [s for s in layers[-1] if self.is_final(s, first)]
        if not finals:
            return None
        path = [finals[0]]
        for i in range(len(word) - 1, -1, -1):
            nxt = path[-1]
            for s in layers[i]:
                if nxt in self.successors(s, word.letters[i]):
                    path.append(s)
                    break
        return list(reversed(path))

    def language(self, sigma: Signature, max_len: int, min_len: int = 0) -> set:
        """Accepted words up to ``max_len`` as tuples of letters.

        Rigid word symbols are held fixed along each word; prefixes share
        their reachable state sets.
        """
        out: set = set()
        word_domains = {s: self.domains[s] for s in sigma.sorts}
        for rigid, letters in letters_of(sigma, word_domains).items():
            if min_len == 0 and not (self._initial_uses_sigma or self._final_uses_sigma):
                init = self.initial_states(None)
                if any(self.is_final(s) for s in init):
                    out.add(())
            if max_len == 0 or not letters:
                continue
            init = self.initial_states(letters[0])
            first = letters[0]

            def dfs(prefix, states):
                if len(prefix) >= max(min_len, 1) and any(self.is_final(s, first) for s in states):
                    out.add(tuple(prefix))
                if len(prefix) == max_len or not states:
                    return
                for l in letters:
                    prefix.append(l)
                    dfs(prefix, self.step(states, l))
                    prefix.pop()

            for l in letters:
                dfs([l], self.step(init, l))
        return out


def _freeze(v):
    if isinstance(v, dict):
        return tuple(sorted(v.items()))
    return v


def accepts_oracle(
    a: Automaton,
    word: Word,
    state_domains: Mapping[str, Iterable[str]] | None = None,
    budget: int | None = 2_000_000,
) -> bool:
    """Whether some run of ``a`` over ``word`` ends in an accepting state."""
    domains = dict(word.domains)
    for s, d in (state_domains or {}).items():
        d = tuple(d)
        if s in domains and domains[s] != d:
            raise EvaluationError(f"state domain of {s} differs from the word's domain")
        domains[s] = d
    return Oracle(a, domains, budget).accepts(word)


def oracle_language(a: Automaton, domains, max_len: int, min_len: int = 0, budget=2_000_000) -> set:
    return Oracle(a, domains, budget).language(a.sigma, max_len, min_len)


def word_tuples(sigma: Signature, domains, max_len: int, min_len: int = 0) -> set:
    """Every word up to ``max_len`` as tuples of letters (the oracle space)."""
    out = set()
    domains = {s: tuple(d) for s, d in domains.items() if s in sigma.sorts}
    for rigid, letters in letters_of(sigma, domains).items():
        for n in range(min_len, max_len + 1):
            if n == 0:
                out.add(())
                continue
            out.update(itertools.product(letters, repeat=n))
    return out


# -- bounded determinism and completeness -----------------------------------


@dataclass
class BoundedCheck:
    ok: bool
    what: str
    counterexample: object = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return self.what
        return f"{self.what}: {self.counterexample}"


def domain_assignments(sorts: Iterable[str], bound: int) -> Iterator[dict]:
    sorts = list(sorts)
    for sizes in itertools.product(range(1, bound + 1), repeat=len(sorts)):
        yield {s: tuple(f"{s}_{i}" for i in range(n)) for s, n in zip(sorts, sizes)}


def _canonical(struct: Structure) -> tuple:
    """Smallest relabelling of ``struct``; equal iff isomorphic."""
    sorts = list(struct.domains)
    best = None
    perms = [list(itertools.permutations(struct.domains[s])) for s in sorts]
    for choice in itertools.product(*perms):
        ren = {}
        for s, p in zip(sorts, choice):
            ren.update(dict(zip(p, struct.domains[s])))
        key = (
            tuple(sorted((k, ren[v]) for k, v in struct.constants.items())),
            tuple(sorted((k, tuple(sorted((tuple(ren[e] for e in a), ren[r]) for a, r in t.items())))
                         for k, t in struct.functions.items())),
            tuple(sorted((k, tuple(sorted(tuple(ren[e] for e in row) for row in t)))
                         for k, t in struct.predicates.items())),
        )
        if best is None or key < best:
            best = key
    return best


def _all_sorts(a: Automaton) -> list[str]:
    used = []
    for sig in (a.sigma, a.gamma):
        for sym in sig:
            for s in sym.args + ((sym.result,) if sym.result else ()):
                if s not in used:
                    used.append(s)
    return used


def _pairs(a: Automaton, domains) -> Iterator[tuple[Structure, Structure]]:
    for letter in enumerate_structures(a.sigma, domains):
        for state in enumerate_structures(a.gamma, domains):
            yield state, letter


def check_determinism_bounded(a: Automaton, bound: int = 2, budget: int | None = 2_000_000) -> BoundedCheck:
    """At most one successor for every (state, letter) pair and exactly one
    initial state up to isomorphism, for all domain sizes up to ``bound``."""
    for domains in domain_assignments(_all_sorts(a), bound):
        o = Oracle(a, domains, budget)
        letters = list(enumerate_structures(a.sigma, domains)) if o._initial_uses_sigma else [None]
        for l in letters:
            init = o.initial_states(l)
            classes = {_canonical(s) for s in init}
            if len(classes) != 1:
                return BoundedCheck(False, "not deterministic", f"{len(classes)} initial states up to isomorphism at domains {domains}")
        for state, letter in _pairs(a, domains):
            succ = o.successors(state, letter)
            if len(succ) > 1:
                return BoundedCheck(False, "not deterministic", f"state {state.describe()} with letter {letter.describe()} has {len(succ)} successors")
    return BoundedCheck(True, "deterministic")


def check_completeness_bounded(a: Automaton, bound: int = 2, budget: int | None = 2_000_000) -> BoundedCheck:
    """Every (state, letter) pair has a successor and some initial state exists."""
    for domains in domain_assignments(_all_sorts(a), bound):
        o = Oracle(a, domains, budget)
        letters = list(enumerate_structures(a.sigma, domains)) if o._initial_uses_sigma else [None]
        for l in letters:
            if not o.initial_states(l):
                return BoundedCheck(False, "not complete", f"no initial state at domains {domains}")
        for state, letter in _pairs(a, domains):
            if not o.successors(state, letter):
                return BoundedCheck(False, "not complete", f"state {state.describe()} with letter {letter.describe()} has no successor")
    return BoundedCheck(True, "complete")


def step_deterministic(state: Structure, letter: Structure, a: Automaton, budget: int | None = 2_000_000) -> Structure:
    """The unique successor of ``state`` reading ``letter``."""
    domains = dict(letter.domains)
    domains.update(state.domains)
    succ = Oracle(a, domains, budget).successors(state, letter)
    if len(succ) != 1:
        raise DeterminismViolation(
            f"{len(succ)} successors for state {state.describe()} and letter {letter.describe()}"
        )
    return next(iter(succ))


def initial_state_deterministic(a: Automaton, domains, first_letter: Structure | None = None, budget=2_000_000) -> Structure:
    init = Oracle(a, domains, budget).initial_states(first_letter)
    if len(init) != 1:
        raise DeterminismViolation(f"{len(init)} initial states")
    return next(iter(init))


__all__ = [
    "Oracle",
    "accepts_oracle",
    "oracle_language",
    "word_tuples",
    "check_determinism_bounded",
    "check_completeness_bounded",
    "step_deterministic",
    "initial_state_deterministic",
    "DeterminismViolation",
    "ResourceError",
    "BoundedCheck",
    "join_structures",
]
