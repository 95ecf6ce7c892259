import pytest

from foautomata.automaton.algebra import (
    complement_deterministic,
    concatenation,
    intersection,
    kleene_star,
    sigma11_to_fo,
    top_automaton,
    union,
)
from foautomata.automaton.model import (
    DATA_CONTROL,
    FINITE_CONTROL,
    GENERAL,
    MONADIC,
    Automaton,
    AutomatonError,
    Sigma11Automaton,
    classify,
)
from foautomata.automaton.oracle import (
    DeterminismViolation,
    Oracle,
    check_completeness_bounded,
    check_determinism_bounded,
    initial_state_deterministic,
    step_deterministic,
)
from foautomata.compile.encode import encode_foltl, encode_pure_past
from foautomata.core.signature import Signature
from foautomata.core.structure import Structure, Word
from foautomata.foltl.parser import parse_formula
from foautomata.foltl.semantics import satisfies_pure_past

from helpers import auto, languages, mksig, words

PQ = mksig("p", "q")
EMPTY = Signature()
D2 = {"S": ("0", "1")}


def one_letter(sig, cond):
    return auto(sig, mksig("done"), "!done", f"!done & done' & ({cond})", "done")


def pletter(*true, sig=PQ):
    return Structure(sig, {}, predicates={n: {()} if n in true else set() for n in sig.names})


def test_top_and_bottom():
    lang = languages(top_automaton(PQ), 2)[()]
    assert len(lang) == 1 + 4 + 16
    nothing = auto(PQ, EMPTY, "true", "true", "false")
    assert languages(nothing, 3)[()] == set()


REACH_SIGMA = mksig("^s->S", "^d->S", "e:S,S")


def reachability():
    return auto(
        REACH_SIGMA, mksig("P:S"), "true",
        "P(s) & (forall x:S. forall y:S. P(x) & e(x, y) -> P(y)) & !P(d)", "true",
    )


def test_reachability_automaton():
    a = reachability()
    o = Oracle(a, D2)
    edge = Structure(REACH_SIGMA, D2, constants={"s": "0", "d": "1"}, predicates={"e": {("0", "1")}})
    none = Structure(REACH_SIGMA, D2, constants={"s": "0", "d": "1"}, predicates={"e": set()})
    assert not o.accepts(Word(REACH_SIGMA, D2, (edge,)))
    assert o.accepts(Word(REACH_SIGMA, D2, (none,)))
    assert o.accepts(Word(REACH_SIGMA, D2, ()))
    assert not o.accepts(Word(REACH_SIGMA, D2, (none, edge)))


def test_reachability_as_sigma11():
    so = auto(
        REACH_SIGMA, Signature(("S",)), "true",
        "exists2 [P(S)]. P(s) & (forall x:S. forall y:S. P(x) & e(x, y) -> P(y)) & !P(d)", "true",
    )
    assert isinstance(so, Sigma11Automaton) and so.is_sigma11
    fo = sigma11_to_fo(so)
    assert not fo.is_sigma11 and len(fo.gamma) == 1
    assert languages(fo, 2) == languages(reachability(), 2)


def test_sigma11_to_fo_identity():
    a = one_letter(PQ, "p")
    assert sigma11_to_fo(a) == a


def test_automaton_validation():
    t = parse_formula("true", PQ)
    with pytest.raises(AutomatonError):
        Automaton(PQ, mksig("p"), t, t, t)
    with pytest.raises(AutomatonError):
        auto(PQ, mksig("s"), "true", "true", "p")
    with pytest.raises(AutomatonError):
        Automaton(PQ, mksig("^s"), parse_formula("true", PQ), parse_formula("true", PQ), parse_formula("true", PQ))


def test_json_round_trip():
    for a in (reachability(), encode_foltl(parse_formula("p U q", PQ), PQ), kleene_star(one_letter(PQ, "p"))):
        b = Automaton.loads(a.dumps())
        assert b == a and type(b) is type(a)
        assert b.dumps() == a.dumps()
    with pytest.raises(AutomatonError):
        Automaton.from_json({"init": "true"})


def test_union_intersection_identities():
    a = encode_foltl(parse_formula("p U q", PQ), PQ)
    la = languages(a, 3)
    assert languages(intersection(a, top_automaton(PQ)), 3) == la
    assert languages(union(a, a), 3) == la


def test_union_is_language_union():
    a1, a2 = one_letter(PQ, "p"), encode_foltl(parse_formula("X q", PQ), PQ)
    l1, l2, lu = languages(a1, 2), languages(a2, 2), languages(union(a1, a2), 2)
    assert lu[()] == l1[()] | l2[()]


def test_concat_annihilator():
    nothing = auto(PQ, EMPTY, "true", "true", "false")
    assert languages(sigma11_to_fo(concatenation(nothing, one_letter(PQ, "q"))), 3)[()] == set()


def test_concat_single_letters():
    c = concatenation(one_letter(PQ, "p"), one_letter(PQ, "q"))
    assert isinstance(c, Sigma11Automaton)
    lang = languages(c, 3)[()]
    assert lang and all(len(w) == 2 and w[0].holds("p") and w[1].holds("q") for w in lang)
    assert len(lang) == 4


def test_concat_drops_empty_second_part():
    # With the empty word in L2 the construction yields L1.(L2 minus it).
    a1 = one_letter(PQ, "p")
    lang = languages(concatenation(a1, top_automaton(PQ)), 2)[()]
    assert not any(len(w) == 1 for w in lang)
    assert all(len(w) == 2 and w[0].holds("p") for w in lang)


def test_concat_first_order_form_same_language():
    c = concatenation(one_letter(PQ, "p"), one_letter(PQ, "q"))
    assert languages(sigma11_to_fo(c), 2) == languages(c, 2)


def test_star_examples():
    nothing = auto(PQ, EMPTY, "true", "true", "false")
    assert languages(kleene_star(nothing), 3)[()] == set()
    star = languages(kleene_star(one_letter(PQ, "p")), 3)[()]
    assert star == {w for w in languages(top_automaton(PQ), 3)[()] if w and all(l.holds("p") for l in w)}
    assert () not in star


def test_star_contains_square():
    a = one_letter(PQ, "p | q")
    la = languages(a, 2)[()]
    ls = languages(kleene_star(a), 2)[()]
    assert {u + v for u in la for v in la} <= ls


def test_complement_of_top_is_empty():
    assert languages(complement_deterministic(top_automaton(PQ)), 3)[()] == set()


def test_double_complement():
    a = encode_pure_past(parse_formula("Y p | q", PQ), PQ)
    cc = complement_deterministic(complement_deterministic(a))
    assert languages(cc, 3) == languages(a, 3)


def test_complement_of_pure_past():
    a = complement_deterministic(encode_pure_past(parse_formula("Y p", PQ), PQ))
    lang = languages(a, 3, min_len=1)[()]
    for w in words(PQ, 3, min_len=1):
        assert (w.letters in lang) == (not satisfies_pure_past(w, parse_formula("Y p", PQ)))


def test_complement_needs_determinism():
    # Guessing s freely accepts everything; so does the "complement".
    a = auto(PQ, mksig("s"), "true", "true", "s")
    la = languages(a, 2)[()]
    lc = languages(complement_deterministic(a), 2)[()]
    assert la & lc == la


@pytest.mark.parametrize(
    "gamma, expected",
    [
        (mksig("p0"), FINITE_CONTROL),
        (mksig("a->Int", "n->Int"), DATA_CONTROL),
        (mksig("P:S"), MONADIC),
        (mksig("P:S", "q"), MONADIC),
        (mksig("R:S,S"), GENERAL),
        (mksig("f:S->S"), GENERAL),
    ],
)
def test_classify(gamma, expected):
    a = Automaton(Signature(gamma.sorts), gamma, *(parse_formula("true", gamma),) * 3)
    assert classify(a) == expected


def test_determinism_checks():
    yp = encode_pure_past(parse_formula("Y p", PQ), PQ)
    assert check_determinism_bounded(yp) and check_completeness_bounded(yp)
    free = auto(PQ, mksig("s"), "!s", "true", "true")
    assert not check_determinism_bounded(free)
    stuck = auto(PQ, mksig("s"), "!s", "false", "true")
    res = check_completeness_bounded(stuck)
    assert not res and "no successor" in str(res)


def test_step_pure_past():
    a = encode_pure_past(parse_formula("Y p", PQ), PQ)
    s0 = initial_state_deterministic(a, {})
    assert not any(s0.holds(n) for n in a.gamma.names)
    s1 = step_deterministic(s0, pletter("p"), a)
    ys_p = [s.name for s in a.gamma if s.name != str(a.final)]
    assert s1.holds(ys_p[0]) and not s1.holds(str(a.final))
    assert step_deterministic(s0, pletter(), a) == s0


def test_step_nondeterministic():
    a = auto(PQ, mksig("s"), "!s", "true", "true")
    s0 = initial_state_deterministic(a, {})
    with pytest.raises(DeterminismViolation):
        step_deterministic(s0, pletter(), a)


def test_oracle_run_witness():
    a = encode_foltl(parse_formula("X p", PQ), PQ)
    o = Oracle(a, {})
    w = Word(PQ, {}, (pletter(), pletter("p")))
    run = o.run(w)
    assert run is not None and len(run) == 3
    assert o.run(Word(PQ, {}, (pletter("p"),))) is None
