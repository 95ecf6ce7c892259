import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foautomata.core.evaluate import EvaluationError
from foautomata.core.structure import Structure, Word
from foautomata.foltl.parser import ParseError, SortError, parse_formula, parse_term
from foautomata.foltl.semantics import (
    PAST_ROOTED,
    closure,
    is_monodic,
    is_nnf,
    is_pure_past,
    nnf,
    satisfies,
    satisfies_pure_past,
    snf,
    snf_surrogate,
    surrogate_table,
)
from foautomata.foltl.syntax import (
    TOP,
    And,
    Atom,
    Const,
    Eq,
    Exists,
    Forall,
    Next,
    Not,
    Or,
    Release,
    Since,
    Triggered,
    Until,
    Var,
    WeakNext,
    WeakYesterday,
    Yesterday,
    alpha_key,
    free_vars,
    prop,
    to_text,
)

from helpers import mksig

PQ = mksig("p", "q", "r")
p, q, r = prop("p"), prop("q"), prop("r")


def pword(*letters, sig=PQ):
    """Propositional word; each letter is the string of true propositions."""
    return Word(sig, {}, tuple(Structure(sig, {}, predicates={n: {()} if n in l else set() for n in sig.names}) for l in letters))


def test_parse_next_constant_idiom():
    sig = mksig("p:S", "c->S")
    f = parse_formula("exists x:S. p(x) & X (c = x)", sig)
    x = Var("x", "S")
    assert f == Exists(x, And((Atom("p", (x,)), Next(Eq(Const("c"), x)))))


def test_parse_until():
    assert parse_formula("p U q", PQ) == Until(p, q)


def test_parse_free_variable_rejected():
    with pytest.raises(ParseError):
        parse_formula("p(x)", mksig("p:S"))


@pytest.mark.parametrize(
    "text, sig, error",
    [
        ("p(c)", mksig("p:S", "c->T"), SortError),
        ("c = d", mksig("c->S", "d->T"), SortError),
        ("p", mksig("p:S"), ParseError),
        ("f(c)", mksig("f:S->S", "c->S"), ParseError),
    ],
)
def test_parse_sort_errors(text, sig, error):
    with pytest.raises(error):
        parse_formula(text, sig)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_formula("p & & q", PQ)
    assert e.value.pos == 4


def test_reserved_names_need_flag():
    sig = mksig("p", "p'")
    with pytest.raises(ParseError):
        parse_formula("p'", sig)
    assert parse_formula("p'", sig, reserved=True) == prop("p'")


def test_precedence():
    assert parse_formula("p & q | r", PQ) == Or((And((p, q)), r))
    assert parse_formula("X p U q", PQ) == Until(Next(p), q)
    assert parse_formula("!p & q", PQ) == And((Not(p), q))


def test_parse_term_numerals():
    sig = mksig("c->Int", "^plus:Int,Int->Int")
    sig = type(sig)(sig.sorts, sig.symbols, "Int")
    t, sort = parse_term("plus(c, 3)", sig)
    assert sort == "Int"


def test_nnf_examples():
    assert nnf(Not(Until(p, q))) == Release(Not(p), Not(q))
    assert nnf(Not(Not(p))) == p
    x = Var("x", "S")
    assert nnf(Not(Exists(x, Atom("p", (x,))))) == Forall(x, Not(Atom("p", (x,))))
    assert nnf(Not(Next(p))) == WeakNext(Not(p))
    assert nnf(Not(Since(p, q))) == Triggered(Not(p), Not(q))
    assert is_nnf(nnf(parse_formula("!(p -> (q <-> !r))", PQ)))


def test_semantics_examples():
    assert not satisfies(pword("p"), Next(p))
    assert satisfies(pword(""), parse_formula("wX false", PQ))
    assert satisfies(pword("p", ""), Yesterday(p), 1)
    assert satisfies_pure_past(pword("p", ""), Yesterday(p))
    assert satisfies_pure_past(pword("q", "p"), TOP)
    assert not satisfies_pure_past(pword("p"), parse_formula("Y true", PQ))
    assert satisfies_pure_past(pword("p"), WeakYesterday(parse_formula("false", PQ)))


def test_semantics_errors():
    with pytest.raises(EvaluationError):
        satisfies(pword(), p)
    with pytest.raises(IndexError):
        satisfies(pword("p"), p, 1)
    with pytest.raises(ValueError):
        satisfies_pure_past(pword("p"), Next(p))


def test_first_order_semantics():
    sig = mksig("m:S", "c->S")
    d = {"S": ("0", "1")}
    letters = (
        Structure(sig, d, constants={"c": "0"}, predicates={"m": {("1",)}}),
        Structure(sig, d, constants={"c": "1"}, predicates={"m": set()}),
    )
    w = Word(sig, d, letters)
    assert satisfies(w, parse_formula("exists x:S. m(x) & X (c = x)", sig))
    assert not satisfies(w, parse_formula("forall x:S. m(x) -> X m(x)", sig))


def test_classifiers():
    assert is_pure_past(parse_formula("Y p & (q S r)", PQ))
    assert not is_pure_past(parse_formula("Y X p", PQ))
    assert is_monodic(parse_formula("forall x:S. X p(x)", mksig("p:S")))
    assert not is_monodic(parse_formula("forall x:S. forall y:S. X r(x, y)", mksig("r:S,S")))


def test_snf_examples():
    assert snf(Until(p, q)) == Or((q, And((p, Next(Until(p, q))))))
    assert snf(Next(Until(p, q))) == Next(Until(p, q))
    assert snf(Release(p, q)) == And((q, Or((p, WeakNext(Release(p, q))))))


def _keys(cl):
    return {alpha_key(f) for f in cl}


def test_closure_examples():
    assert _keys(closure(Until(p, q))) == {alpha_key(f) for f in (Next(Until(p, q)), Until(p, q), p, q)}
    assert _keys(closure(p)) == {alpha_key(Next(p)), alpha_key(p)}
    yp = Yesterday(p)
    assert _keys(closure(yp, PAST_ROOTED)) == {alpha_key(f) for f in (Yesterday(yp), yp, p)}


def test_surrogates():
    table = surrogate_table(closure(Next(p)))
    assert len(table.XS) == 2 and all(s.decl.arity == 0 for s in table.XS)
    assert {alpha_key(s.formula) for s in table.XS} == {alpha_key(Next(p)), alpha_key(p)}
    table = surrogate_table(closure(Until(p, q)))
    table.lookup("xs", Until(p, q))
    f = parse_formula("forall y:S. X (exists x:S. m(x) & X m(x))", mksig("m:S"))
    table = surrogate_table(closure(f))
    arities = sorted(s.decl.arity for s in table.XS)
    assert arities == [0, 0, 1]
    assert all(s.name.startswith("xs$") for s in table)


def test_surrogate_names_are_alpha_invariant():
    sig = mksig("m:S")
    a = surrogate_table(closure(parse_formula("exists x:S. m(x)", sig)))
    b = surrogate_table(closure(parse_formula("exists y:S. m(y)", sig)))
    assert [s.name for s in a] == [s.name for s in b]


def test_snf_surrogate_examples():
    phi = Until(p, q)
    table = surrogate_table(closure(phi))
    xs = table.lookup("xs", phi).name
    assert snf_surrogate(phi, table, primed=True) == Or((q, And((p, Atom(xs + "'")))))
    assert snf_surrogate(p, table) == p
    table = surrogate_table(closure(Yesterday(p), PAST_ROOTED))
    assert snf_surrogate(Yesterday(p), table) == Atom(table.lookup("ys", p).name)


# -- properties --------------------------------------------------------------

atoms = st.sampled_from([p, q, r, TOP])


def _extend(children):
    return st.one_of(
        children.map(Not),
        st.tuples(children, children).map(lambda t: And(t)),
        st.tuples(children, children).map(lambda t: Or(t)),
        children.map(Next),
        children.map(WeakNext),
        children.map(Yesterday),
        children.map(WeakYesterday),
        st.tuples(children, children).map(lambda t: Until(*t)),
        st.tuples(children, children).map(lambda t: Release(*t)),
        st.tuples(children, children).map(lambda t: Since(*t)),
        st.tuples(children, children).map(lambda t: Triggered(*t)),
    )


formulas = st.recursive(atoms, _extend, max_leaves=6)
words = st.lists(st.sampled_from(["", "p", "q", "pq", "pr", "qr"]), min_size=1, max_size=4).map(lambda ls: pword(*ls))


@settings(max_examples=150, deadline=None)
@given(formulas)
def test_print_parse_round_trip(f):
    assert parse_formula(to_text(f), PQ) == f


@settings(max_examples=150, deadline=None)
@given(formulas, words)
def test_nnf_preserves_truth(f, w):
    g = nnf(f)
    assert is_nnf(g)
    for i in range(len(w)):
        assert satisfies(w, f, i) == satisfies(w, g, i)


@settings(max_examples=150, deadline=None)
@given(formulas, words)
def test_snf_preserves_truth(f, w):
    g = nnf(f)
    for i in range(len(w)):
        assert satisfies(w, g, i) == satisfies(w, snf(g), i)


@settings(max_examples=100, deadline=None)
@given(formulas)
def test_closure_is_closed(f):
    cl = closure(nnf(f))
    for g in cl:
        if isinstance(g, Until):
            assert Next(g) in cl
        if isinstance(g, Since):
            assert Yesterday(g) in cl
    assert not free_vars(f)
