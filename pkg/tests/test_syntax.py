import pytest
from hypothesis import given, settings, strategies as st

from hodatalog import ParseError, TypeCheckError, parse_database, parse_program, typecheck
from hodatalog.genlib import gen_counter, gen_hamilton, gen_tm_simulation, immediate_accept_machine
from hodatalog.syntax import (App, Not, PredConst, PredVar, desugar_tuples, format_program,
                              format_type, parse_atom)

from oracles import ground_program_text, random_ground_program

HAM_RULE = "hamilton(X,Y):-ordering(Ord),first(Ord,X),last(Ord,Y),subset(succ(Ord),e)."


def test_hamilton_rule_shape():
    text = format_program(gen_hamilton())
    decls = "\n".join(l for l in text.splitlines() if l.startswith("#pred"))
    r = parse_program(decls + "\n" + HAM_RULE).rules[0]
    assert r.head == "hamilton" and r.head_vars == ("X", "Y")
    assert len(r.body) == 4
    # succ(Ord) is a partial application passed as an argument
    sub = r.body[3]
    assert sub.fun.arg == App(PredConst("succ"), PredVar("Ord"))


def test_self_negation_rule():
    r = parse_program("#pred p : o.\np :- not p.").rules[0]
    assert r.head == "p" and r.head_vars == ()
    assert r.body == (Not(PredConst("p")),)


def test_body_only_individual_variable():
    prog = parse_program("#pred q : i -> o.\nq(X) :- X = Y.")
    tp = typecheck(prog)
    assert [v for v, _ in tp.existentials[0]] == ["Y"]


def test_curried_application():
    prog = parse_program("#pred s : (i -> i -> o) -> i -> i -> o.\n"
                         "#pred r : (i -> i -> o) -> o.\n"
                         "r(O) :- s(O,X,Y).")
    lit = prog.rules[0].body[0]
    assert isinstance(lit, App) and isinstance(lit.fun, App) and isinstance(lit.fun.fun, App)
    assert lit.fun.fun.fun == PredConst("s")


def test_negated_equality_forms():
    a = parse_program("#pred p : i -> o.\np(X) :- not(X = a).").rules[0].body
    b = parse_program("#pred p : i -> o.\np(X) :- not X = a.").rules[0].body
    assert a == b


@pytest.mark.parametrize("text", [
    "#pred p : o\np.",                     # missing terminator
    "#pred p : i->o.\np(X) :- p(X), $.",   # lexical error
    "#pred __x : o.\n__x.",                # reserved prefix
    "#pred p : i->o.\np(X) :- r(X).",      # undeclared predicate
])
def test_parse_errors(text):
    with pytest.raises(ParseError) as e:
        parse_program(text)
    assert "line" in str(e.value)


@pytest.mark.parametrize("text", [
    "#pred p : i -> o.\np(X) :- X.",
    "#pred p : i -> o.\np(X,Y) :- X = Y.",
    "#pred p : i -> i -> o.\np(X,X).",
])
def test_type_errors(text):
    with pytest.raises((TypeCheckError, ParseError)):
        typecheck(parse_program(text))


def test_database_parsing():
    db = parse_database("e(a,b). e(b,c). e(a,b).")
    assert db.schema == {"e": 2}
    assert sorted(db.facts) == [("e", ("a", "b")), ("e", ("b", "c"))]
    empty = parse_database("% nothing\n")
    assert not empty.facts and not empty.schema


@pytest.mark.parametrize("text", ["e(a,X).", "e(a,b). e(a).", "e(a"])
def test_database_errors(text):
    with pytest.raises(ParseError):
        parse_database(text)


def test_parse_atom():
    assert parse_atom("hamilton(a, c)") == ("hamilton", ("a", "c"))
    assert parse_atom("p") == ("p", ())


def test_type_syntax_round_trip():
    prog = parse_program("#pred s : ((i->o)) -> (i->o) -> o.\n")
    assert format_type(prog.declarations["s"]) == "(i->o)->(i->o)->o"


@pytest.mark.parametrize("prog", [
    gen_hamilton(), gen_counter(2, 0), gen_tm_simulation(immediate_accept_machine(), 1, 2)],
    ids=["hamilton", "counter2", "tm"])
def test_round_trip_generated(prog):
    again = parse_program(format_program(prog), allow_reserved=True)
    assert [(r.head, r.head_vars, r.body) for r in again.rules] == \
           [(r.head, r.head_vars, r.body) for r in prog.rules]
    assert again.declarations == prog.declarations


def test_desugar_idempotent():
    prog = gen_hamilton()
    once = desugar_tuples(prog)
    assert desugar_tuples(once) == once


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_round_trip_random(rng):
    text = ground_program_text(random_ground_program(rng))
    prog = parse_program(text)
    again = parse_program(format_program(prog))
    assert [(r.head, r.body) for r in again.rules] == [(r.head, r.body) for r in prog.rules]
