from hypothesis import given, settings, strategies as st

from hodatalog import choice_block, classify_order, parse_program, stratify, typecheck
from hodatalog.analysis import check_stratification, find_existential_pred_vars, order_of
from hodatalog.genlib import (gen_choice_rules, gen_counter, gen_hamilton, gen_tm_simulation,
                              guess_machine, parity_machine)
from hodatalog.syntax import BOOL, IOTA, Arrow, parse_program as pp

I_I_O = Arrow(IOTA, Arrow(IOTA, BOOL))

pred_types = st.recursive(
    st.just(BOOL),
    lambda inner: st.builds(Arrow, st.one_of(st.just(IOTA), inner), inner),
    max_leaves=6)


def test_order_examples():
    assert order_of(IOTA) == 0
    assert order_of(BOOL) == 1
    assert order_of(I_I_O) == 1
    assert order_of(Arrow(I_I_O, BOOL)) == 2


def _args(t):
    out = []
    while isinstance(t, Arrow):
        out.append(t.arg)
        t = t.result
    return out


@given(pred_types)
def test_order_identity(t):
    args = _args(t)
    if args:
        assert order_of(t) == 1 + max(order_of(a) for a in args)
    else:
        assert order_of(t) == 1


def test_hamilton_order_and_existential():
    prog = gen_hamilton()
    tp = typecheck(prog)
    assert classify_order(tp).k == 2
    rule = next(r for r in prog.rules if r.head == "hamilton")
    assert find_existential_pred_vars(rule, tp) == [("Ord", I_I_O)]
    nons = next(r for r in prog.rules if r.head == "nonsubset")
    assert find_existential_pred_vars(nons, tp) == []
    ex = dict(tp.existentials[prog.rules.index(nons)])
    assert ex == {"X": IOTA, "Y": IOTA}


def test_first_order_program_has_order_one():
    tp = typecheck(parse_program("#pred e : i -> i -> o.\n#pred t : i -> i -> o.\n"
                                 "t(X,Y) :- e(X,Y).\nt(X,Y) :- e(X,Z), t(Z,Y)."))
    assert classify_order(tp).k == 1


def test_second_order_counter_is_order_three():
    tp = typecheck(gen_counter(2, 0))
    assert classify_order(tp).k == 3


def test_ground_rule_has_no_existentials():
    prog = parse_program("#pred p : o.\n#pred q : o.\np :- q.")
    assert find_existential_pred_vars(prog.rules[0], typecheck(prog)) == []


def test_stratify_hamilton():
    res = stratify(typecheck(gen_hamilton()))
    assert res.stratified
    assert res.strata["hamilton"] > res.strata["subset"] > res.strata["nonsubset"]
    assert check_stratification(gen_hamilton(), res.strata) == []


def test_self_negation_unstratified():
    res = stratify(parse_program("#pred p : o.\np :- not p."))
    assert not res.stratified
    assert res.witness[0] == 0 and res.witness[2] == "p"


def test_argument_position_is_strict():
    # q occurs as an argument, so its stratum must be below p's
    prog = parse_program("#pred q : i -> o.\n#pred h : (i -> o) -> o.\n#pred p : o.\n"
                         "q(X) :- X = a.\nh(R) :- R(a).\np :- h(q).")
    res = stratify(prog)
    assert res.stratified and res.strata["q"] < res.strata["p"]
    prog2 = parse_program("#pred h : (i -> o) -> o.\n#pred p : i -> o.\n"
                          "h(R) :- R(a).\np(X) :- h(p), X = a.")
    assert not stratify(prog2).stratified


def test_choice_block_unstratified_but_candidate():
    prog = gen_choice_rules("t", 3)
    assert not stratify(prog).stratified
    ca = choice_block(prog)
    assert ca.candidate and ca.choice_preds == {"b_t_1", "b_t_2", "b_t_3"}


def test_choice_block_with_outside_guard():
    prog = parse_program("#pred d : i -> o.\n#pred b1 : i -> o.\n#pred b2 : i -> o.\n"
                         "b1(T) :- d(T), not b2(T).\nb2(T) :- d(T), not b1(T).")
    assert choice_block(prog).candidate


def test_odd_loop_is_not_a_choice():
    prog = parse_program("#pred p : o.\n#pred q : o.\np :- not q.\nq :- p.")
    assert not choice_block(prog).candidate


def test_generated_programs_stratify():
    assert stratify(gen_tm_simulation(parity_machine(), 1, 2)).stratified
    nd = gen_tm_simulation(guess_machine(), 1, 2, nondet="cautious")
    assert not stratify(nd).stratified
    assert choice_block(nd).candidate


_RULES = st.lists(st.tuples(st.sampled_from("pqrs"),
                            st.lists(st.tuples(st.booleans(), st.sampled_from("pqrs")),
                                     max_size=3)), min_size=1, max_size=6)


@settings(max_examples=80, deadline=None)
@given(_RULES)
def test_strata_recheck(rules):
    lines = [f"#pred {a} : o." for a in "pqrs"]
    for h, body in rules:
        lits = [("not " if neg else "") + a for neg, a in body]
        lines.append(f"{h} :- {', '.join(lits)}." if lits else f"{h}.")
    prog = pp("\n".join(lines))
    res = stratify(prog)
    # oracle: unstratified iff a negative edge lies on a dependency cycle
    edges = {(a, h, neg) for h, body in rules for neg, a in body}
    reach = {(a, h) for a, h, _ in edges}
    while True:
        more = {(x, z) for x, y in reach for y2, z in reach if y == y2} - reach
        if not more:
            break
        reach |= more
    cyclic_neg = any(neg and (h, a) in reach for a, h, neg in edges)
    assert res.stratified == (not cyclic_neg)
    if res.stratified:
        assert check_stratification(prog, res.strata) == []
    else:
        assert res.witness is not None
