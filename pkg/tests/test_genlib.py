import itertools
import re

import pytest
from hypothesis import given, settings, strategies as st

from hodatalog import (DomainExplosion, GeneratorError, classify_order, format_program,
                       make_database, parse_program, stable_models, stratify, typecheck,
                       well_founded_model)
from hodatalog.analysis import choice_block
from hodatalog.genlib import (TMSpec, copy_bit_machine, counter_constants, encode_tape, exp_k,
                              format_tm, gen_base_counter, gen_choice_rules, gen_counter,
                              gen_hamilton, gen_ho_counter, gen_input_encoding, gen_lift,
                              gen_ordering_module, gen_tm_simulation, guess_machine,
                              immediate_accept_machine, parity_machine, parse_tm, run_counter,
                              tm_oracle, tm_run)

from oracles import binary_chain

ORDER_DB = "#pred o : i -> i -> o.\n"


def _with_queries(prog, extra: str):
    return parse_program(format_program(prog) + ORDER_DB + extra)


def _order_db(n, **facts):
    cs = counter_constants(n)
    rows = [("o", (cs[i], cs[j])) for i in range(n) for j in range(i + 1, n)]
    for p, tuples in facts.items():
        rows += [(p, t) for t in tuples]
    return make_database(rows, constants=cs)


def _sets(text: str):
    """Parse a printed relation such as '{{},{c0}}' into nested frozensets."""
    py = re.sub(r"c\d+", lambda m: repr(m.group(0)), text)
    py = py.replace("{", "frozenset([").replace("}", "])")
    return eval(py)


# ------------------------------------------------------------ ordering

def test_ordering_module_predicates():
    decl = gen_ordering_module().declarations
    for p in ("ordering", "connected", "disconnected", "transitive", "non_transitive",
              "irreflexive", "non_irreflexive", "first", "last", "succ", "nfirst", "nlast",
              "nsequential", "subset", "nonsubset"):
        assert p in decl


@pytest.mark.parametrize("consts,want", [(["a"], 1), (["a", "b"], 2), (["a", "b", "c"], 6)])
def test_strict_total_orders(consts, want):
    from hodatalog.domains import enumerate_domain
    from hodatalog.syntax import IOTA, BOOL, Arrow
    m = well_founded_model(gen_ordering_module(), make_database([], constants=consts))
    rels = enumerate_domain(Arrow(IOTA, Arrow(IOTA, BOOL)), m.cp.universe)
    found = [r for r in rels if m.holds("ordering", (r,))]
    assert len(found) == want
    if len(consts) == 1:
        assert str(found[0]) == "{}"


# ------------------------------------------------------------ counters

def test_base_counter_d1_mixed_radix():
    run = run_counter(0, 1, 2)
    assert run.chain == [("c0", "c0"), ("c1", "c0"), ("c0", "c1"), ("c1", "c1")]
    assert run.ok()


def test_base_counter_lt_clauses():
    for d in (0, 1, 2):
        assert sum(r.head == "lt_0" for r in gen_base_counter(d).rules) == d + 1


@pytest.mark.parametrize("n", [2, 3])
def test_order_one_counter_is_binary(n):
    run = run_counter(1, 0, n)
    assert run.ok()
    want = [frozenset(f"c{j}" for j in bits) for bits in binary_chain(n)]
    assert [_sets(c[0]) for c in run.chain] == want
    assert run.first == [("{}",)]


def test_order_two_counter():
    run = run_counter(2, 0, 2)
    assert len(run.chain) == exp_k(2, 2) == 16 and run.ok()
    order1 = [frozenset(f"c{j}" for j in bits) for bits in binary_chain(2)]
    want = [frozenset(order1[j] for j in range(4) if (i >> j) & 1) for i in range(16)]
    assert [_sets(c[0]) for c in run.chain] == want


def test_counter_orders():
    assert classify_order(typecheck(gen_counter(1, 0))).k == 2
    assert classify_order(typecheck(gen_counter(2, 0))).k == 3
    with pytest.raises(GeneratorError):
        gen_ho_counter(0)


def test_lift_is_functional_and_correct():
    prog = _with_queries(gen_lift(1, 0), "#pred lf : i -> (i -> o) -> o.\nlf(X,M) :- lift_1(o,X,M).\n")
    m = well_founded_model(prog, _order_db(2))
    pairs = {(x, str(v)) for x, v in m.true_atoms("lf")}
    assert pairs == {("c0", "{}"), ("c1", "{c0}")}


def test_input_encoding_cells():
    prog = _with_queries(
        gen_input_encoding(2),
        "#pred one : i -> i -> i -> o.\n#pred zero : i -> i -> i -> o.\n"
        "one(X,Y,Z) :- input_1(c0,c1,o,X,Y,Z).\nzero(X,Y,Z) :- input_0(c0,c1,o,X,Y,Z).\n")
    m = well_founded_model(prog, _order_db(2, **{"in": [("c0", "c1")]}))
    ones = set(m.true_atoms("one"))
    # graph block: cell (c0,c1,first); marker block: (A,B,second)
    assert ones == {("c0", "c1", "c0"), ("c0", "c1", "c1")}
    cells = set(itertools.product(("c0", "c1"), repeat=3))
    assert set(m.true_atoms("zero")) == cells - ones
    with pytest.raises(GeneratorError):
        gen_input_encoding(1)


# ------------------------------------------------------------ choice rules

def test_choice_rules_shapes():
    one = gen_choice_rules("t", 1)
    assert len(one.rules) == 1 and one.rules[0].body == ()
    two = gen_choice_rules("t", 2)
    assert {len(r.body) for r in two.rules} == {1}
    with pytest.raises(GeneratorError):
        gen_choice_rules("t", 0)


@pytest.mark.parametrize("m,size", [(1, 2), (2, 2), (3, 1), (2, 3)])
def test_choice_model_count(m, size):
    prog = gen_choice_rules("t", m)
    models = stable_models(prog, make_database([], constants="xyz"[:size]))
    assert len(models) == m ** size
    for mod in models:
        for c in "xyz"[:size]:
            assert sum(mod.holds(f"b_t_{i}", (c,)) for i in range(1, m + 1)) == 1


# ------------------------------------------------------------ machines

def test_tmspec_validation():
    with pytest.raises(GeneratorError):
        TMSpec("q0", "yes", "yes", {})
    with pytest.raises(GeneratorError):   # not total
        TMSpec("q0", "yes", "no", {("q0", "0"): (("yes", "0", "S"),)})
    with pytest.raises(GeneratorError):   # final state with a move
        TMSpec("q0", "yes", "no", {("yes", "0"): (("q0", "0", "S"),)})
    with pytest.raises(GeneratorError):
        parse_tm("start q0\naccept yes\nq0 0 -> yes 0 S\n")


@pytest.mark.parametrize("tm", [immediate_accept_machine(), copy_bit_machine(2),
                                parity_machine(), guess_machine()],
                         ids=["imm", "copy", "parity", "guess"])
def test_tm_format_round_trip(tm):
    again = parse_tm(format_tm(tm))
    assert again.transitions == tm.transitions
    assert (again.start, again.accept, again.reject) == (tm.start, tm.accept, tm.reject)
    assert again.deterministic == tm.deterministic


def test_tm_run_examples():
    assert tm_run(immediate_accept_machine(), [], 1) == "accept"
    right = TMSpec("q0", "yes", "no", {("q0", a): (("q0", a, "R"),) for a in "01_"})
    assert tm_run(right, ["0"], 50) == "timeout"
    assert tm_run(guess_machine(), ["0"], 3) == {"accept", "reject"}


def test_left_edge_stays_put():
    tm = TMSpec("q0", "yes", "no", {
        ("q0", "0"): (("q1", "1", "L"),), ("q0", "1"): (("no", "1", "S"),), ("q0", "_"): (("no", "_", "S"),),
        ("q1", "0"): (("no", "0", "S"),), ("q1", "1"): (("yes", "1", "S"),), ("q1", "_"): (("no", "_", "S"),)})
    assert tm_run(tm, ["0"], 5) == "accept"


@settings(max_examples=100, deadline=None)
@given(st.sets(st.tuples(st.sampled_from("ab"), st.sampled_from("ab"))),
       st.sampled_from("ab"), st.sampled_from("ab"), st.permutations("ab"))
def test_machines_on_encoded_tapes(edges, a, b, order):
    tape = encode_tape(order, edges, a, b)
    assert tape.count("1") == len(edges) + 1
    assert tm_run(copy_bit_machine(2), tape, 255) == ("accept" if (a, b) in edges else "reject")
    assert tm_run(parity_machine(), tape, 255) == ("accept" if len(edges) % 2 else "reject")


def test_tm_oracle_orders_do_not_matter_for_copy():
    got = tm_oracle(copy_bit_machine(2), ["a", "b"], {("a", "b")}, 1, 2)
    assert got == {("a", "b")}


def test_simulation_program_shape():
    prog = gen_tm_simulation(parity_machine(), 1, 2)
    tp = typecheck(prog)
    assert classify_order(tp).k == 2
    assert stratify(tp).stratified
    heads = {r.head for r in prog.rules}
    assert {"out", "cursor", "state_even", "state_yes", "symbol_0", "symbol_1", "symbol_b",
            "input_0", "input_1", "lift_1"} <= heads
    with pytest.raises(GeneratorError):
        gen_tm_simulation(parity_machine(), 0, 2)
    with pytest.raises(GeneratorError):
        gen_tm_simulation(parity_machine(), 1, 1)
    with pytest.raises(DomainExplosion):
        gen_tm_simulation(parity_machine(), 1, 2, n=3, limit=1000)


def test_nondeterministic_simulation_shape():
    for mode, final in (("cautious", "state_no"), ("brave", "state_yes")):
        prog = gen_tm_simulation(guess_machine(), 1, 2, nondet=mode)
        ca = choice_block(prog)
        assert ca.candidate and len(ca.choice_preds) == 2 * 3  # one binary branch per symbol
        out = [r for r in prog.rules if r.head == "out"]
        assert any(final in str(lit) for r in out for lit in r.body)


def test_immediate_machine_simulation():
    prog = gen_tm_simulation(immediate_accept_machine(), 1, 2)
    db = make_database([("in", ("a", "b"))], constants=["a", "b"])
    m = well_founded_model(prog, db)
    assert set(m.true_atoms("out")) == {(x, y) for x in "ab" for y in "ab"}


def test_hamilton_generator_typechecks():
    assert stratify(gen_hamilton()).stratified
