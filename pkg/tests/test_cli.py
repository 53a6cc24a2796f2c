import json
import subprocess
import sys

import pytest

from hodatalog.cli import main
from hodatalog.genlib import format_tm, gen_hamilton, parity_machine
from hodatalog import format_program, parse_program

CHOICE = """\
#pred d : i -> o.
#pred b1 : i -> o.
#pred b2 : i -> o.
#pred b3 : i -> o.
b1(T) :- d(T), not b2(T), not b3(T).
b2(T) :- d(T), not b1(T), not b3(T).
b3(T) :- d(T), not b1(T), not b2(T).
"""


@pytest.fixture
def files(tmp_path):
    paths = {}

    def put(name, text):
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
        return str(p)

    put("ham.hodl", format_program(gen_hamilton()))
    put("path.edb", "e(a,b). e(b,c).\n")
    put("choice.hodl", CHOICE)
    put("dom.edb", "d(x). d(y).\n")
    put("even.hodl", "#pred p : o.\n#pred q : o.\np :- not q.\nq :- not p.\n")
    put("one.edb", "x(a).\n")
    put("bad.hodl", "#pred p : i -> o.\np(X) :- X.\n")
    put("empty.hodl", "")
    put("par.tm", format_tm(parity_machine()))
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_query_true_and_false(files, capsys):
    code, out, _ = run(capsys, "eval", files["ham.hodl"], files["path.edb"], "--query", "hamilton(a,c)")
    assert code == 0 and "true" in out
    code, _, _ = run(capsys, "eval", files["ham.hodl"], files["path.edb"], "--query", "hamilton(c,a)")
    assert code == 1


def test_eval_prints_output_relation(files, capsys):
    code, out, _ = run(capsys, "eval", files["ham.hodl"], files["path.edb"])
    assert code == 0
    assert "hamilton(a,c)" in out.splitlines()


def test_eval_undef_prefix(files, capsys):
    _, out, _ = run(capsys, "eval", files["even.hodl"], files["one.edb"])
    assert out.splitlines() == ["u p", "u q"]


def test_eval_structured(files, capsys):
    _, out, _ = run(capsys, "eval", files["even.hodl"], files["one.edb"], "--format", "structured")
    recs = [json.loads(l) for l in out.splitlines()]
    assert {r["atom"]: r["value"] for r in recs} == {"p": "undef", "q": "undef"}


def test_stable_all_models(files, capsys):
    code, out, _ = run(capsys, "eval", files["choice.hodl"], files["dom.edb"],
                       "--mode", "stable-brave", "--all-models")
    assert code == 0 and "% 9 stable models" in out
    assert out.count("% model ") == 9
    _, out2, _ = run(capsys, "eval", files["choice.hodl"], files["dom.edb"], "--mode",
                     "stable-brave", "--all-models", "--strategy", "exhaustive")
    assert out2 == out


def test_stable_query_modes(files, capsys):
    assert run(capsys, "eval", files["even.hodl"], files["one.edb"], "--mode", "stable-brave",
               "--query", "p")[0] == 0
    assert run(capsys, "eval", files["even.hodl"], files["one.edb"], "--mode", "stable-cautious",
               "--query", "p")[0] == 1


def test_ill_typed_exit_2(files, capsys):
    code, _, err = run(capsys, "eval", files["bad.hodl"], files["one.edb"])
    assert code == 2 and "rule 0" in err
    assert run(capsys, "eval", str(files["dir"] / "missing.hodl"))[0] == 2


def test_limits_and_budget(files, capsys):
    assert run(capsys, "eval", files["ham.hodl"], files["path.edb"], "--limit", "10")[0] == 3
    assert run(capsys, "eval", files["ham.hodl"], files["path.edb"], "--budget", "10")[0] == 4


def test_env_limit(files, capsys, monkeypatch):
    monkeypatch.setenv("HODL_LIMIT", "10")
    assert run(capsys, "eval", files["ham.hodl"], files["path.edb"])[0] == 3
    monkeypatch.setenv("HODL_LIMIT", "lots")
    assert run(capsys, "eval", files["ham.hodl"], files["path.edb"])[0] == 2


def test_check_reports(files, capsys):
    code, out, _ = run(capsys, "check", files["ham.hodl"])
    assert code == 0 and out.startswith("order 2, stratified")
    assert "  rule 0: Ord : i->i->o" in out
    code, out, _ = run(capsys, "check", files["choice.hodl"])
    assert code == 0 and "unstratified; Stratified+Choices candidate: yes" in out
    code, out, _ = run(capsys, "check", files["empty.hodl"])
    assert code == 0 and "stratified" in out


def test_transform_verify(files, capsys):
    out_path = str(files["dir"] / "t.hodl")
    code, out, _ = run(capsys, "transform", files["ham.hodl"], "--verify", files["path.edb"],
                       "-o", out_path)
    assert code == 0
    assert "% 1 pass" in out and "equivalent on 1 database" in out
    text = open(out_path).read()
    assert "__test_0_Ord" in text


def test_transform_without_existentials(files, capsys):
    code, out, err = run(capsys, "transform", files["even.hodl"])
    original = format_program(parse_program(open(files["even.hodl"]).read()))
    strip = lambda text: [l for l in text.splitlines() if not l.startswith("%")]
    assert code == 0 and strip(out) == strip(original)
    assert "% 0 passes" in err


def test_gen_commands(files, capsys):
    code, out, _ = run(capsys, "gen-counter", "--k", "1", "--d", "0", "--selftest")
    assert code == 0
    assert "succ_1" in out
    code, out, err = run(capsys, "gen-counter", "--k", "1", "--d", "0", "--n", "3", "--selftest")
    assert code == 0 and "chain length 8, expected 8: ok" in err
    code, out, _ = run(capsys, "gen-ordering")
    assert code == 0 and "ordering(Ord) :-" in out
    dest = str(files["dir"] / "sim.hodl")
    code, _, _ = run(capsys, "gen-tm", "--tm", files["par.tm"], "--k", "1", "--d", "2", "-o", dest)
    assert code == 0 and "out(A,B)" in open(dest).read()
    code, _, _ = run(capsys, "check", dest)
    assert code == 0


def test_gen_tm_bad_d(files, capsys):
    assert run(capsys, "gen-tm", "--tm", files["par.tm"], "--d", "1")[0] == 2


def test_deterministic_output(files, capsys):
    a = run(capsys, "check", files["ham.hodl"])[1]
    b = run(capsys, "check", files["ham.hodl"])[1]
    assert a == b


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "hodatalog", "eval", files["ham.hodl"],
                          files["path.edb"], "--query", "hamilton(a,c)"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "hamilton(a,c): true" in res.stdout
