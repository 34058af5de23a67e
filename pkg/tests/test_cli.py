import json

import pytest

from laminar_mso.cli import main
from laminar_mso.laminar import SetSystem, system_from_nested


@pytest.fixture
def sys_file(tmp_path):
    path = tmp_path / "sys.json"
    path.write_text(system_from_nested([["a", "b"], "c"]).dumps())
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_laminar(capsys, sys_file, tmp_path):
    assert run(capsys, "check-laminar", "--input", sys_file)[:2] == (0, "laminar\n")
    crossing = tmp_path / "bad.json"
    crossing.write_text(SetSystem("abc", ["abc", "a", "b", "c", "ab", "bc"]).dumps())
    code, out, _ = run(capsys, "check-laminar", "--input", crossing)
    assert code == 1 and out.startswith("not laminar")


def test_transduce_dot(capsys, sys_file):
    code, out, _ = run(capsys, "transduce", "--input", sys_file, "--format", "dot")
    assert code == 0 and out.startswith("digraph")
    assert out.count("->") == 4
    _, tree_dot, _ = run(capsys, "build-tree", "--input", sys_file, "--format", "dot")
    assert tree_dot.count("->") == 4


def test_eval(capsys, sys_file):
    assert run(capsys, "eval", "--formula", "(exists x (= x x))", "--input", sys_file)[:2] == (0, "true\n")
    code, out, _ = run(capsys, "eval", "--formula", "(pred SET X)", "--input", sys_file,
                       "--assignment", '{"X": ["a", "c"]}')
    assert (code, out) == (1, "false\n")


def test_transduce_then_roundtrip(capsys, sys_file, tmp_path):
    _, tree_json, _ = run(capsys, "transduce", "--input", sys_file)
    tree = tmp_path / "tree.json"
    tree.write_text(tree_json)
    code, out, _ = run(capsys, "roundtrip", "--input", tree)
    assert code == 0
    assert out.strip() == sys_file.read_text().strip()


def test_trace_file(capsys, sys_file, tmp_path):
    trace = tmp_path / "trace.json"
    run(capsys, "transduce", "--input", sys_file, "--trace", trace)
    steps = [e["step"] for e in json.loads(trace.read_text())]
    assert steps == ["colouring", "filtering", "copying", "interpretation"]


@pytest.mark.parametrize("command", ["build-tree", "thin-partition", "rep-sets", "colouring"])
def test_inspection_commands(capsys, sys_file, command):
    code, out, _ = run(capsys, command, "--input", sys_file)
    assert code == 0 and json.loads(out)


def test_formula(capsys):
    code, out, _ = run(capsys, "formula", "CHILD")
    assert code == 0 and out.startswith("(and")
    assert run(capsys, "formula", "nonsense")[0] == 2


def test_gen_and_enumerate(capsys):
    first = run(capsys, "gen", "--seed", 7, "--leaves", 5)[1]
    assert first == run(capsys, "gen", "--seed", 7, "--leaves", 5)[1]
    assert run(capsys, "enumerate", "--leaves", 4, "--format", "text")[1] == "26\n"


def test_usage_errors(capsys, sys_file):
    assert run(capsys, "bogus")[0] == 2
    code, _, err = run(capsys, "eval", "--formula", "(and (pred SET X)", "--input", sys_file)
    assert code == 2 and "error" in err
    assert run(capsys, "enumerate", "--leaves", 12)[0] == 2


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "serialization,round_trip", "--max-leaves", 3)
    assert code == 0 and "ALL PASS" in out


def test_output_file(capsys, sys_file, tmp_path):
    target = tmp_path / "out.txt"
    run(capsys, "check-laminar", "--input", sys_file, "--output", target)
    assert target.read_text().strip() == "laminar"
