import json
from io import StringIO
from pathlib import Path

import pytest

from lctrs.cli import main
from lctrs.smt import SmtBackend

PROBLEMS = Path(__file__).resolve().parent.parent / "demos" / "problems"
SUM = str(PROBLEMS / "sum.lctrs")
PAIRS = str(PROBLEMS / "pairs.lctrs")

needs_z3 = pytest.mark.skipif(not SmtBackend.available(), reason="z3 binary not found")


def run(*argv):
    out = StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


@pytest.fixture
def sum16(tmp_path):
    text = (PROBLEMS / "sum.lctrs").read_text().replace("theory int", "theory intmod 16")
    p = tmp_path / "sum16.lctrs"
    p.write_text(text)
    return str(p)


def test_rewrite_partial_values_mod(sum16):
    code, out = run("rewrite", sum16, "--mode", "partial", "--fuel", 40)
    assert code == 0
    assert "values: 1 3 6 10 15" in out.splitlines()


@needs_z3
def test_rewrite_partial_values_smt():
    code, out = run("rewrite", SUM, "--mode", "partial", "--fuel", 40)
    assert code == 0
    assert "values: 1 3 6 10 15" in out.splitlines()


@needs_z3
def test_rewrite_mg_stops(tmp_path):
    trace = tmp_path / "t.jsonl"
    code, out = run("rewrite", SUM, "--mode", "mg", "--trace", trace)
    assert code == 0
    assert "normal forms (1):" in out
    lines = [json.loads(x) for x in trace.read_text().splitlines()]
    assert lines[0]["kind"] == "header" and lines[0]["mode"] == "mg"
    assert all(e["gate"] == "valid" for e in lines[1:])


def test_rewrite_first_strategy(sum16):
    code, out = run("rewrite", sum16, "--mode", "partial", "--strategy", "first", "--fuel", 3)
    assert code == 0
    assert "fuel-exhausted (1):" in out


def test_normal(sum16):
    assert run("normal", sum16, "--ect", "small", "--mode", "mg") == (0, "normal: yes\n")
    code, out = run("normal", sum16, "--ect", "tiny", "--mode", "partial")
    assert code == 0
    assert out.splitlines() == ["normal: no", "redex: rule-1 at []"]


@needs_z3
def test_subsume_and_equiv():
    code, out = run("subsume", PAIRS, "ordered", "shifted")
    assert code == 0 and out.startswith("subsumed: yes")
    code, out = run("subsume", PAIRS, "shifted", "ordered")
    assert code == 0 and out.startswith("subsumed: no")
    assert "evidence: g(" in out
    code, out = run("equiv", PAIRS, "pinned", "first-one")
    assert code == 0 and out.startswith("equivalent: yes")
    code, out = run("equiv", PAIRS, "both", "half")
    assert code == 0 and out.startswith("equivalent: no")


def test_interpret(sum16):
    code, out = run("interpret", sum16, "small", "--kind", "value")
    assert code == 0
    assert out.split() == [f"sum({i})" for i in range(5)]
    code, out = run("interpret", PAIRS, "half", "--domain", "mod:2", "--kind", "std", "--pool", 1)
    assert code == 0
    assert out.splitlines() == ["g(0, v1)", "g(0, y2)", "g(1, v1)", "g(1, y2)"]
    code, out = run("interpret", PAIRS, "big", "--domain", "int:0..4")
    assert out.splitlines()[1:] == ["f(3)", "f(4)"]
    assert out.startswith("#")


def test_interpret_rule(sum16):
    code, out = run("interpret", sum16, "rule-1", "--kind", "rule", "--domain", "int:-1..1")
    assert code == 0
    assert out.splitlines()[1:] == ["sum(-1) -> 0", "sum(0) -> 0"]


def test_interpret_unbounded_needs_domain():
    assert run("interpret", PAIRS, "big")[0] == 1


def test_verify_single():
    code, out = run("verify", "--theorem", "T-3.2", "--cases", 10, "--mod", 3, "--seed", 1)
    assert code == 0
    report = json.loads(out)
    assert report["total_failures"] == 0 and report["seed"] == 1
    assert report["reports"][0]["cases"] == 10


def test_seed_before_subcommand():
    code, out = run("--seed", 8, "verify", "--theorem", "T-3.2", "--cases", 2)
    assert json.loads(out)["seed"] == 8


@needs_z3
@pytest.mark.parametrize("trace", ["sum-partial", "sum-mg", "shifted-partial"])
def test_trace_replay_golden(trace):
    code, out = run("trace", "replay", SUM, PROBLEMS / f"{trace}.trace.jsonl")
    assert code == 0 and out.startswith("trace matches")


def test_trace_replay_detects_drift(sum16, tmp_path):
    trace = tmp_path / "t.jsonl"
    assert run("rewrite", sum16, "--ect", "tiny", "--mode", "partial", "--trace", trace)[0] == 0
    assert run("trace", "replay", sum16, trace)[0] == 0
    lines = trace.read_text().splitlines()
    entry = json.loads(lines[1])
    entry["ruleId"] = "rule-9"
    lines[1] = json.dumps(entry)
    trace.write_text("\n".join(lines) + "\n")
    code, out = run("trace", "replay", sum16, trace)
    assert code == 1 and "rule-9" in out


def test_unknown_gate_exit_code(tmp_path):
    # a solver that answers "unknown" to everything
    solver = tmp_path / "solver.sh"
    solver.write_text("#!/bin/sh\nwhile read line; do\n"
                      "  case \"$line\" in *check-sat*) echo unknown;; *) : ;; esac\n"
                      "done\n")
    solver.chmod(0o755)
    code, out = run("normal", SUM, "--mode", "mg", "--smt-bin", solver)
    assert (code, out) == (2, "normal: unknown\n")


def test_usage_errors():
    assert run()[0] == 64
    assert run("frobnicate")[0] == 64
    assert run("rewrite", SUM)[0] == 64
    assert run("normal", SUM, "--mode", "sideways")[0] == 64


def test_missing_file():
    assert run("normal", "/nonexistent.lctrs", "--mode", "mg")[0] == 1


def test_unknown_ect(sum16):
    assert run("normal", sum16, "--ect", "nope", "--mode", "mg")[0] == 1
