from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from lctrs.errors import ParseError, ValidationError
from lctrs.harness import GenConfig, gen_case
from lctrs.syntax import Problem, format_problem, parse_problem, tokenize
from lctrs.terms import format_term
from lctrs.theory import IntMod, UnboundedInt

PROBLEMS = Path(__file__).resolve().parent.parent / "demos" / "problems"


def test_sum_file_rules():
    p = parse_problem((PROBLEMS / "sum.lctrs").read_text())
    assert isinstance(p.model, UnboundedInt)
    assert [r.id for r in p.rules] == ["rule-1", "rule-2"]
    R = p.system()
    calc = [r for r in R.rules if r.calc]
    assert len(R.rules) == 2 + len(calc) and calc
    assert not [r for r in p.system(with_calc=False).rules if r.calc]
    assert format_term(p.rule("rule-2").rhs) == "x + sum(x + -1)"


def test_sum_ect():
    p = parse_problem((PROBLEMS / "sum.lctrs").read_text())
    c = p.ect("shifted")
    assert [v.name for v in c.constraint.bound] == ["w"]
    assert {v.name for v in c.logical} == {"y"}


def test_guard_variable_outside_logical_set():
    text = "theory int\nsig sum : Int -> Int term\nrule bad: sum(x) -> 0 [0 >= x] vars {}\n"
    with pytest.raises(ValidationError, match="bad"):
        parse_problem(text)


def test_intmod_literals_normalized():
    p = parse_problem("theory intmod 8\nsig f : Int -> Int term\nrule r: f(x) -> x + -1 vars {x}\n")
    assert format_term(p.rules[0].rhs) == "x + 7"


@pytest.mark.parametrize("text, line, col", [
    ("theory int\nsig f : Int -> Int term\nrule r: f(x) -> [x > 0]\n", 3, 17),
    ("theory int\nfoo bar\n", 2, 1),
    ("theory real\n", 1, 8),
    ("theory int\nsig f : Int Int -> Int\n", 2, 13),
    ("theory int\nsig f : Int -> Int term\nect e: X {x} term f(x) phi x > $\n", 3, 32),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert f"line {line}, col {col}" in str(info.value)


@pytest.mark.parametrize("text, needle", [
    ("theory int\nrule r: f(x) -> x\n", "undeclared"),
    ("theory int\nsig f : Int -> Int term\nsig f : Int -> Int term\n", "twice"),
    ("theory int\nsig f : Int -> Int term\nrule r: x -> f(x)\n", "variable"),
    ("theory int\nsig f : Int -> Int term\nect e: X {y} term f(x) phi y > 0\n", "X"),
    ("theory int\nsig plus : Int * Int -> Int theory\n", "theory"),
])
def test_validation_errors(text, needle):
    with pytest.raises(ValidationError, match=needle):
        parse_problem(text)


def test_unicode_aliases():
    toks = [t.text for t in tokenize("x ≤ 1 ∧ ¬(y ≥ 2)")]
    assert toks[:4] == ["x", "<=", "1", "/\\"]


@pytest.mark.parametrize("name", ["sum.lctrs", "pairs.lctrs"])
def test_round_trip_demo_files(name):
    p = parse_problem((PROBLEMS / name).read_text())
    once = format_problem(p)
    assert format_problem(parse_problem(once)) == once


@given(st.integers(0, 10_000))
def test_round_trip_generated(seed):
    case = gen_case("T-4.5", GenConfig(seed=seed), 0)
    p = Problem(model=IntMod(5))
    for r in case.system.rules:
        if r.calc:
            continue
        p.rules.append(r)
    for c in (case.ect, case.other):
        for f in _heads(c.term):
            p.symbols[f.name] = f
    for r in p.rules:
        for f in _heads(r.lhs) + _heads(r.rhs):
            p.symbols[f.name] = f
    p.ects = {"a": case.ect, "b": case.other}
    once = format_problem(p)
    again = parse_problem(once)
    assert format_problem(again) == once
    assert again.ects["a"] == case.ect


def _heads(t):
    if not hasattr(t, "head"):
        return []
    out = [] if t.head.theory else [t.head]
    for a in t.args:
        out += _heads(a)
    return out
