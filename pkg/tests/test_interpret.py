import pytest
from hypothesis import given, settings, strategies as st

from lctrs import (
    GE, INT, MUL, TRUE, DomainSpec, EnumBackend, FunSym, IntMod, IntWindow, Sort, Var, App,
    contains_instance, ect, enumerate_instances, format_term, instantiation_normal,
    interpret_rule, interpret_system, parse_domain, rule, val, value_instances, EQ, LT,
)
from lctrs.errors import CapExceeded
from lctrs.harness import GenConfig, gen_case
from lctrs.interpret import (
    canonicalize, contains_value_instance, enumerate_value_instances, ground_steps,
    is_ground_normal, reachable, term_instance_order,
)

from conftest import ADD, F1, SUM, between, sum_rules, sum_system, x, y, z, w

F2 = FunSym("f", (INT, INT), INT)
v1 = Var("v1")


def names(ts):
    return sorted(format_term(t) for t in ts)


def even():
    return ect(F2(x, z), EQ(x, MUL(y, val(2))), {x}, [y])


def test_standard_instances():
    got = enumerate_instances(even(), DomainSpec(IntMod(6), (z,)))
    assert names(got) == ["f(0, z)", "f(2, z)", "f(4, z)"]
    assert enumerate_instances(ect(F1(x), LT(x, x)), IntMod(6)) == set()
    assert names(enumerate_instances(ect(F1(x)), DomainSpec(IntMod(6), (x,)))) == ["f(x)"]
    got = enumerate_instances(ect(F1(x)), DomainSpec(IntMod(3), (val(1), F1(val(0)))))
    assert names(got) == ["f(1)", "f(f(0))", "f(x)"]


def test_membership():
    b = EnumBackend(IntMod(6))
    assert contains_instance(even(), F2(val(0), F2(x, y)), b)
    assert not contains_instance(even(), F2(val(1), z), b)
    five = ect(SUM(x), between(x, 1, 5))
    assert not contains_instance(five, SUM(val(0)), b)
    assert contains_instance(five, SUM(val(1)), b)
    # a non-linear term needs equal subterms
    g = ect(F2(x, x), TRUE, {x})
    assert contains_instance(g, F2(val(1), val(1)), b)
    assert not contains_instance(g, F2(val(1), val(2)), b)


def test_value_instances():
    assert names(value_instances(even(), IntMod(6))) == ["f(0, v1)", "f(2, v1)", "f(4, v1)"]
    got = enumerate_value_instances(ect(SUM(x), between(x, 0, 4)), IntWindow(-1, 6))
    assert names(got) == [f"sum({k})" for k in range(5)]
    assert names(value_instances(ect(F1(x), TRUE, {x}), IntMod(2))) == ["f(0)", "f(1)"]
    assert canonicalize(F2(z, F2(y, z))) == F2(v1, F2(Var("v2"), v1))


def test_value_membership_requires_injective_renaming():
    c = ect(F2(y, z), TRUE, set())
    b = EnumBackend(IntMod(3))
    assert contains_value_instance(c, F2(x, w), b)
    assert not contains_value_instance(c, F2(x, x), b)
    assert contains_instance(c, F2(x, x), b)


def test_rule_interpretation():
    drop = rule("drop", F2(x, y), y, GE(val(0), x), {x})
    got = interpret_rule(drop, IntWindow(-3, 3))
    assert sorted(str(g) for g in got) == [f"f({n}, y) -> y" for n in ("-1", "-2", "-3", "0")]
    r1, r2 = sum_rules()
    assert sorted(str(g) for g in interpret_rule(r1, IntWindow(-2, 6))) == [
        "sum(-1) -> 0", "sum(-2) -> 0", "sum(0) -> 0"]
    assert interpret_rule(rule("never", F1(x), x, LT(x, x)), IntMod(5)) == set()


def test_ground_steps():
    r1, r2 = sum_rules()
    w3 = IntWindow(-3, 3)
    assert ground_steps(SUM(val(0)), interpret_rule(r1, w3)) == {val(0)}
    assert names(ground_steps(SUM(val(1)), interpret_rule(r2, w3))) == ["1 + sum(1 + -1)"]
    T = Sort("T")
    g = FunSym("f", (INT, T), T)
    zt = Var("z", T)
    yt = Var("y", T)
    rho = rule("rho", g(x, yt), yt, GE(val(0), x), {x})
    u = g(val(1), g(val(0), zt))
    assert ground_steps(u, interpret_rule(rho, w3), (2,)) == {g(val(1), zt)}
    assert ground_steps(u, interpret_rule(rho, w3), ()) == set()


def test_reachable_and_normal():
    # literals such as -1 are carrier values only in an integer window
    G = interpret_system(sum_system().rules, IntWindow(-2, 8))
    out = reachable({SUM(val(2))}, G, 10)
    assert val(3) in out
    assert is_ground_normal(val(3), G)
    assert not is_ground_normal(SUM(val(2)), G)


def test_instantiation_normal():
    T = Sort("T")
    fa = FunSym("f", (T,), T)
    a, b = FunSym("a", (), T), FunSym("b", (), T)
    R = [rule("fab", fa(App(a)), App(b))]
    v = instantiation_normal(ect(fa(Var("x", T))), R, IntMod(3))
    assert v.no and v.evidence == fa(App(a))
    assert instantiation_normal(ect(val(0), TRUE), R, IntMod(3)).yes
    r1, _ = sum_rules()
    c = ect(ADD(val(1), SUM(w)), between(w, 1, 5))
    assert instantiation_normal(c, [r1], IntMod(8)).yes
    assert instantiation_normal(c, sum_system().rules, IntMod(8)).no
    # the reducible instance comes from rule-2; calculation rules alone do not apply
    calc = [r for r in sum_system().rules if r.calc]
    assert instantiation_normal(c, [r1] + calc, IntMod(8)).yes
    assert instantiation_normal(c, list(sum_rules()), IntMod(8)).no
    # a window can find a reducible instance but never prove normality
    assert instantiation_normal(c, [r1], IntWindow(-1, 6)).unknown
    assert instantiation_normal(c, sum_system().rules, IntWindow(-1, 6)).no


def test_instance_order():
    assert term_instance_order(F1(x), F1(val(0)))
    assert not term_instance_order(F1(val(0)), F1(x))
    inst = sorted(value_instances(even(), IntMod(6)), key=format_term)
    for u in inst:
        for v in inst:
            if u != v:
                assert not term_instance_order(u, v)


def test_caps_and_domains():
    with pytest.raises(CapExceeded):
        value_instances(ect(F2(x, y), TRUE, {x, y}), DomainSpec(IntMod(5), (), 10))
    assert parse_domain("mod:7") == IntMod(7)
    assert parse_domain("int:-1..6") == IntWindow(-1, 6)
    with pytest.raises(ValueError):
        parse_domain("real:1")


# ---------------------------------------------------------------------------
# properties

CFG = GenConfig(seed=11, modulus=3)


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_interpretation_laws(i):
    case = gen_case("interp", CFG, i)
    c = case.ect
    model = IntMod(case.modulus)
    b = EnumBackend(model)
    vinst = value_instances(c, model)
    # satisfiable iff the interpretations are non-empty
    assert bool(vinst) == b.check_sat(c.constraint).is_sat
    for u in vinst:
        assert contains_instance(c, u, b)
        assert contains_value_instance(c, u, b)
    # every standard instance is a substitution instance of a value instance
    for u in enumerate_instances(c, DomainSpec(model, (val(1),), 2000)):
        assert any(term_instance_order(v, u) for v in value_instances(c, model, canonical=False))
