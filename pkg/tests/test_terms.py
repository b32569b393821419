import pytest
from hypothesis import given, strategies as st

from lctrs import ADD, INT, BOOL, App, FunSym, Sort, Var, apply_subst, format_term, val
from lctrs.errors import InvalidPosition, NonLinearPattern, SortMismatch
from lctrs.terms import (
    fresh_rename, is_linear, match, match_left_linear, positions, replace_at, subterm_at,
    unify, vals_of, var_list, vars_of, NEG, SUB, MUL, LE, AND, OR, IMPLIES, NOT, value_sym,
)

from conftest import SUM, G2, x, y, z, w

T = Sort("T")
A = FunSym("a", (), T)
B = FunSym("b", (), T)
F = FunSym("f", (T,), T)
H = FunSym("h", (T, T), T)


def test_sort_checking():
    with pytest.raises(SortMismatch):
        SUM(Var("t", T))
    with pytest.raises(SortMismatch):
        App(SUM, ())


def test_subterm_at():
    s = ADD(val(1), SUM(y))
    assert subterm_at(SUM(x), ()) == SUM(x)
    assert subterm_at(s, (2,)) == SUM(y)
    t = ADD(x, SUM(ADD(x, val(-1))))
    assert subterm_at(t, (2, 1)) == ADD(x, val(-1))
    with pytest.raises(InvalidPosition):
        subterm_at(s, (3,))
    with pytest.raises(InvalidPosition):
        subterm_at(s, (1, 1))


def test_replace_at():
    assert replace_at(SUM(x), (), val(0)) == val(0)
    assert replace_at(ADD(val(1), SUM(y)), (2,), val(0)) == ADD(val(1), val(0))
    with pytest.raises(SortMismatch):
        replace_at(SUM(x), (1,), val(True))


def test_vars_and_values():
    assert vars_of(SUM(x)) == {x}
    assert vals_of(ADD(x, val(-1))) == {value_sym(-1)}
    assert vars_of(ADD(val(1), val(0))) == frozenset()
    assert var_list(G2(y, ADD(x, y))) == [y, x]
    assert is_linear(G2(x, y)) and not is_linear(G2(x, x))


def test_apply_subst():
    x1 = Var("x'")
    assert apply_subst({x1: x}, SUM(x1)) == SUM(x)
    sigma = {x: val(1), y: val(1), z: SUM(w)}
    assert apply_subst(sigma, ADD(x, z)) == ADD(val(1), SUM(w))
    assert apply_subst({}, SUM(val(0))) == SUM(val(0))


def test_matching():
    x1 = Var("x'")
    assert match_left_linear(SUM(x1), SUM(x)) == {x1: x}
    assert match_left_linear(SUM(x1), SUM(y)) == {x1: y}
    assert match_left_linear(F(A()), F(B())) is None
    with pytest.raises(NonLinearPattern):
        match_left_linear(G2(x, x), G2(val(1), val(1)))
    assert match(G2(x, x), G2(val(1), val(1))) == {x: val(1)}
    assert match(G2(x, x), G2(val(1), val(2))) is None


def test_unify():
    t = Var("t", T)
    u = Var("u", T)
    assert unify(H(t, B()), H(A(), u)) == {t: A(), u: B()}
    assert unify(t, F(t)) is None
    assert unify(F(A()), F(B())) is None


def test_fresh_rename():
    assert fresh_rename({x}, {x}) == {x: Var("x#1")}
    assert fresh_rename(set(), set()) == {}
    assert fresh_rename({Var("x#1"), x}, {x}) == {x: Var("x#2")}
    # names clash across sorts too
    assert fresh_rename({Var("x#1", BOOL)}, {x}) == {x: Var("x#2")}


def test_format_term():
    assert format_term(ADD(x, SUM(ADD(x, val(-1))))) == "x + sum(x + -1)"
    assert format_term(SUB(x, SUB(y, z))) == "x - (y - z)"
    assert format_term(SUB(SUB(x, y), z)) == "x - y - z"
    assert format_term(MUL(ADD(x, y), z)) == "(x + y) * z"
    assert format_term(NEG(val(-1))) == "-(-1)"
    assert format_term(NEG(x)) == "-x"
    b = LE(x, y)
    assert format_term(IMPLIES(b, IMPLIES(b, b))) == "x <= y => x <= y => x <= y"
    assert format_term(IMPLIES(IMPLIES(b, b), b)) == "(x <= y => x <= y) => x <= y"
    assert format_term(NOT(AND(b, b))) == "not (x <= y /\\ x <= y)"
    assert format_term(AND(OR(b, b), b)) == "(x <= y \\/ x <= y) /\\ x <= y"


# ---------------------------------------------------------------------------
# properties

VARS = [Var(n) for n in "xyz"]


def terms(depth=3):
    leaf = st.one_of(st.sampled_from(VARS), st.integers(-2, 2).map(val))
    return st.recursive(
        leaf,
        lambda sub: st.one_of(st.builds(ADD, sub, sub), st.builds(SUM, sub),
                              st.builds(G2, sub, sub)),
        max_leaves=8,
    )


@given(terms(), st.data())
def test_replace_identity(t, data):
    p = data.draw(st.sampled_from(positions(t)))
    assert replace_at(t, p, subterm_at(t, p)) == t


@given(terms(), st.data())
def test_replace_changes_only_p(t, data):
    p = data.draw(st.sampled_from(positions(t)))
    u = SUM(Var("fresh")) if subterm_at(t, p).sort == INT else None
    t2 = replace_at(t, p, u)
    assert subterm_at(t2, p) == u
    for q in positions(t):
        if q[:len(p)] != p and p[:len(q)] != q:
            assert subterm_at(t2, q) == subterm_at(t, q)


def _linearize(t):
    counter = iter(range(1000))

    def walk(u):
        if isinstance(u, Var):
            return Var(f"p{next(counter)}")
        return App(u.head, [walk(a) for a in u.args])
    return walk(t)


@given(terms(), st.lists(terms(), min_size=8, max_size=8))
def test_match_round_trip(t, images):
    pat = _linearize(t)
    sigma = dict(zip(var_list(pat), images))
    assert match_left_linear(pat, apply_subst(sigma, pat)) == sigma


@given(terms(), st.data())
def test_subst_distributes_over_replace(t, data):
    p = data.draw(st.sampled_from(positions(t)))
    u = SUM(y) if subterm_at(t, p).sort == INT else None
    sigma = {x: val(1), y: ADD(z, val(2))}
    lhs = apply_subst(sigma, replace_at(t, p, u))
    rhs = replace_at(apply_subst(sigma, t), p, apply_subst(sigma, u))
    assert lhs == rhs


@given(st.sets(st.sampled_from(["x", "y", "x#1", "x#2", "z#1"])),
       st.sets(st.sampled_from(["x", "y", "z", "x#1"])))
def test_fresh_rename_disjoint(avoid, targets):
    av = {Var(n) for n in avoid}
    tg = {Var(n) for n in targets}
    ren = fresh_rename(av, tg)
    assert set(ren) == tg
    assert not set(ren.values()) & (av | tg)
    assert len(set(ren.values())) == len(tg)
    assert ren == fresh_rename(av, tg)


@given(terms(), terms())
def test_unify_is_unifier(s, t):
    mgu = unify(s, t)
    if mgu is not None:
        assert apply_subst(mgu, s) == apply_subst(mgu, t)
