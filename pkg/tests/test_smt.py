import sys
import textwrap
import time

import pytest

from lctrs import ADD, EQ, GE, GT, LE, LT, SUB, BOOL, Var, conj, constraint, val
from lctrs.errors import BackendFailure
from lctrs.smt import SmtBackend, parse_model, parse_sexpr, quantified, sat_script, to_smt

from conftest import x, y, w

FAKE = textwrap.dedent("""
    import sys, time
    mode = sys.argv[1]
    for line in sys.stdin:
        if "(check-sat)" in line:
            if mode == "unknown":
                print("unknown", flush=True)
            elif mode == "hang":
                time.sleep(60)
            elif mode == "die":
                sys.exit(3)
            elif mode == "error":
                print('(error "boom")', flush=True)
            elif mode == "garbage":
                print("maybe", flush=True)
""")


@pytest.fixture
def fake(tmp_path):
    script = tmp_path / "fake_solver.py"
    script.write_text(FAKE)

    def make(mode, timeout_ms=5000):
        return SmtBackend(sys.executable, timeout_ms=timeout_ms, args=[str(script), mode])
    return make


def test_printing():
    assert to_smt(ADD(x, val(-1))) == "(+ |x| (- 1))"
    ec = constraint(conj(LE(val(1), w), EQ(y, SUB(w, val(1)))), [w])
    assert quantified(ec).startswith("(exists ((|w| Int))")
    script = sat_script(ec)
    assert "(set-logic LIA)" in script and "(declare-const |y| Int)" in script


def test_parse_model():
    text = "(model (define-fun |y| () Int (- 3)) (define-fun |b| () Bool true))"
    b = Var("b", BOOL)
    assert parse_model(text, [y, b, x]) == {y: -3, b: True, x: 0}
    assert parse_sexpr("(a (b c) d)") == ["a", ["b", "c"], "d"]


def test_unknown_is_reported(fake):
    with fake("unknown") as b:
        v = b.check_sat(constraint(GT(x, val(0))))
        assert v.is_unknown
        assert b.check_valid_implication(constraint(GT(x, val(0))), constraint(GE(x, val(0)))).is_unknown


def test_timeout_becomes_unknown(fake):
    with fake("hang", timeout_ms=100) as b:
        t0 = time.monotonic()
        assert b.check_sat(constraint(GT(x, val(0)))).is_unknown
        assert time.monotonic() - t0 < 10


def test_dead_process_fails(fake):
    with fake("die") as b:
        with pytest.raises(BackendFailure):
            b.check_sat(constraint(GT(x, val(0))))


def test_protocol_errors(fake):
    with fake("error") as b:
        with pytest.raises(BackendFailure):
            b.check_sat(constraint(GT(x, val(0))))
    with fake("garbage") as b:
        with pytest.raises(BackendFailure):
            b.check_sat(constraint(GT(x, val(0))))


def test_missing_binary():
    with pytest.raises(BackendFailure):
        SmtBackend("definitely-not-a-solver").check_sat(constraint(GT(x, val(0))))


# ---------------------------------------------------------------------------
# with a real solver

def test_z3_examples(smt):
    shifted = constraint(conj(LE(val(1), w), LE(w, val(5)), EQ(y, SUB(w, val(1)))), [w])
    assert smt.check_sat(constraint(GE(ADD(x, y), val(2)))).is_sat
    assert smt.check_sat(constraint(LT(x, x))).is_unsat
    assert smt.check_valid_implication(constraint(GT(x, val(2))), constraint(GT(x, val(0)))).is_sat
    v = smt.check_valid_implication(shifted, constraint(GE(val(0), y)))
    assert v.is_unsat and 1 <= v.witness[y] <= 4
    assert smt.holds(shifted, {y: 0}) and not smt.holds(shifted, {y: 5})


def test_z3_unbounded(smt):
    # no solution below 16, so the modular backend could not see this one
    assert smt.check_sat(constraint(GT(x, val(1000)))).witness[x] > 1000


def test_z3_is_fast(smt):
    t0 = time.monotonic()
    for k in range(50):
        smt.check_sat(constraint(GT(x, val(k))))
    assert time.monotonic() - t0 < 5


from hypothesis import given, settings, strategies as st  # noqa: E402

from lctrs import EnumBackend, IntMod  # noqa: E402
from lctrs.theory import ExistentialConstraint  # noqa: E402

_VARS = [x, y, w]
_atom = st.builds(lambda r, a, b: r(a, b), st.sampled_from([LE, LT, EQ, GE]),
                  st.one_of(st.sampled_from(_VARS), st.integers(0, 4).map(val)),
                  st.one_of(st.sampled_from(_VARS), st.integers(0, 4).map(val)))


def _boxed(atoms, bound, also=()):
    # every variable confined to 0..4, where IntMod 5 and the integers agree
    from lctrs.terms import vars_of
    vs = sorted(vars_of(*atoms, *also))
    box = [p for v in vs for p in (LE(val(0), v), LE(v, val(4)))]
    return ExistentialConstraint(tuple(v for v in vs if v in bound), conj(*box, *atoms))


@settings(max_examples=40)
@given(st.lists(_atom, min_size=1, max_size=3), st.sets(st.sampled_from(_VARS)))
def test_backends_agree_on_sat(smt, atoms, bound):
    ec = _boxed(atoms, bound)
    assert smt.check_sat(ec).status == EnumBackend(IntMod(5)).check_sat(ec).status


@settings(max_examples=40)
@given(st.lists(_atom, min_size=1, max_size=2), st.lists(_atom, min_size=1, max_size=2))
def test_backends_agree_on_validity(smt, a, b):
    lhs, rhs = _boxed(a, (), also=b), _boxed(b, ())
    assert (smt.check_valid_implication(lhs, rhs).status
            == EnumBackend(IntMod(5)).check_valid_implication(lhs, rhs).status)
