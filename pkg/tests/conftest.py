import pytest
from hypothesis import settings

from lctrs import (
    ADD, GE, GT, INT, LE, EnumBackend, FunSym, IntMod, SmtBackend, Var, rule, system, val,
)

SUM = FunSym("sum", (INT,), INT)
F1 = FunSym("f", (INT,), INT)
G2 = FunSym("g", (INT, INT), INT)
x, y, z, w = (Var(n) for n in "xyzw")

settings.register_profile("lctrs", deadline=None, max_examples=100)
settings.load_profile("lctrs")


def sum_rules():
    r1 = rule("rule-1", SUM(x), val(0), GE(val(0), x))
    r2 = rule("rule-2", SUM(x), ADD(x, SUM(ADD(x, val(-1)))), GT(x, val(0)))
    return r1, r2


def sum_system(with_calc=True):
    return system(sum_rules(), (ADD,), with_calc=with_calc)


def between(v, lo, hi):
    from lctrs import conj
    return conj(LE(val(lo), v), LE(v, val(hi)))


@pytest.fixture
def mod16():
    return EnumBackend(IntMod(16))


@pytest.fixture(scope="session")
def smt():
    if not SmtBackend.available():
        pytest.skip("z3 binary not found")
    b = SmtBackend()
    yield b
    b.close()


# acceptance criteria report one line each; shown at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
