"""Theory models, existential constraints and the enumeration backend.

Two families of models are provided.  ``IntMod(m)`` has the carrier
0..m-1 with wrap-around arithmetic and comparisons on representatives;
everything about it is decided by exhaustive search.  ``IntWindow(lo, hi)``
is ordinary integer arithmetic searched only inside a window, so its
answers are one-sided.  Unbounded integers are handled by ``SmtBackend``
in ``lctrs.smt``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
import operator

from .errors import NonTheoryTerm, NotValued, SolverUnknown
from .terms import (
    BOOL, INT, TRUE, App, Var, conj, conjuncts, fresh_rename, apply_subst,
    is_value, val, var_list, format_term,
)


# ---------------------------------------------------------------------------
# models

_BOOL_OPS = {
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
    "not": lambda a: not a,
    "=>": lambda a, b: (not a) or b,
}
_CMP_OPS = {
    "<=": operator.le,
    "<": operator.lt,
    ">=": operator.ge,
    ">": operator.gt,
    "=": operator.eq,
}
_ARITH_OPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "neg": operator.neg,
}


class TheoryModel:
    exact = False
    finite = False

    def normalize(self, n):
        return n

    def op(self, name):
        if name in _BOOL_OPS:
            return _BOOL_OPS[name]
        if name in _CMP_OPS:
            return _CMP_OPS[name]
        f = _ARITH_OPS[name]
        norm = self.normalize
        return lambda *xs: norm(f(*xs))

    def value_term(self, element, sort):
        return val(bool(element), BOOL) if sort == BOOL else val(self.normalize(element), INT)

    def carrier(self, sort):
        raise NotImplementedError


@dataclass(frozen=True)
class IntMod(TheoryModel):
    """Integers modulo ``modulus``; comparisons act on 0..m-1 representatives."""

    modulus: int
    exact = True
    finite = True

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")

    def normalize(self, n):
        return n % self.modulus

    def carrier(self, sort):
        return (False, True) if sort == BOOL else tuple(range(self.modulus))

    def __str__(self):
        return f"mod:{self.modulus}"


@dataclass(frozen=True)
class IntWindow(TheoryModel):
    """Unbounded integer semantics, enumerated only over lo..hi."""

    lo: int
    hi: int
    finite = True

    def carrier(self, sort):
        return (False, True) if sort == BOOL else tuple(range(self.lo, self.hi + 1))

    def __str__(self):
        return f"int:{self.lo}..{self.hi}"


@dataclass(frozen=True)
class UnboundedInt(TheoryModel):
    def carrier(self, sort):
        if sort == BOOL:
            return (False, True)
        raise ValueError("the unbounded integer model has no finite carrier")

    def __str__(self):
        return "int"


# ---------------------------------------------------------------------------
# constraints and verdicts

@dataclass(frozen=True)
class ExistentialConstraint:
    """``exists bound. body`` with a quantifier-free Bool body."""

    bound: tuple = ()
    body: object = TRUE

    def __post_init__(self):
        object.__setattr__(self, "bound", tuple(self.bound))

    @property
    def free_vars(self):
        b = set(self.bound)
        return frozenset(v for v in var_list(self.body) if v not in b)

    @property
    def bound_vars(self):
        return frozenset(self.bound)

    def free_list(self):
        b = set(self.bound)
        return [v for v in var_list(self.body) if v not in b]

    def __str__(self):
        if not self.bound:
            return format_term(self.body)
        return f"∃{','.join(v.name for v in self.bound)}. {format_term(self.body)}"


def constraint(body, bound=()):
    return ExistentialConstraint(tuple(bound), body)


class Status(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Solver answer.  ``witness`` maps free variables to model elements."""

    status: Status
    witness: dict = field(default=None, compare=False)
    reason: str = ""

    @property
    def is_sat(self):
        return self.status is Status.SAT

    @property
    def is_unsat(self):
        return self.status is Status.UNSAT

    @property
    def is_unknown(self):
        return self.status is Status.UNKNOWN

    def __str__(self):
        if self.witness:
            w = ", ".join(f"{v.name}={_fmt(x)}" for v, x in sorted(self.witness.items()))
            return f"{self.status.value} [{w}]"
        if self.reason:
            return f"{self.status.value} ({self.reason})"
        return self.status.value


def _fmt(x):
    return ("true" if x else "false") if isinstance(x, bool) else str(x)


def sat(witness=None):
    return Verdict(Status.SAT, witness or {})


def unsat(witness=None):
    return Verdict(Status.UNSAT, witness)


def unknown(reason=""):
    return Verdict(Status.UNKNOWN, None, reason)


# ---------------------------------------------------------------------------
# evaluation

def evaluate(t, valuation, model):
    """Value of the theory term ``t`` under ``valuation`` (Var -> element)."""
    if isinstance(t, Var):
        if t not in valuation:
            raise NotValued(f"variable {t.name} has no value")
        return valuation[t]
    h = t.head
    if not h.theory:
        raise NonTheoryTerm(f"{h.name} is not a theory symbol")
    if h.is_value:
        return model.normalize(h.value) if h.result == INT else h.value
    args = [evaluate(a, valuation, model) for a in t.args]
    return model.op(h.name)(*args)


@lru_cache(maxsize=65536)
def compile_term(t, model):
    """Closure evaluating ``t`` on a dict valuation; raises NonTheoryTerm eagerly."""
    if isinstance(t, Var):
        return lambda env: env[t]
    h = t.head
    if not h.theory:
        raise NonTheoryTerm(f"{h.name} is not a theory symbol")
    if h.is_value:
        c = model.normalize(h.value) if h.result == INT else h.value
        return lambda env: c
    f = model.op(h.name)
    subs = [compile_term(a, model) for a in t.args]
    if len(subs) == 1:
        a, = subs
        return lambda env: f(a(env))
    a, b = subs
    if h.name == "and":
        return lambda env: a(env) and b(env)
    if h.name == "or":
        return lambda env: a(env) or b(env)
    if h.name == "=>":
        return lambda env: (not a(env)) or b(env)
    return lambda env: f(a(env), b(env))


def holds_body(body, valuation, model):
    return bool(evaluate(body, valuation, model))


def prenex_conjoin(a, b):
    """``(exists xs. p) and (exists ys. q)`` as a single prenex constraint.

    Bound variables of ``b`` clashing with any variable of ``a`` are renamed.
    """
    a_all = set(var_list(a.body)) | set(a.bound)
    b_all = set(var_list(b.body)) | set(b.bound)
    capture = [v for v in a.bound if v in b.free_vars]
    if capture:
        ren = fresh_rename(a_all | b_all, capture)
        a = ExistentialConstraint(tuple(ren.get(v, v) for v in a.bound), apply_subst(ren, a.body))
        a_all = set(var_list(a.body)) | set(a.bound)
    clash = [v for v in b.bound if v in a_all]
    if clash:
        ren = fresh_rename(a_all | b_all, clash)
        b = ExistentialConstraint(tuple(ren.get(v, v) for v in b.bound), apply_subst(ren, b.body))
    return ExistentialConstraint(a.bound + b.bound, conj(a.body, b.body))


def instantiate(ec, valuation, model):
    """Replace free variables by value constants."""
    sub = {}
    for v in ec.free_vars:
        if v not in valuation:
            raise NotValued(f"variable {v.name} has no value")
        sub[v] = model.value_term(valuation[v], v.sort)
    return ExistentialConstraint(ec.bound, apply_subst(sub, ec.body))


# ---------------------------------------------------------------------------
# enumeration search

class _Problem:
    """A conjunction prepared for backtracking search over a finite carrier."""

    def __init__(self, body, model):
        self.model = model
        self.atoms = []
        self.defs = []
        for c in conjuncts(body):
            vs = frozenset(var_list(c))
            self.atoms.append((vs, compile_term(c, model)))
            if isinstance(c, App) and c.head.name == "=" and c.head.theory:
                l, r = c.args
                for v, e in ((l, r), (r, l)):
                    if isinstance(v, Var):
                        ev = frozenset(var_list(e))
                        if v not in ev:
                            self.defs.append((v, ev, compile_term(e, model)))

    def search(self, order, env):
        """Yield extensions of ``env`` assigning every variable in ``order``."""
        model = self.model
        atoms = self.atoms
        defs = self.defs
        todo = [v for v in order if v not in env]
        todo_set = set(todo)
        by_var = {v: [] for v in todo}
        for vs, f in atoms:
            for v in vs:
                if v in by_var:
                    by_var[v].append((vs, f))
        for vs, f in atoms:
            if vs <= env.keys() and not f(env):
                return
        carrier = {v: model.carrier(v.sort) for v in todo}
        bounds = None
        if not model.exact and isinstance(model, IntWindow):
            bounds = (model.lo, model.hi)

        def ok(v):
            for vs, f in by_var[v]:
                if vs <= env.keys() and not f(env):
                    return False
            return True

        def rec(remaining):
            if not remaining:
                yield dict(env)
                return
            for v, ev, e in defs:
                if v in remaining and ev <= env.keys():
                    x = e(env)
                    if v.sort == INT and bounds and not bounds[0] <= x <= bounds[1]:
                        return
                    env[v] = x
                    if ok(v):
                        yield from rec(remaining - {v})
                    del env[v]
                    return
            v = next(u for u in todo if u in remaining)
            rest = remaining - {v}
            for x in carrier[v]:
                env[v] = x
                if ok(v):
                    yield from rec(rest)
            del env[v]

        env = dict(env)
        yield from rec(frozenset(todo_set))


def iter_solutions(ec, model, outer=None, fixed=None):
    """Assignments to ``outer`` (default: free variables) that satisfy ``ec``.

    Each distinct outer assignment is produced once, in enumeration order.
    Outer variables not occurring in the body range over the whole carrier.
    """
    if outer is None:
        outer = ec.free_list()
    outer = list(outer)
    fixed = dict(fixed or {})
    outer_set = set(outer)
    inner = [v for v in var_list(ec.body) if v not in outer_set and v not in fixed]
    prob = _Problem(ec.body, model)
    if not inner:
        yield from prob.search(outer, fixed)
        return
    inner_set = set(inner)
    outer_prob = _Problem(conj(*[c for c in conjuncts(ec.body)
                                 if not (set(var_list(c)) & inner_set)]), model)
    for env in outer_prob.search(outer, fixed):
        if next(prob.search(inner, env), None) is not None:
            yield env


class EnumBackend:
    """Decides constraints by exhaustive search over a finite carrier.

    Over ``IntMod`` every answer is exact.  Over ``IntWindow`` only answers
    backed by a concrete assignment are reported; the rest become unknown.
    """

    def __init__(self, model):
        self.model = model

    @property
    def exact(self):
        return self.model.exact

    def __repr__(self):
        return f"EnumBackend({self.model})"

    def check_sat(self, ec):
        order = ec.free_list() + list(ec.bound)
        env = next(_Problem(ec.body, self.model).search(order, {}), None)
        if env is not None:
            free = ec.free_vars
            return sat({v: x for v, x in env.items() if v in free})
        if self.exact:
            return unsat()
        return unknown("no witness inside the enumeration window")

    def holds(self, ec, valuation):
        _require_valued(ec, valuation)
        fixed = {v: valuation[v] for v in ec.free_vars}
        prob = _Problem(ec.body, self.model)
        return next(prob.search(list(ec.bound), fixed), None) is not None

    def check_valid_implication(self, lhs, rhs):
        """SAT means valid; UNSAT carries a counter-valuation."""
        free = lhs.free_list() + [v for v in rhs.free_list() if v not in lhs.free_vars]
        for env in iter_solutions(lhs, self.model, outer=free):
            if not self.holds(rhs, env):
                if self.exact or not rhs.bound:
                    return unsat(env)
                return unknown("counter-valuation depends on the window")
        if self.exact:
            return sat()
        return unknown("validity cannot be decided inside a window")

    def respects(self, gamma, ec):
        return respects(gamma, ec, self)


def _require_valued(ec, valuation):
    for v in ec.free_vars:
        if v not in valuation:
            raise NotValued(f"variable {v.name} has no value")


def respects(gamma, ec, backend):
    """Does the substitution ``gamma`` satisfy ``ec``?

    Every free variable of ``ec`` must be mapped to a value constant.
    """
    env = {}
    for v in ec.free_vars:
        t = gamma.get(v)
        if t is None or not is_value(t):
            raise NotValued(f"{v.name} is not mapped to a value")
        env[v] = evaluate(t, {}, backend.model)
    try:
        ok = backend.holds(ec, env)
    except SolverUnknown as exc:
        return unknown(str(exc))
    return sat(env) if ok else unsat()


def check_sat(ec, backend):
    return backend.check_sat(ec)


def check_valid_implication(lhs, rhs, backend):
    return backend.check_valid_implication(lhs, rhs)


def holds(ec, valuation, backend):
    return backend.holds(ec, valuation)


__all__ = [
    "IntMod", "IntWindow", "UnboundedInt", "TheoryModel", "ExistentialConstraint",
    "Verdict", "Status", "EnumBackend", "evaluate", "holds", "respects", "check_sat",
    "check_valid_implication", "prenex_conjoin", "iter_solutions", "constraint",
]
