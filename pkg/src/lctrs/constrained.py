"""Existentially constrained terms and their comparison.

An ``ECTerm`` is ``Π X. s [∃xs. φ]``: the logical variables ``X`` must be
instantiated by values satisfying the constraint; every other variable
of ``s`` is an ordinary variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import SolverUnknown
from .terms import (
    NOT, App, Var, apply_subst, format_term, fresh_rename, is_value, var_list, vars_of, eq, conj,
)
from .theory import ExistentialConstraint, constraint


@dataclass(frozen=True)
class ECTerm:
    logical: frozenset
    term: object
    constraint: ExistentialConstraint = field(default_factory=ExistentialConstraint)

    def __post_init__(self):
        object.__setattr__(self, "logical", frozenset(self.logical))

    @property
    def non_logical(self):
        return frozenset(v for v in var_list(self.term) if v not in self.logical)

    def __str__(self):
        return format_ect(self)


def ect(term, body=None, logical=None, bound=()):
    """Convenience constructor; ``logical`` defaults to the free constraint variables."""
    ec = constraint(body, bound) if body is not None else ExistentialConstraint()
    if logical is None:
        logical = ec.free_vars
    return ECTerm(frozenset(logical), term, ec)


def format_ect(c):
    xs = sorted(c.logical)
    head = f"Π{{{', '.join(v.name for v in xs)}}}. " if xs else ""
    return f"{head}{format_term(c.term)} [{c.constraint}]"


def well_formed(c):
    """Violations of the well-formedness conditions; empty when well formed."""
    out = []
    ec = c.constraint
    body_vars = vars_of(ec.body)
    term_vars = vars_of(c.term)
    if ec.body.sort.name != "Bool":
        out.append("constraint body is not Bool-sorted")
    unused = [v for v in ec.bound if v not in body_vars]
    if unused:
        out.append("binder unused: " + ", ".join(v.name for v in unused))
    if len(set(ec.bound)) != len(ec.bound):
        out.append("repeated binder")
    if not ec.free_vars <= c.logical:
        missing = sorted(ec.free_vars - c.logical)
        out.append("FVar ⊄ X: " + ", ".join(v.name for v in missing))
    if not c.logical <= term_vars:
        extra = sorted(c.logical - term_vars)
        out.append("X ⊄ Var(s): " + ", ".join(v.name for v in extra))
    clash = sorted(set(ec.bound) & term_vars)
    if clash:
        out.append("BVar ∩ Var(s) ≠ ∅: " + ", ".join(v.name for v in clash))
    bad = sorted(v for v in c.logical if not v.sort.theory)
    if bad:
        out.append("X not theory-sorted: " + ", ".join(v.name for v in bad))
    return out


# ---------------------------------------------------------------------------
# three-valued answers

class Tri(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class TriVerdict:
    answer: Tri
    evidence: object = field(default=None, compare=False)
    reason: str = ""

    @property
    def yes(self):
        return self.answer is Tri.YES

    @property
    def no(self):
        return self.answer is Tri.NO

    @property
    def unknown(self):
        return self.answer is Tri.UNKNOWN

    def __str__(self):
        return self.answer.value


def YES(evidence=None, reason=""):
    return TriVerdict(Tri.YES, evidence, reason)


def NO(evidence=None, reason=""):
    return TriVerdict(Tri.NO, evidence, reason)


def UNKNOWN(reason="", evidence=None):
    return TriVerdict(Tri.UNKNOWN, evidence, reason)


# ---------------------------------------------------------------------------
# satisfiability, subsumption, equivalence

def is_sat_ect(c, backend):
    return backend.check_sat(c.constraint)


def subsumes(a, b, backend):
    """Is every instance of ``a`` an instance of ``b``?

    Over a finite exact model this enumerates the value instances of ``a``
    and tests each against ``b``.  Otherwise it looks for a matcher from
    ``b`` onto ``a`` and proves the transported constraint valid; failing
    that, one concrete value instance of ``a`` is tested against ``b``.
    """
    from .interpret import contains_instance, value_instances

    if backend.exact:
        for u in value_instances(a, backend.model):
            if not contains_instance(b, u, backend):
                return NO(u, "value instance of the first term outside the second")
        return YES(reason="all value instances covered")

    sa = backend.check_sat(a.constraint)
    if sa.is_unsat:
        return YES(reason="first term is unsatisfiable")
    proof = _syntactic_subsumption(a, b, backend)
    if proof is not None and proof.is_sat:
        return YES(reason="matcher with valid transported constraint")
    if proof is not None and proof.is_unsat and proof.witness is not None:
        # the refuting valuation of the transported constraint is a good first guess
        u = _counter_instance(a, b, proof.witness, backend, tries=1)
        if u is not None:
            return NO(u, "value instance of the first term outside the second")
    if sa.is_sat:
        u = _counter_instance(a, b, sa.witness, backend)
        if u is not None:
            return NO(u, "value instance of the first term outside the second")
    return UNKNOWN("syntactic check inconclusive")


def _counter_instance(a, b, witness, backend, tries=8):
    # distinct logical assignments of a, each blocked after it is tested
    from .interpret import contains_instance

    logical = sorted(a.logical)
    ec = a.constraint
    blocks = []
    for _ in range(tries):
        u = _witness_instance(a, witness, backend.model)
        try:
            if not contains_instance(b, u, backend):
                return u
        except SolverUnknown:
            pass
        if not logical:
            return None
        point = conj(*(eq(v, _value_of(v, witness, backend.model)) for v in logical))
        blocks.append(App(NOT, (point,)))
        v = backend.check_sat(ExistentialConstraint(ec.bound, conj(ec.body, *blocks)))
        if not v.is_sat:
            return None
        witness = v.witness
    return None


def _value_of(v, witness, model):
    return model.value_term(witness.get(v, False if v.sort.name == "Bool" else 0), v.sort)


def _witness_instance(c, witness, model):
    return apply_subst({v: _value_of(v, witness, model) for v in c.logical}, c.term)


def _syntactic_subsumption(a, b, backend):
    """Validity verdict for the transported constraint, or None if no matcher.

    Logical variables of ``b`` may only stand for values or logical
    variables of ``a``; where ``b`` has a value or a repeated logical
    variable facing a logical variable of ``a``, an equation is recorded.
    """
    avoid = vars_of(a.term, a.constraint.body) | set(a.constraint.bound)
    ren = fresh_rename(avoid | vars_of(b.term, b.constraint.body) | set(b.constraint.bound),
                       [v for v in vars_of(b.term, b.constraint.body) | set(b.constraint.bound)
                        if v in avoid])
    bt = apply_subst(ren, b.term)
    blog = {ren.get(v, v) for v in b.logical}
    bec = ExistentialConstraint(tuple(ren.get(v, v) for v in b.constraint.bound),
                                apply_subst(ren, b.constraint.body))

    def theory_side(t):
        return is_value(t) or (isinstance(t, Var) and t in a.logical)

    sigma = {}
    obligations = []
    stack = [(bt, a.term)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            if p.sort != s.sort:
                return None
            if p in blog and not theory_side(s):
                return None
            if p in sigma:
                if sigma[p] != s:
                    if p in blog:
                        obligations.append(eq(sigma[p], s))
                    else:
                        return None
            else:
                sigma[p] = s
        elif is_value(p):
            if p == s:
                continue
            if isinstance(s, Var) and s in a.logical:
                obligations.append(eq(s, p))
            else:
                return None
        elif isinstance(s, Var) or p.head != s.head:
            return None
        else:
            stack.extend(zip(p.args, s.args))
    target = ExistentialConstraint(
        bec.bound, conj(apply_subst(sigma, bec.body), *obligations))
    target = ExistentialConstraint(tuple(v for v in target.bound if v in vars_of(target.body)),
                                   target.body)
    return backend.check_valid_implication(a.constraint, target)


def equivalent(a, b, backend):
    """Do ``a`` and ``b`` have the same value instances?"""
    from .interpret import value_instances

    if backend.exact:
        va = set(value_instances(a, backend.model))
        vb = set(value_instances(b, backend.model))
        if va == vb:
            return YES(reason="equal value-instance sets")
        diff = sorted(va ^ vb, key=format_term)
        return NO(diff[0], "value instance in exactly one of the two")

    sa, sb = backend.check_sat(a.constraint), backend.check_sat(b.constraint)
    if sa.is_unsat and sb.is_unsat:
        return YES(reason="both unsatisfiable")
    if sa.is_unsat != sb.is_unsat and not (sa.is_unknown or sb.is_unknown):
        return NO(reason="exactly one side is unsatisfiable")
    ab = subsumes(a, b, backend)
    if ab.no:
        return ab
    ba = subsumes(b, a, backend)
    if ba.no:
        return ba
    if ab.yes and ba.yes:
        return YES(reason="mutual subsumption")
    return UNKNOWN("subsumption undecided in one direction")


__all__ = [
    "ECTerm", "ect", "format_ect", "well_formed", "Tri", "TriVerdict", "YES", "NO", "UNKNOWN",
    "is_sat_ect", "subsumes", "equivalent",
]
