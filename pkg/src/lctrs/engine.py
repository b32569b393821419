"""Partial and most general constrained rewriting.

Both modes share redex search and step construction and differ only in
the gate on the instantiated guard: a partial step needs the guard to be
satisfiable together with the term's constraint, a most general step
needs it to be implied by that constraint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .constrained import ECTerm, NO, UNKNOWN, YES, equivalent, format_ect
from .errors import CapExceeded, UnsatisfiableInput
from .rules import extra_vars, fresh_variant
from .terms import (
    App, Var, apply_subst, conj, eq, format_term, is_value, match, positions,
    replace_at, subterm_at, var_list, vars_of, NOT,
)
from .theory import ExistentialConstraint, iter_solutions, prenex_conjoin


class Mode(Enum):
    MOST_GENERAL = "mg"
    PARTIAL = "partial"

    @classmethod
    def parse(cls, text):
        if isinstance(text, Mode):
            return text
        t = text.lower().replace("-", "").replace("_", "")
        if t in ("mg", "mostgeneral"):
            return cls.MOST_GENERAL
        if t == "partial":
            return cls.PARTIAL
        raise ValueError(f"unknown mode {text!r}")


MG = Mode.MOST_GENERAL
PARTIAL = Mode.PARTIAL


@dataclass(frozen=True)
class RedexInfo:
    rule_id: str
    position: tuple
    matcher: dict = field(compare=False)
    mode: Mode
    gate: object = field(compare=False)
    variant: object = field(compare=False, default=None)


@dataclass
class StepRecord:
    input: ECTerm
    output: ECTerm
    rule_id: str
    position: tuple
    matcher: dict
    mode: Mode
    gate: object
    variant: object = None

    def to_json(self):
        return json.dumps(trace_entry(self), ensure_ascii=False)


def trace_entry(step):
    return {
        "mode": step.mode.value,
        "ruleId": step.rule_id,
        "position": list(step.position),
        "matcher": {v.name: format_term(t) for v, t in sorted(step.matcher.items())},
        "input": format_ect(step.input),
        "output": format_ect(step.output),
        "gate": "valid" if step.mode is MG else "sat",
    }


def _variant(c, rule):
    ec = c.constraint
    avoid = vars_of(c.term, ec.body) | set(ec.bound)
    rv = vars_of(rule.lhs, rule.rhs, rule.guard) | rule.logical
    return fresh_variant(rule, avoid | rv)[0]


def _iter_redexes(c, rule, mode, backend, unknowns):
    variant = _variant(c, rule)
    lhs = variant.lhs
    lhs_vars = var_list(lhs)
    logical_lhs = [x for x in lhs_vars if x in variant.logical]
    z = tuple(v for v in var_list(variant.guard) if v not in set(lhs_vars))
    s = c.term
    for p in positions(s):
        sub = subterm_at(s, p)
        if isinstance(sub, Var) or sub.head != lhs.head:
            continue
        gamma = match(lhs, sub)
        if gamma is None:
            continue
        if not all(is_value(gamma[x]) or (isinstance(gamma[x], Var) and gamma[x] in c.logical)
                   for x in logical_lhs):
            continue
        target = ExistentialConstraint(z, apply_subst(gamma, variant.guard))
        if mode is PARTIAL:
            gate = backend.check_sat(prenex_conjoin(c.constraint, target))
        else:
            gate = backend.check_valid_implication(c.constraint, target)
        info = RedexInfo(rule.id, p, gamma, mode, gate, variant)
        if gate.is_sat:
            yield info
        elif gate.is_unknown and unknowns is not None:
            unknowns.append(info)


def _require_sat(c, backend):
    v = backend.check_sat(c.constraint)
    if v.is_unsat:
        raise UnsatisfiableInput(f"constraint of {format_ect(c)} is unsatisfiable")
    return v


def find_redexes(c, rule, mode, backend, unknowns=None, check_input=True):
    """Redexes of ``rule`` in ``c`` in leftmost-outermost order.

    Redexes whose gate came back unknown are appended to ``unknowns``.
    """
    mode = Mode.parse(mode)
    if check_input:
        _require_sat(c, backend)
    return list(_iter_redexes(c, rule, mode, backend, unknowns))


def construct_step(c, redex, variant=None):
    variant = variant or redex.variant
    gamma = redex.matcher
    t = replace_at(c.term, redex.position, apply_subst(gamma, variant.rhs))
    pi_g = apply_subst(gamma, variant.guard)
    body = conj(c.constraint.body, pi_g)
    tvars = vars_of(t)
    old = [v for v in c.constraint.bound if v not in tvars]
    new = [v for v in var_list(body) if v not in tvars and v not in set(old)]
    logical = (extra_vars(variant)) | (c.logical & tvars)
    return ECTerm(logical, t, ExistentialConstraint(tuple(old + new), body))


def _step(c, info):
    return StepRecord(c, construct_step(c, info), info.rule_id, info.position, info.matcher,
                      info.mode, info.gate, info.variant)


def all_steps(c, rules, mode, backend, unknowns=None, check_input=True):
    mode = Mode.parse(mode)
    if check_input:
        _require_sat(c, backend)
    out = []
    for r in rules:
        for info in _iter_redexes(c, r, mode, backend, unknowns):
            out.append(_step(c, info))
    return out


def is_normal_form(c, rules, mode, backend):
    mode = Mode.parse(mode)
    _require_sat(c, backend)
    unknowns = []
    for r in rules:
        for info in _iter_redexes(c, r, mode, backend, unknowns):
            return NO(info, f"{mode.value} redex of {info.rule_id} at {list(info.position)}")
    if unknowns:
        return UNKNOWN("some gates were undecided", unknowns)
    return YES(reason="no redex")


# ---------------------------------------------------------------------------
# reduction trees

NORMAL = "normal"
FUEL = "fuel-exhausted"
GATED = "unknown-gated"


@dataclass
class Node:
    id: int
    ect: ECTerm
    depth: int
    tag: str = None
    duplicate_of: int = None


@dataclass
class Reduction:
    root: ECTerm
    mode: Mode
    nodes: list
    steps: list

    @property
    def frontier(self):
        return [n for n in self.nodes if n.tag is not None]

    def normal_forms(self):
        return [n.ect for n in self.nodes if n.tag == NORMAL]

    def value_normal_forms(self, backend, limit=64):
        """Values denoted by normal forms whose term is a value or a logical variable."""
        out = set()
        for c in self.normal_forms():
            out |= term_values(c, backend, limit)
        return out

    def trace_lines(self):
        return [s.to_json() for s in self.steps]


def term_values(c, backend, limit=64):
    """All values a constrained term can denote, if its term is a value or logical variable."""
    t = c.term
    if is_value(t):
        return {t.head.value}
    if not (isinstance(t, Var) and t in c.logical):
        return set()
    if backend.exact:
        return {env[t] for env in iter_solutions(c.constraint, backend.model, outer=[t])}
    out = set()
    ec = c.constraint
    while len(out) < limit:
        block = [App(NOT, (eq(t, backend.model.value_term(x, t.sort)),)) for x in sorted(out)]
        v = backend.check_sat(ExistentialConstraint(ec.bound, conj(ec.body, *block)))
        if not v.is_sat:
            break
        out.add(v.witness[t])
    return out


def _shape(c):
    ren = {}
    for i, v in enumerate(var_list(c.term)):
        ren[v] = Var(f"{'L' if v in c.logical else 'N'}{i}", v.sort)
    return apply_subst(ren, c.term)


class _Dedup:
    def __init__(self, backend):
        self.backend = backend
        self.keys = {}
        self.shapes = {}

    def find(self, c, node_id):
        if self.backend.exact:
            from .interpret import value_instances
            try:
                key = (frozenset(value_instances(c, self.backend.model)),)
            except CapExceeded:
                key = None
            if key is not None:
                if key in self.keys:
                    return self.keys[key]
                self.keys[key] = node_id
                return None
        shape = _shape(c)
        for other_id, other in self.shapes.get(shape, ()):
            if equivalent(c, other, self.backend).yes:
                return other_id
        self.shapes.setdefault(shape, []).append((node_id, c))
        return None


def reduce(c, rules, mode, backend, fuel=50, strategy="full", dedup=True):
    """Breadth-first reduction tree of depth at most ``fuel``.

    Leaves are tagged normal, fuel-exhausted or unknown-gated.  Nodes found
    equivalent to an earlier node are recorded but not expanded again.
    """
    mode = Mode.parse(mode)
    _require_sat(c, backend)
    root = Node(0, c, 0)
    nodes = [root]
    steps = []
    seen = _Dedup(backend) if dedup else None
    if seen:
        seen.find(c, 0)
    queue = [root]
    while queue:
        nxt = []
        for node in queue:
            unknowns = []
            out = all_steps(node.ect, rules, mode, backend, unknowns, check_input=False)
            if not out:
                node.tag = GATED if unknowns else NORMAL
                continue
            if node.depth >= fuel:
                node.tag = FUEL
                continue
            if strategy == "first":
                out = out[:1]
            for st in out:
                steps.append(st)
                child = Node(len(nodes), st.output, node.depth + 1)
                nodes.append(child)
                dup = seen.find(st.output, child.id) if seen else None
                if dup is not None:
                    child.duplicate_of = dup
                else:
                    nxt.append(child)
        queue = nxt
    return Reduction(c, mode, nodes, steps)


__all__ = [
    "Mode", "MG", "PARTIAL", "RedexInfo", "StepRecord", "find_redexes", "construct_step",
    "all_steps", "is_normal_form", "reduce", "Reduction", "Node", "term_values",
    "NORMAL", "FUEL", "GATED", "trace_entry",
]
