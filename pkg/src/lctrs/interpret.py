"""Ground semantics: instances of constrained terms and rules.

Everything here enumerates over a finite carrier.  With an ``IntMod``
model the sets are exact; with an ``IntWindow`` model they are the part
of the true set that lives inside the window.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .constrained import NO, UNKNOWN, YES
from .errors import CapExceeded
from .terms import (
    Var, apply_subst, format_term, fresh_rename, is_value, match, positions,
    replace_at, subterm_at, unify, var_list, vars_of,
)
from .theory import EnumBackend, IntMod, IntWindow, iter_solutions


@dataclass(frozen=True)
class DomainSpec:
    """Where instances are drawn from.

    ``pool`` lists extra terms that non-logical variables may be replaced
    by in the standard interpretation (each variable may also stay as it
    is).  ``max_instances`` bounds every enumeration.
    """

    model: object
    pool: tuple = ()
    max_instances: int = 100_000

    @property
    def exact(self):
        return self.model.exact

    @property
    def backend(self):
        return EnumBackend(self.model)


def parse_domain(text):
    """``mod:M`` or ``int:LO..HI``."""
    kind, _, rest = text.partition(":")
    if kind == "mod":
        return IntMod(int(rest))
    if kind == "int":
        lo, _, hi = rest.partition("..")
        return IntWindow(int(lo), int(hi))
    raise ValueError(f"unknown domain {text!r}")


@dataclass(frozen=True)
class GroundRule:
    lhs: object
    rhs: object

    def __str__(self):
        return f"{format_term(self.lhs)} -> {format_term(self.rhs)}"


def _model(d):
    return d.model if isinstance(d, DomainSpec) else d


def _cap(d, default=100_000):
    return d.max_instances if isinstance(d, DomainSpec) else default


# ---------------------------------------------------------------------------
# constrained terms

def logical_assignments(c, model):
    """Value assignments to the logical variables that satisfy the constraint."""
    order = [v for v in var_list(c.term) if v in c.logical]
    yield from iter_solutions(c.constraint, model, outer=order)


def canonicalize(t, skip=frozenset()):
    """Rename variables to v1, v2, ... per sort in first-occurrence order."""
    counters = {}
    ren = {}
    for v in var_list(t):
        if v in skip:
            continue
        k = counters.get(v.sort, 0) + 1
        counters[v.sort] = k
        ren[v] = Var(f"v{k}", v.sort)
    return apply_subst(ren, t)


def value_instances(c, d, canonical=True):
    """The value interpretation of ``c``.

    Logical variables become values; with ``canonical`` the remaining
    variables are renamed to v1, v2, ... so that the result is a set of
    representatives up to renaming.  Without it they are left unchanged.
    """
    model = _model(d)
    cap = _cap(d)
    out = set()
    for env in logical_assignments(c, model):
        sub = {v: model.value_term(x, v.sort) for v, x in env.items()}
        t = apply_subst(sub, c.term)
        out.add(canonicalize(t) if canonical else t)
        if len(out) > cap:
            raise CapExceeded(f"more than {cap} value instances")
    return out


def enumerate_value_instances(c, d):
    return value_instances(c, d, canonical=True)


def enumerate_instances(c, d):
    """The standard interpretation restricted to pool substitutions."""
    model = _model(d)
    pool = d.pool if isinstance(d, DomainSpec) else ()
    cap = _cap(d)
    nonlog = [v for v in var_list(c.term) if v not in c.logical]
    choices = [[v] + [p for p in pool if p.sort == v.sort and p != v] for v in nonlog]
    out = set()
    for env in logical_assignments(c, model):
        sub = {v: model.value_term(x, v.sort) for v, x in env.items()}
        base = apply_subst(sub, c.term)
        for pick in product(*choices):
            out.add(apply_subst(dict(zip(nonlog, pick)), base))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} instances")
    return out


def _value_env(c, sigma, model):
    env = {}
    for v in c.logical:
        t = sigma.get(v)
        if t is None or not is_value(t):
            return None
        x = t.head.value
        if t.sort.name == "Int" and model.normalize(x) != x:
            return None
        env[v] = x
    return env


def _holds(c, env, backend):
    if isinstance(backend, (IntMod, IntWindow)):
        backend = EnumBackend(backend)
    elif isinstance(backend, DomainSpec):
        backend = backend.backend
    return backend.holds(c.constraint, env)


def contains_instance(c, u, backend):
    """Is ``u`` in the standard interpretation of ``c``?"""
    sigma = match(c.term, u)
    if sigma is None:
        return False
    model = getattr(backend, "model", backend)
    env = _value_env(c, sigma, model)
    if env is None:
        return False
    return _holds(c, env, backend)


def contains_value_instance(c, u, backend):
    """Is ``u`` in the value interpretation of ``c``?"""
    sigma = match(c.term, u)
    if sigma is None:
        return False
    model = getattr(backend, "model", backend)
    env = _value_env(c, sigma, model)
    if env is None:
        return False
    images = [sigma[v] for v in var_list(c.term) if v not in c.logical]
    if not all(isinstance(t, Var) for t in images) or len(set(images)) != len(images):
        return False
    return _holds(c, env, backend)


def term_instance_order(s, t):
    """``s <= t``: is ``t`` an instance of ``s``?"""
    return match(s, t) is not None


# ---------------------------------------------------------------------------
# rules

def interpret_rule(rule, d):
    """Ground rules ``lσ -> rσ`` for valued σ over the rule's logical variables."""
    model = _model(d)
    cap = _cap(d)
    lr_vars = var_list(rule.lhs, rule.rhs)
    order = [v for v in lr_vars if v in rule.logical]
    ec = rule.guard_constraint()
    out = set()
    for env in iter_solutions(ec, model, outer=order):
        sub = {v: model.value_term(x, v.sort) for v, x in env.items() if v in set(order)}
        out.add(GroundRule(apply_subst(sub, rule.lhs), apply_subst(sub, rule.rhs)))
        if len(out) > cap:
            raise CapExceeded(f"more than {cap} ground rules")
    return out


class GroundIndex:
    """Ground rules grouped by the head symbol of their left-hand side."""

    def __init__(self, rules):
        self.rules = list(rules)
        self.by_head = {}
        for g in self.rules:
            self.by_head.setdefault(g.lhs.head, []).append(g)
        self.sorts = {g.lhs.sort for g in self.rules}

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def interpret_system(rules, d):
    out = []
    for r in rules:
        out.extend(sorted(interpret_rule(r, d), key=str))
    return GroundIndex(out)


def _index(G):
    return G if isinstance(G, GroundIndex) else GroundIndex(G)


def _steps_at(u, G, p):
    sub = subterm_at(u, p)
    if isinstance(sub, Var):
        return
    for g in G.by_head.get(sub.head, ()):
        sigma = match(g.lhs, sub)
        if sigma is not None:
            yield replace_at(u, p, apply_subst(sigma, g.rhs))


def ground_steps(u, G, p=None):
    """One-step reducts of ``u`` by the ground rules ``G`` (optionally only at ``p``)."""
    G = _index(G)
    ps = [tuple(p)] if p is not None else positions(u)
    out = set()
    for q in ps:
        out.update(_steps_at(u, G, q))
    return out


def reducible_at(u, G, p):
    G = _index(G)
    return next(_steps_at(u, G, tuple(p)), None) is not None


def is_ground_normal(u, G):
    G = _index(G)
    return all(next(_steps_at(u, G, q), None) is None for q in positions(u))


def reachable(terms, G, steps):
    """Terms reachable from ``terms`` in at most ``steps`` ground steps."""
    G = _index(G)
    seen = set(terms)
    frontier = set(terms)
    for _ in range(steps):
        nxt = set()
        for u in frontier:
            nxt |= ground_steps(u, G)
        frontier = nxt - seen
        seen |= frontier
        if not frontier:
            break
    return seen


# ---------------------------------------------------------------------------
# instantiation normality

def instantiation_normal(c, rules, d):
    """Is every instance of ``c`` normal with respect to the ground rules of ``rules``?

    For each value instance ``t`` the check is exact: some instance of
    ``t`` is reducible iff a non-variable subterm of ``t`` unifies with a
    ground left-hand side, or ``t`` has a variable of a sort that some
    left-hand side has.
    """
    G = interpret_system(rules, d)
    exact = _model(d).exact
    try:
        insts = sorted(value_instances(c, d), key=format_term)
    except CapExceeded:
        return UNKNOWN("too many value instances")
    for t in insts:
        w = _reducible_instance(t, G)
        if w is not None:
            return NO(w, "an instance is reducible")
    if exact:
        return YES(reason="no instance is reducible")
    return UNKNOWN("window enumeration cannot establish normality")


def _reducible_instance(t, G):
    tv = vars_of(t)
    for q in positions(t):
        sub = subterm_at(t, q)
        if isinstance(sub, Var):
            continue
        for g in G.by_head.get(sub.head, ()):
            gv = vars_of(g.lhs)
            ren = fresh_rename(tv | gv, [v for v in gv if v in tv])
            lhs = apply_subst(ren, g.lhs)
            mgu = unify(sub, lhs)
            if mgu is not None:
                return apply_subst(mgu, t)
    for v in var_list(t):
        for g in G:
            if g.lhs.sort == v.sort:
                return apply_subst({v: g.lhs}, t)
    return None


__all__ = [
    "DomainSpec", "GroundRule", "GroundIndex", "parse_domain", "value_instances",
    "enumerate_value_instances", "enumerate_instances", "contains_instance",
    "contains_value_instance", "term_instance_order", "interpret_rule", "interpret_system",
    "ground_steps", "reducible_at", "is_ground_normal", "reachable", "instantiation_normal",
    "canonicalize", "logical_assignments",
]
