"""Constrained rewrite rules and logically constrained rewrite systems."""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import (
    BOOL, THEORY_SYMBOLS, TRUE, Var, apply_subst, eq, format_term, fresh_rename,
    is_linear, is_value_free, var_list, vars_of, App,
)
from .theory import ExistentialConstraint


@dataclass(frozen=True)
class ConstrainedRule:
    """``Π Z. lhs -> rhs [guard]``."""

    id: str
    logical: frozenset
    lhs: object
    rhs: object
    guard: object = TRUE
    calc: bool = False

    def __post_init__(self):
        object.__setattr__(self, "logical", frozenset(self.logical))

    def extra_vars(self):
        return extra_vars(self)

    def guard_constraint(self):
        """The guard with variables outside ``lhs`` and ``rhs`` existentially bound."""
        lr = vars_of(self.lhs, self.rhs)
        return ExistentialConstraint(
            tuple(v for v in var_list(self.guard) if v not in lr), self.guard)

    def __str__(self):
        zs = sorted(self.logical)
        head = f"Π{{{', '.join(v.name for v in zs)}}}. " if zs else ""
        return f"{head}{format_term(self.lhs)} -> {format_term(self.rhs)} [{format_term(self.guard)}]"


def rule(id, lhs, rhs, guard=TRUE, logical=None, calc=False):
    """Build a rule; ``logical`` defaults to guard variables plus extra variables."""
    if logical is None:
        logical = vars_of(guard) | (vars_of(rhs) - vars_of(lhs))
    return ConstrainedRule(id, frozenset(logical), lhs, rhs, guard, calc)


def extra_vars(r):
    return vars_of(r.rhs) - vars_of(r.lhs)


@dataclass(frozen=True)
class RuleCheck:
    violations: tuple
    left_linear: bool
    left_value_free: bool

    @property
    def ok(self):
        return not self.violations


def validate_rule(r):
    out = []
    if isinstance(r.lhs, Var):
        out.append("left-hand side is a variable")
    if r.lhs.sort != r.rhs.sort:
        out.append(f"sides have different sorts {r.lhs.sort} and {r.rhs.sort}")
    if r.guard.sort != BOOL:
        out.append("guard is not Bool-sorted")
    need = vars_of(r.guard) | extra_vars(r)
    if not need <= r.logical:
        miss = sorted(need - r.logical)
        out.append("Var(π) ∪ ExVar ⊄ Z: " + ", ".join(v.name for v in miss))
    bad = sorted(v for v in r.logical if not v.sort.theory)
    if bad:
        out.append("Z not theory-sorted: " + ", ".join(v.name for v in bad))
    return RuleCheck(tuple(out), is_linear(r.lhs), is_value_free(r.lhs))


def fresh_variant(r, avoid):
    """Rename the rule's variables that occur in ``avoid``; returns (rule, renaming)."""
    rv = vars_of(r.lhs, r.rhs, r.guard) | r.logical
    delta = fresh_rename(set(avoid) | rv, [v for v in rv if v in set(avoid)])
    if not delta:
        return r, {}
    return ConstrainedRule(
        r.id, frozenset(delta.get(v, v) for v in r.logical),
        apply_subst(delta, r.lhs), apply_subst(delta, r.rhs), apply_subst(delta, r.guard),
        r.calc,
    ), delta


def calculation_rules(symbols=THEORY_SYMBOLS):
    """``f(x1..xn) -> y [y = f(x1..xn)]`` for every non-value theory symbol."""
    out = []
    for f in symbols:
        if f.is_value or not f.theory or f.arity == 0:
            continue
        xs = [Var(f"x{i}", s) for i, s in enumerate(f.arg_sorts, 1)]
        y = Var("y", f.result)
        lhs = App(f, xs)
        tag = f.name if f.arg_sorts[0] != BOOL or f.name != "=" else "<=>"
        out.append(ConstrainedRule(f"calc:{tag}", frozenset(xs + [y]), lhs, y, eq(y, lhs), True))
    return out


@dataclass(frozen=True)
class LCTRS:
    rules: tuple
    includes_calc: bool = False
    symbols: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    @property
    def user_rules(self):
        return tuple(r for r in self.rules if not r.calc)

    def rule(self, id):
        for r in self.rules:
            if r.id == id:
                return r
        raise KeyError(id)


def system(rules, calc_symbols=THEORY_SYMBOLS, with_calc=True):
    """An LCTRS from user rules, adding calculation rules unless told not to."""
    rules = list(rules)
    if with_calc:
        rules += calculation_rules(calc_symbols)
    return LCTRS(tuple(rules), with_calc, tuple(calc_symbols) if with_calc else ())


__all__ = [
    "ConstrainedRule", "rule", "extra_vars", "RuleCheck", "validate_rule", "fresh_variant",
    "calculation_rules", "LCTRS", "system",
]
