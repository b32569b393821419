"""Logically constrained term rewriting with existentially constrained terms."""

from .constrained import ECTerm, TriVerdict, Tri, ect, equivalent, format_ect, subsumes, well_formed
from .engine import MG, PARTIAL, Mode, all_steps, construct_step, find_redexes, is_normal_form, reduce
from .errors import *  # noqa: F401,F403
from .interpret import (
    DomainSpec, contains_instance, enumerate_instances, instantiation_normal, interpret_rule,
    interpret_system, parse_domain, value_instances,
)
from .rules import LCTRS, ConstrainedRule, calculation_rules, rule, system, validate_rule
from .syntax import format_problem, load_problem, parse_problem
from .terms import (
    ADD, AND, BOOL, EQ, FALSE, GE, GT, INT, LE, LT, MUL, NEG, NOT, OR, SUB, TRUE, App, FunSym,
    Sort, Var, apply_subst, conj, eq, format_term, match, positions, replace_at, subterm_at, val,
)
from .theory import (
    EnumBackend, ExistentialConstraint, IntMod, IntWindow, UnboundedInt, Verdict, Status,
    check_sat, check_valid_implication, constraint, evaluate,
)
from .smt import SmtBackend

__version__ = "0.1.0"
