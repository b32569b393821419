"""Sorted first-order terms, positions, substitutions and matching.

Terms are immutable and hashable.  A position is a tuple of 1-based
argument indices; the root is the empty tuple.  Substitutions are plain
dicts from ``Var`` to ``Term``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import re

from .errors import InvalidPosition, NonLinearPattern, SortMismatch


@dataclass(frozen=True)
class Sort:
    name: str
    theory: bool = False

    def __str__(self):
        return self.name


INT = Sort("Int", True)
BOOL = Sort("Bool", True)


@dataclass(frozen=True)
class FunSym:
    """A function symbol ``name : arg_sorts -> result``.

    ``value`` carries the model element for value constants and is None
    for every other symbol.
    """

    name: str
    arg_sorts: tuple = ()
    result: Sort = INT
    theory: bool = False
    value: object = None

    def __post_init__(self):
        if self.theory and not (self.result.theory and all(s.theory for s in self.arg_sorts)):
            raise SortMismatch(f"theory symbol {self.name} over non-theory sorts")
        if self.value is not None and (self.arg_sorts or not self.theory):
            raise SortMismatch(f"value {self.name} must be a nullary theory symbol")

    @property
    def arity(self):
        return len(self.arg_sorts)

    @property
    def is_value(self):
        return self.value is not None

    def __call__(self, *args):
        return App(self, args)

    def __str__(self):
        return self.name


class Var:
    __slots__ = ("name", "sort", "_hash")

    def __init__(self, name, sort=INT):
        self.name = name
        self.sort = sort
        self._hash = hash(("var", name, sort))

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name and self.sort == other.sort

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.name, self.sort.name) < (other.name, other.sort.name)

    def __repr__(self):
        return f"Var({self.name!r}, {self.sort.name})"

    def __str__(self):
        return self.name


class App:
    __slots__ = ("head", "args", "_hash")

    def __init__(self, head, args=()):
        args = tuple(args)
        if len(args) != head.arity:
            raise SortMismatch(f"{head.name} expects {head.arity} arguments, got {len(args)}")
        for a, s in zip(args, head.arg_sorts):
            if a.sort != s:
                raise SortMismatch(f"argument of sort {a.sort} where {head.name} expects {s}")
        self.head = head
        self.args = args
        self._hash = hash((head, args))

    @property
    def sort(self):
        return self.head.result

    def __eq__(self, other):
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.head == other.head
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({format_term(self)})"

    def __str__(self):
        return format_term(self)


Term = Var | App


# ---------------------------------------------------------------------------
# theory signature

def _sym(name, args, result):
    return FunSym(name, tuple(args), result, theory=True)


ADD = _sym("+", (INT, INT), INT)
SUB = _sym("-", (INT, INT), INT)
MUL = _sym("*", (INT, INT), INT)
NEG = _sym("neg", (INT,), INT)
LE = _sym("<=", (INT, INT), BOOL)
LT = _sym("<", (INT, INT), BOOL)
GE = _sym(">=", (INT, INT), BOOL)
GT = _sym(">", (INT, INT), BOOL)
EQ = _sym("=", (INT, INT), BOOL)
IFF = _sym("=", (BOOL, BOOL), BOOL)
AND = _sym("and", (BOOL, BOOL), BOOL)
OR = _sym("or", (BOOL, BOOL), BOOL)
NOT = _sym("not", (BOOL,), BOOL)
IMPLIES = _sym("=>", (BOOL, BOOL), BOOL)

THEORY_SYMBOLS = (ADD, SUB, MUL, NEG, LE, LT, GE, GT, EQ, IFF, AND, OR, NOT, IMPLIES)


@lru_cache(maxsize=None)
def value_sym(v, sort=INT):
    if sort == BOOL:
        return FunSym("true" if v else "false", (), BOOL, True, bool(v))
    return FunSym(str(v), (), sort, True, v)


def val(v, sort=None):
    """The value constant for ``v`` (an int or a bool)."""
    if sort is None:
        sort = BOOL if isinstance(v, bool) else INT
    return App(value_sym(v, sort))


TRUE = val(True)
FALSE = val(False)


def eq(a, b):
    return App(IFF if a.sort == BOOL else EQ, (a, b))


def conj(*parts):
    """Right-nested conjunction of the flattened parts, dropping literal ``true``."""
    parts = [q for p in parts for q in conjuncts(p) if q != TRUE]
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = App(AND, (p, out))
    return out


def conjuncts(t):
    """Flatten nested top-level conjunctions."""
    if isinstance(t, App) and t.head == AND:
        return conjuncts(t.args[0]) + conjuncts(t.args[1])
    return [t]


def is_value(t):
    return isinstance(t, App) and t.head.is_value


def is_theory_term(t):
    if isinstance(t, Var):
        return t.sort.theory
    return t.head.theory and all(is_theory_term(a) for a in t.args)


# ---------------------------------------------------------------------------
# positions

def positions(t):
    """All positions of ``t`` in leftmost-outermost (pre-)order."""
    out = []

    def walk(u, p):
        out.append(p)
        if isinstance(u, App):
            for i, a in enumerate(u.args, 1):
                walk(a, p + (i,))

    walk(t, ())
    return out


def subterm_at(t, p):
    for i in p:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise InvalidPosition(f"position {list(p)} not in term")
        t = t.args[i - 1]
    return t


def replace_at(t, p, u):
    old = subterm_at(t, p)
    if old.sort != u.sort:
        raise SortMismatch(f"cannot put a {u.sort} term where a {old.sort} term is")
    return _replace(t, tuple(p), u)


def _replace(t, p, u):
    if not p:
        return u
    i = p[0]
    args = list(t.args)
    args[i - 1] = _replace(args[i - 1], p[1:], u)
    return App(t.head, args)


# ---------------------------------------------------------------------------
# variables, values, substitutions

def var_list(*terms):
    """Variables in order of first occurrence."""
    seen = {}

    def walk(u):
        if isinstance(u, Var):
            seen.setdefault(u, None)
        else:
            for a in u.args:
                walk(a)

    for t in terms:
        walk(t)
    return list(seen)


def vars_of(*terms):
    return frozenset(var_list(*terms))


def vals_of(t):
    if isinstance(t, Var):
        return set()
    if t.head.is_value:
        return {t.head}
    out = set()
    for a in t.args:
        out |= vals_of(a)
    return out


def is_linear(t):
    seen = set()

    def walk(u):
        if isinstance(u, Var):
            if u in seen:
                return False
            seen.add(u)
            return True
        return all(walk(a) for a in u.args)

    return walk(t)


def is_value_free(t):
    return not vals_of(t)


def apply_subst(sigma, t):
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t, t)
    if not t.args:
        return t
    return App(t.head, [apply_subst(sigma, a) for a in t.args])


def match_left_linear(pattern, subject):
    """Match a linear pattern; returns the matcher or None."""
    if not is_linear(pattern):
        raise NonLinearPattern(f"{format_term(pattern)} is not linear")
    return match(pattern, subject)


def match(pattern, subject, sigma=None):
    """Syntactic matching with consistency for repeated variables."""
    sigma = dict(sigma or {})
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            if p.sort != s.sort:
                return None
            bound = sigma.get(p)
            if bound is None:
                sigma[p] = s
            elif bound != s:
                return None
        elif isinstance(s, Var) or p.head != s.head:
            return None
        else:
            stack.extend(zip(p.args, s.args))
    return sigma


def unify(s, t):
    """Most general unifier of ``s`` and ``t`` (triangular form resolved), or None."""
    sigma = {}

    def walk(u):
        while isinstance(u, Var) and u in sigma:
            u = sigma[u]
        return u

    def occurs(v, u):
        u = walk(u)
        if isinstance(u, Var):
            return u == v
        return any(occurs(v, a) for a in u.args)

    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = walk(a), walk(b)
        if a == b:
            continue
        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a
        if isinstance(a, Var):
            if a.sort != b.sort or occurs(a, b):
                return None
            sigma[a] = b
        elif a.head != b.head:
            return None
        else:
            stack.extend(zip(a.args, b.args))

    def resolve(u):
        u = walk(u)
        if isinstance(u, Var):
            return u
        return App(u.head, [resolve(a) for a in u.args])

    return {v: resolve(v) for v in sigma}


_SUFFIX = re.compile(r"#\d+$")


def base_name(name):
    return _SUFFIX.sub("", name)


def fresh_rename(avoid, targets):
    """Rename every variable in ``targets`` to an unused ``base#k`` name.

    Names are compared regardless of sort so the result can be declared in
    a single solver scope.  Targets are processed in name order.
    """
    taken = {v.name for v in avoid} | {v.name for v in targets}
    out = {}
    for v in sorted(set(targets)):
        base = base_name(v.name)
        k = 1
        while f"{base}#{k}" in taken:
            k += 1
        name = f"{base}#{k}"
        taken.add(name)
        out[v] = Var(name, v.sort)
    return out


# ---------------------------------------------------------------------------
# printing

_INFIX = {
    "=>": (1, "right", "=>"),
    "or": (2, "assoc", "\\/"),
    "and": (3, "assoc", "/\\"),
    "<=": (5, "none", "<="),
    "<": (5, "none", "<"),
    ">=": (5, "none", ">="),
    ">": (5, "none", ">"),
    "=": (5, "none", "="),
    "+": (6, "left", "+"),
    "-": (6, "left", "-"),
    "*": (7, "left", "*"),
}
_ATOM = 10


def _prec(t):
    if isinstance(t, App) and t.head.theory:
        if t.head.name in _INFIX and t.head.arity == 2:
            return _INFIX[t.head.name][0]
        if t.head.name == "not":
            return 4
        if t.head.name == "neg":
            return 8
    return _ATOM


def format_term(t):
    if isinstance(t, Var):
        return t.name
    h = t.head
    if h.is_value:
        return h.name
    if h.theory and h.arity == 2 and h.name in _INFIX:
        prec, assoc, op = _INFIX[h.name]
        left, right = t.args
        lp, rp = _prec(left), _prec(right)
        ls = format_term(left)
        rs = format_term(right)
        # conjunction and disjunction are printed flat whatever the nesting
        if lp < prec or (lp == prec and assoc not in ("left", "assoc")):
            ls = f"({ls})"
        if rp < prec or (rp == prec and assoc not in ("right", "assoc")):
            rs = f"({rs})"
        return f"{ls} {op} {rs}"
    if h.theory and h.name == "not":
        inner = format_term(t.args[0])
        return f"not {inner}" if _prec(t.args[0]) >= 4 else f"not ({inner})"
    if h.theory and h.name == "neg":
        a = t.args[0]
        inner = format_term(a)
        if _prec(a) < 8 or is_value(a):
            inner = f"({inner})"
        return f"-{inner}"
    if not t.args:
        return h.name
    return f"{h.name}({', '.join(format_term(a) for a in t.args)})"
