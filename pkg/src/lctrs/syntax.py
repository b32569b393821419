"""Reader and writer for ``.lctrs`` problem files.

One directive per line::

    theory intmod 16            # or: theory int
    sig sum : Int -> Int term
    rule rule-1: sum(x) -> 0 [0 >= x] vars {x}
    ect start: X {x} term sum(x) exists [] phi 1 <= x /\\ x <= 5

The guard, ``vars``, ``X``, ``exists`` and ``phi`` parts are optional.
Variable sorts are inferred from where the variables occur; anything
left undetermined is an integer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .constrained import ECTerm, well_formed
from .errors import ParseError, SortMismatch, ValidationError
from .rules import ConstrainedRule, LCTRS, calculation_rules, validate_rule
from .terms import (
    ADD, AND, BOOL, EQ, GE, GT, IFF, IMPLIES, INT, LE, LT, MUL, NEG, NOT, OR, SUB,
    THEORY_SYMBOLS, TRUE, App, FunSym, Sort, Var, format_term, val, vars_of,
)
from .theory import ExistentialConstraint, IntMod, UnboundedInt


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_#']*)
  | (?P<op>->|=>|/\\|\\/|<=|>=|<|>|=|\+|-|\*|×|∧|∨|¬|≤|≥|⇒|\(|\)|\[|\]|\{|\}|,|:)
""", re.VERBOSE)

_ALIASES = {"×": "*", "∧": "/\\", "∨": "\\/", "¬": "not", "≤": "<=", "≥": ">=", "⇒": "=>"}


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text, line=1, col0=1):
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(line, col0 + i, "a token", text[i])
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            s = _ALIASES.get(s, s)
            if kind == "ident" and s == "not":
                kind = "op"
            out.append(Tok(kind, s, line, col0 + i))
        i = m.end()
    out.append(Tok("eof", "", line, col0 + len(text)))
    return out


# ---------------------------------------------------------------------------
# expressions -> raw syntax trees

_BINARY = [
    ("=>", "right"),
    ("\\/", "right"),
    ("/\\", "right"),
    (None, None),            # prefix not
    ("cmp", "none"),
    ("+-", "left"),
    ("*", "left"),
]
_CMP = {"<=", "<", ">=", ">", "="}


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text, what=None):
        t = self.tok
        if t.text != text or t.kind == "eof":
            raise ParseError(t.line, t.col, what or repr(text), t.text or "end of line")
        return self.take()

    def at(self, text):
        return self.tok.text == text and self.tok.kind != "eof"

    def ident(self, what="an identifier"):
        t = self.tok
        if t.kind != "ident":
            raise ParseError(t.line, t.col, what, t.text or "end of line")
        return self.take()

    def expr(self, level=0):
        if level == 3:
            if self.at("not"):
                t = self.take()
                return ("op", "not", [self.expr(3)], t)
            return self.expr(4)
        if level == 7:
            return self.unary()
        op, assoc = _BINARY[level]
        left = self.expr(level + 1)
        while True:
            t = self.tok
            if t.kind != "op":
                return left
            if op == "cmp":
                hit = t.text in _CMP
            elif op == "+-":
                hit = t.text in ("+", "-")
            else:
                hit = t.text == op
            if not hit:
                return left
            self.take()
            if assoc == "right":
                right = self.expr(level)
                return ("op", t.text, [left, right], t)
            right = self.expr(level + 1)
            left = ("op", t.text, [left, right], t)
            if assoc == "none":
                return left

    def unary(self):
        if self.at("-"):
            t = self.take()
            if self.tok.kind == "int":
                n = self.take()
                return ("int", -int(n.text), [], t)
            return ("op", "neg", [self.unary()], t)
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.take()
            return ("int", int(t.text), [], t)
        if self.at("("):
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.take()
            if t.text in ("true", "false"):
                return ("bool", t.text == "true", [], t)
            if self.at("("):
                self.take()
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.at(","):
                        self.take()
                        args.append(self.expr())
                self.expect(")", "')' or ','")
                return ("app", t.text, args, t)
            return ("name", t.text, [], t)
        raise ParseError(t.line, t.col, "a term", t.text or "end of line")

    def name_list(self, open_, close):
        self.expect(open_)
        out = []
        if not self.at(close):
            out.append(self.ident("a variable name"))
            while self.at(","):
                self.take()
                out.append(self.ident("a variable name"))
        self.expect(close, f"{close!r} or ','")
        return out


# ---------------------------------------------------------------------------
# elaboration with sort inference

_ARITH = {"+": ADD, "-": SUB, "*": MUL, "neg": NEG}
_RELS = {"<=": LE, "<": LT, ">=": GE, ">": GT}
_LOGIC = {"/\\": AND, "\\/": OR, "=>": IMPLIES, "not": NOT}


class _Elab:
    def __init__(self, problem):
        self.p = problem
        self.env = {}
        self.changed = False

    def _err(self, node, msg):
        t = node[3]
        return ValidationError(f"line {t.line}, col {t.col}: {msg}")

    def note(self, node, name, sort):
        old = self.env.get(name)
        if old is None:
            self.env[name] = sort
            self.changed = True
        elif old != sort:
            raise self._err(node, f"variable {name} used as both {old} and {sort}")

    def infer(self, node, expected):
        kind, name, args, _ = node
        if kind == "int":
            return INT
        if kind == "bool":
            return BOOL
        if kind == "name":
            sym = self.p.symbols.get(name)
            if sym is not None and sym.arity == 0:
                return sym.result
            if expected is not None:
                self.note(node, name, expected)
            return self.env.get(name)
        if kind == "app":
            sym = self.p.symbols.get(name)
            if sym is None:
                raise self._err(node, f"undeclared function symbol {name}")
            if len(args) != sym.arity:
                raise self._err(node, f"{name} expects {sym.arity} arguments")
            for a, s in zip(args, sym.arg_sorts):
                self.infer(a, s)
            return sym.result
        if name in _ARITH:
            for a in args:
                self.infer(a, INT)
            return INT
        if name in _RELS:
            for a in args:
                self.infer(a, INT)
            return BOOL
        if name in _LOGIC:
            for a in args:
                self.infer(a, BOOL)
            return BOOL
        if name == "=":
            l, r = args
            s = self.infer(l, None) or self.infer(r, None)
            if s is not None:
                self.infer(l, s)
                self.infer(r, s)
            return BOOL
        raise self._err(node, f"unknown operator {name}")

    def build(self, node):
        kind, name, args, _ = node
        model = self.p.model
        if kind == "int":
            return val(model.normalize(name))
        if kind == "bool":
            return val(name)
        if kind == "name":
            sym = self.p.symbols.get(name)
            if sym is not None and sym.arity == 0:
                return App(sym)
            return Var(name, self.env.get(name, INT))
        try:
            if kind == "app":
                return App(self.p.symbols[name], [self.build(a) for a in args])
            sub = [self.build(a) for a in args]
            if name in _ARITH:
                return App(_ARITH[name], sub)
            if name in _RELS:
                return App(_RELS[name], sub)
            if name in _LOGIC:
                return App(_LOGIC[name], sub)
            return App(IFF if sub[0].sort == BOOL else EQ, sub)
        except SortMismatch as exc:
            raise self._err(node, str(exc)) from None

    def run(self, items):
        """``items`` are (node, expected sort) pairs sharing one variable scope."""
        for _ in range(20):
            self.changed = False
            for node, s in items:
                got = self.infer(node, s)
                if s is not None and got is not None and got != s:
                    raise self._err(node, f"expected a {s} term, found {got}")
            if not self.changed:
                break
        # the two sides of a rule must agree
        return [self.build(n) for n, _ in items]


# ---------------------------------------------------------------------------
# problems

@dataclass
class Problem:
    model: object = field(default_factory=UnboundedInt)
    symbols: dict = field(default_factory=dict)
    sorts: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)
    ects: dict = field(default_factory=dict)
    path: str = None

    @property
    def theory(self):
        return "int" if isinstance(self.model, UnboundedInt) else f"intmod {self.model.modulus}"

    def system(self, with_calc=True):
        rules = list(self.rules)
        if with_calc:
            rules += calculation_rules(THEORY_SYMBOLS)
        return LCTRS(tuple(rules), with_calc, THEORY_SYMBOLS if with_calc else ())

    def backend(self, smt_bin="z3", timeout_ms=5000):
        if isinstance(self.model, IntMod):
            from .theory import EnumBackend
            return EnumBackend(self.model)
        from .smt import SmtBackend
        return SmtBackend(smt_bin, timeout_ms)

    def ect(self, id):
        if id not in self.ects:
            raise ValidationError(f"no constrained term named {id!r}")
        return self.ects[id]

    def rule(self, id):
        for r in self.rules:
            if r.id == id:
                return r
        raise ValidationError(f"no rule named {id!r}")


def _sort(p, name):
    if name == "Int":
        return INT
    if name == "Bool":
        return BOOL
    return p.sorts.setdefault(name, Sort(name))


def _strip_comment(line):
    m = re.search(r"(^|\s)#", line)
    return line[:m.start()] if m else line


def parse_problem(text, path=None):
    """Parse problem text; raises ParseError or ValidationError."""
    p = Problem(path=path)
    p.symbols = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        word = line.split()[0]
        col = line.index(word) + 1
        if word == "theory":
            _parse_theory(p, line, lineno)
        elif word == "sig":
            _parse_sig(p, line, lineno)
        elif word in ("rule", "ect"):
            head, sep, rest = line.partition(":")
            if not sep:
                raise ParseError(lineno, len(line) + 1, "':' after the identifier")
            ident = head.strip()[len(word):].strip()
            if not ident or not re.fullmatch(r"[A-Za-z0-9_#'.\-]+", ident):
                raise ParseError(lineno, col + len(word) + 1, "an identifier", ident or None)
            toks = tokenize(rest, lineno, len(head) + 2)
            if word == "rule":
                _parse_rule(p, ident, toks)
            else:
                _parse_ect(p, ident, toks)
        else:
            raise ParseError(lineno, col, "theory, sig, rule or ect", word)
    return p


def _parse_theory(p, line, lineno):
    parts = line.split()
    if len(parts) == 2 and parts[1] == "int":
        p.model = UnboundedInt()
    elif len(parts) == 3 and parts[1] == "intmod" and parts[2].isdigit() and int(parts[2]) > 0:
        p.model = IntMod(int(parts[2]))
    else:
        raise ParseError(lineno, line.index(parts[0]) + len(parts[0]) + 2,
                         "'int' or 'intmod <modulus>'", " ".join(parts[1:]) or None)


def _parse_sig(p, line, lineno):
    toks = tokenize(line, lineno)
    ps = _Parser(toks)
    ps.expect("sig")
    name = ps.tok
    if name.kind not in ("ident", "op") or name.text in ("(", ")", ":"):
        raise ParseError(name.line, name.col, "a symbol name", name.text)
    ps.take()
    ps.expect(":")
    args = []
    if not ps.at("->"):
        args.append(ps.ident("a sort name").text)
        while ps.at("*"):
            ps.take()
            args.append(ps.ident("a sort name").text)
    ps.expect("->", "'->' or '*'")
    result = ps.ident("a sort name").text
    kind = "term"
    if ps.tok.kind == "ident" and ps.tok.text in ("term", "theory"):
        kind = ps.take().text
    if ps.tok.kind != "eof":
        raise ParseError(ps.tok.line, ps.tok.col, "end of line", ps.tok.text)
    if kind == "theory":
        raise ValidationError(f"line {lineno}: only built-in theory symbols are supported")
    if name.text in p.symbols:
        raise ValidationError(f"line {lineno}: symbol {name.text} declared twice")
    sym = FunSym(name.text, tuple(_sort(p, s) for s in args), _sort(p, result))
    p.symbols[name.text] = sym


def _parse_rule(p, ident, toks):
    ps = _Parser(toks)
    lhs = ps.expr()
    ps.expect("->", "'->'")
    rhs = ps.expr()
    guard = None
    zs = None
    if ps.at("["):
        ps.take()
        guard = ps.expr()
        ps.expect("]", "']'")
    if ps.tok.kind == "ident" and ps.tok.text == "vars":
        ps.take()
        zs = ps.name_list("{", "}")
    if ps.tok.kind != "eof":
        raise ParseError(ps.tok.line, ps.tok.col, "'[', 'vars' or end of line", ps.tok.text)
    el = _Elab(p)
    items = [(lhs, None), (rhs, None)] + ([(guard, BOOL)] if guard else [])
    for _ in range(3):
        el.run(items)
        ls, rs = el.infer(lhs, None), el.infer(rhs, None)
        if ls is not None and rs is None:
            el.infer(rhs, ls)
        elif rs is not None and ls is None:
            el.infer(lhs, rs)
    built = el.run(items)
    l, r = built[0], built[1]
    g = built[2] if guard else TRUE
    if zs is None:
        logical = vars_of(g) | (vars_of(r) - vars_of(l))
    else:
        logical = {Var(t.text, el.env.get(t.text, INT)) for t in zs}
    if isinstance(l, Var):
        raise ValidationError(f"rule {ident}: left-hand side is a variable")
    if l.sort != r.sort:
        raise ValidationError(f"rule {ident}: sides have sorts {l.sort} and {r.sort}")
    rr = ConstrainedRule(ident, frozenset(logical), l, r, g)
    chk = validate_rule(rr)
    if not chk.ok:
        raise ValidationError(f"rule {ident}: " + "; ".join(chk.violations))
    if any(x.id == ident for x in p.rules):
        raise ValidationError(f"rule {ident} defined twice")
    p.rules.append(rr)


def _parse_ect(p, ident, toks):
    ps = _Parser(toks)
    xs = None
    bound = []
    phi = None
    if ps.tok.kind == "ident" and ps.tok.text == "X":
        ps.take()
        xs = ps.name_list("{", "}")
    ps.expect("term", "'term'" if xs is not None else "'X' or 'term'")
    term = ps.expr()
    if ps.tok.kind == "ident" and ps.tok.text == "exists":
        ps.take()
        bound = ps.name_list("[", "]")
    if ps.tok.kind == "ident" and ps.tok.text == "phi":
        ps.take()
        phi = ps.expr()
    if ps.tok.kind != "eof":
        raise ParseError(ps.tok.line, ps.tok.col, "'exists', 'phi' or end of line", ps.tok.text)
    el = _Elab(p)
    items = [(term, None)] + ([(phi, BOOL)] if phi else [])
    built = el.run(items)
    s = built[0]
    body = built[1] if phi else TRUE
    bvars = tuple(Var(b.text, el.env.get(b.text, INT)) for b in bound)
    ec = ExistentialConstraint(bvars, body)
    if xs is None:
        logical = ec.free_vars
    else:
        logical = frozenset(Var(x.text, el.env.get(x.text, INT)) for x in xs)
    c = ECTerm(frozenset(logical), s, ec)
    bad = well_formed(c)
    if bad:
        raise ValidationError(f"ect {ident}: " + "; ".join(bad))
    if ident in p.ects:
        raise ValidationError(f"ect {ident} defined twice")
    p.ects[ident] = c


def load_problem(path):
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read(), path)


# ---------------------------------------------------------------------------
# printing

def _names(vs):
    return ", ".join(v.name for v in sorted(vs))


def format_rule_line(r):
    return (f"rule {r.id}: {format_term(r.lhs)} -> {format_term(r.rhs)} "
            f"[{format_term(r.guard)}] vars {{{_names(r.logical)}}}")


def format_ect_line(id, c):
    ec = c.constraint
    return (f"ect {id}: X {{{_names(c.logical)}}} term {format_term(c.term)} "
            f"exists [{', '.join(v.name for v in ec.bound)}] phi {format_term(ec.body)}")


def format_problem(p):
    lines = [f"theory {p.theory}"]
    for sym in p.symbols.values():
        args = " * ".join(s.name for s in sym.arg_sorts)
        lines.append(f"sig {sym.name} : {args + ' ' if args else ''}-> {sym.result.name} term")
    lines += [format_rule_line(r) for r in p.rules]
    lines += [format_ect_line(i, c) for i, c in p.ects.items()]
    return "\n".join(lines) + "\n"


__all__ = [
    "Problem", "parse_problem", "load_problem", "format_problem", "format_rule_line",
    "format_ect_line", "tokenize",
]
