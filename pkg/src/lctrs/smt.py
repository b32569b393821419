"""SMT-LIB2 backend over unbounded integers.

A handle owns one solver process (``z3 -in`` by default) and talks to it
over stdin/stdout.  Each query is wrapped in push/pop.  Calls on one
handle must be serialized.
"""

from __future__ import annotations

import os
import selectors
import shutil
import subprocess
import time

from .errors import BackendFailure, NotValued, SolverUnknown
from .terms import BOOL, INT, Var
from .theory import UnboundedInt, sat, unknown, unsat


_OPS = {
    "+": "+", "-": "-", "*": "*", "neg": "-",
    "<=": "<=", "<": "<", ">=": ">=", ">": ">", "=": "=",
    "and": "and", "or": "or", "not": "not", "=>": "=>",
}


def smt_symbol(v):
    return "|" + v.name.replace("|", "_").replace("\\", "_") + "|"


def smt_sort(sort):
    if sort == BOOL:
        return "Bool"
    if sort == INT:
        return "Int"
    raise BackendFailure(f"sort {sort} has no SMT counterpart")


def to_smt(t):
    if isinstance(t, Var):
        return smt_symbol(t)
    h = t.head
    if not h.theory:
        raise BackendFailure(f"{h.name} is not a theory symbol")
    if h.is_value:
        if h.result == BOOL:
            return "true" if h.value else "false"
        return str(h.value) if h.value >= 0 else f"(- {-h.value})"
    args = " ".join(to_smt(a) for a in t.args)
    return f"({_OPS[h.name]} {args})"


def quantified(ec):
    body = to_smt(ec.body)
    if not ec.bound:
        return body
    binders = " ".join(f"({smt_symbol(v)} {smt_sort(v.sort)})" for v in ec.bound)
    return f"(exists ({binders}) {body})"


def declarations(free):
    return [f"(declare-const {smt_symbol(v)} {smt_sort(v.sort)})" for v in free]


def sat_script(ec):
    """Script text for a satisfiability query (without push/pop)."""
    lines = ["(set-logic LIA)"] + declarations(ec.free_list())
    lines += [f"(assert {quantified(ec)})", "(check-sat)"]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# s-expressions

def parse_sexpr(text):
    tokens = _tokenize(text)
    pos = 0

    def parse():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            out = []
            while tokens[pos] != ")":
                out.append(parse())
            pos += 1
            return out
        return tok

    return parse()


def _tokenize(text):
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            out.append(c)
            i += 1
        elif c == "|":
            j = text.index("|", i + 1)
            out.append(text[i:j + 1])
            i = j + 1
        elif c == '"':
            j = text.index('"', i + 1)
            out.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _model_value(sx):
    if isinstance(sx, list):
        if len(sx) == 2 and sx[0] == "-":
            return -_model_value(sx[1])
        raise BackendFailure(f"unsupported model value {sx}")
    if sx == "true":
        return True
    if sx == "false":
        return False
    return int(sx)


def parse_model(text, free):
    """Map ``define-fun`` entries of a model back to variables."""
    sx = parse_sexpr(text)
    if sx and sx[0] == "model":
        sx = sx[1:]
    by_name = {smt_symbol(v): v for v in free}
    by_name.update({v.name: v for v in free})
    out = {}
    for entry in sx:
        if isinstance(entry, list) and entry and entry[0] == "define-fun" and not entry[2]:
            v = by_name.get(entry[1])
            if v is not None:
                out[v] = _model_value(entry[4])
    for v in free:
        out.setdefault(v, False if v.sort == BOOL else 0)
    return out


# ---------------------------------------------------------------------------
# process handling

def _default_args(binary):
    name = os.path.basename(binary)
    if name.startswith("z3"):
        return ["-in", "-smt2"]
    if name.startswith("cvc5") or name.startswith("cvc4"):
        return ["--lang=smt2", "--incremental", "--produce-models"]
    return []


class SmtBackend:
    """Unbounded-integer decision procedure behind an SMT-LIB2 process."""

    exact = False

    def __init__(self, binary="z3", timeout_ms=5000, args=None):
        self.binary = binary
        self.timeout_ms = timeout_ms
        self.args = _default_args(binary) if args is None else list(args)
        self.model = UnboundedInt()
        self.queries = 0
        self._proc = None
        self._buf = b""

    def __repr__(self):
        return f"SmtBackend({self.binary!r}, timeout_ms={self.timeout_ms})"

    @staticmethod
    def available(binary="z3"):
        return shutil.which(binary) is not None

    # -- process ---------------------------------------------------------
    def _start(self):
        path = shutil.which(self.binary) or self.binary
        try:
            self._proc = subprocess.Popen(
                [path] + self.args,
                stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise BackendFailure(f"cannot start {self.binary}: {exc}") from exc
        self._buf = b""
        self._send("(set-option :print-success false)")
        self._send("(set-option :produce-models true)")
        if os.path.basename(self.binary).startswith("z3"):
            self._send(f"(set-option :timeout {int(self.timeout_ms)})")
        self._send("(set-logic LIA)")

    def close(self):
        if self._proc is not None:
            try:
                self._proc.kill()
                self._proc.wait(timeout=1)
            except Exception:
                pass
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        self.close()

    def _send(self, text):
        try:
            self._proc.stdin.write((text + "\n").encode())
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self.close()
            raise BackendFailure(f"solver process died: {exc}") from exc

    def _read_chunk(self, deadline):
        fd = self._proc.stdout.fileno()
        with selectors.DefaultSelector() as sel:
            sel.register(fd, selectors.EVENT_READ)
            left = deadline - time.monotonic()
            if left <= 0 or not sel.select(left):
                raise TimeoutError
        data = os.read(fd, 65536)
        if not data:
            self.close()
            raise BackendFailure("solver process closed its output")
        self._buf += data

    def _read_response(self, deadline):
        """One complete response: an atom line or a balanced s-expression."""
        while True:
            text = self._buf.decode(errors="replace")
            stripped = text.lstrip()
            if stripped.startswith("("):
                depth = 0
                start = len(text) - len(stripped)
                for i in range(start, len(text)):
                    ch = text[i]
                    if ch == "(":
                        depth += 1
                    elif ch == ")":
                        depth -= 1
                        if depth == 0:
                            self._buf = text[i + 1:].encode()
                            return text[start:i + 1]
            elif "\n" in stripped:
                first, rest = stripped.split("\n", 1)
                self._buf = rest.encode()
                return first.strip()
            self._read_chunk(deadline)

    def _query(self, assertion, free):
        if self._proc is None or self._proc.poll() is not None:
            self._start()
        self.queries += 1
        lines = ["(push 1)"] + declarations(free) + [f"(assert {assertion})", "(check-sat)"]
        self._send("\n".join(lines))
        deadline = time.monotonic() + self.timeout_ms / 1000.0 + 2.0
        try:
            answer = self._read_response(deadline)
            if answer.startswith("(error"):
                raise BackendFailure(f"solver error: {answer}")
            if answer == "sat":
                self._send("(get-model)")
                model = parse_model(self._read_response(deadline), free)
                self._send("(pop 1)")
                return "sat", model
            self._send("(pop 1)")
            if answer == "unsat":
                return "unsat", None
            if answer == "unknown":
                return "unknown", None
            raise BackendFailure(f"unexpected solver output {answer!r}")
        except TimeoutError:
            self.close()
            return "unknown", None

    # -- queries ---------------------------------------------------------
    def check_sat(self, ec):
        free = ec.free_list()
        status, model = self._query(quantified(ec), free)
        if status == "sat":
            return sat(model)
        if status == "unsat":
            return unsat()
        return unknown("solver returned unknown or timed out")

    def check_valid_implication(self, lhs, rhs):
        """SAT means valid; UNSAT carries a counter-valuation."""
        free = lhs.free_list() + [v for v in rhs.free_list() if v not in lhs.free_vars]
        # bound variables of the two sides never meet: each has its own quantifier
        status, model = self._query(f"(not (=> {quantified(lhs)} {quantified(rhs)}))", free)
        if status == "unsat":
            return sat()
        if status == "sat":
            return unsat(model)
        return unknown("solver returned unknown or timed out")

    def holds(self, ec, valuation):
        eqs = []
        for v in ec.free_list():
            if v not in valuation:
                raise NotValued(f"variable {v.name} has no value")
            x = valuation[v]
            eqs.append(f"(= {smt_symbol(v)} {_lit(x)})")
        assertion = quantified(ec) if not eqs else f"(and {' '.join(eqs)} {quantified(ec)})"
        status, _ = self._query(assertion, ec.free_list())
        if status == "unknown":
            raise SolverUnknown("solver could not decide a ground constraint")
        return status == "sat"

    def respects(self, gamma, ec):
        from .theory import respects
        return respects(gamma, ec, self)


def _lit(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x) if x >= 0 else f"(- {-x})"


__all__ = ["SmtBackend", "to_smt", "sat_script", "parse_model", "parse_sexpr"]
