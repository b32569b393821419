"""Randomized checking of the soundness and completeness properties.

Every check compares the symbolic machinery (redex gates, step
construction, subsumption) against the ground semantics computed by
enumeration over ``IntMod(m)``.  Cases are generated from a seed, so a
report is reproducible, and failing cases are shrunk before reporting.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from itertools import product

from .constrained import ECTerm, equivalent, format_ect, subsumes, well_formed
from .engine import MG, PARTIAL, all_steps, construct_step, find_redexes, is_normal_form
from .errors import CapExceeded, GenerationExhausted
from .interpret import (
    GroundIndex, contains_instance, contains_value_instance, enumerate_instances,
    ground_steps, instantiation_normal, interpret_rule, is_ground_normal,
    reachable, reducible_at, value_instances, DomainSpec,
)
from .rules import LCTRS, ConstrainedRule, calculation_rules, rule, validate_rule
from .terms import (
    ADD, EQ, GE, INT, LE, LT, MUL, TRUE, App, FunSym, Sort, Var, apply_subst, conj,
    conjuncts, format_term, is_value, positions, replace_at, subterm_at, val,
    var_list, vars_of,
)
from .theory import EnumBackend, ExistentialConstraint, IntMod, evaluate


TERM = Sort("T")

F = FunSym("f", (INT,), INT)
G = FunSym("g", (INT, INT), INT)
H = FunSym("h", (INT, TERM), TERM)
K = FunSym("k", (TERM,), TERM)
A = FunSym("a", (), TERM)
B = FunSym("b", (), TERM)
SYMBOL_POOL = (F, G, H, K, A, B)

RELATIONS = (LE, LT, EQ, GE)

THEOREMS = (
    "T-3.2", "T-3.5", "T-3.6", "T-3.7", "T-4.5", "T-4.8", "T-4.9", "T-4.10", "T-4.11",
    "T-6.1", "T-6.2", "T-6.3", "T-6.5", "T-6.6", "T-6.7", "T-6.9",
)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 42
    cases: int = 300
    modulus: int = 5
    max_term_depth: int = 2
    max_rules: int = 3
    max_guard_atoms: int = 2
    min_symbols: int = 3
    max_symbols: int = 6
    mode: str = "both"
    symbols: tuple = SYMBOL_POOL


@dataclass
class Case:
    theorem: str
    modulus: int
    system: LCTRS
    ect: ECTerm
    other: ECTerm = None
    seed: str = ""

    def describe(self):
        out = {
            "theorem": self.theorem,
            "seed": self.seed,
            "modulus": self.modulus,
            "rules": [str(r) for r in self.system.rules if not r.calc],
            "calc": [r.id for r in self.system.rules if r.calc],
            "term": format_ect(self.ect),
        }
        if self.other is not None:
            out["other"] = format_ect(self.other)
        return out


@dataclass
class CheckReport:
    theorem_id: str
    cases_run: int = 0
    exercised: int = 0
    failures: list = field(default_factory=list)
    unknowns: int = 0

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {
            "theorem": self.theorem_id,
            "cases": self.cases_run,
            "exercised": self.exercised,
            "failures": self.failures,
            "unknowns": self.unknowns,
        }


# ---------------------------------------------------------------------------
# generation

class _Gen:
    def __init__(self, rng, cfg, symbols):
        self.rng = rng
        self.cfg = cfg
        self.m = cfg.modulus
        self.symbols = list(symbols)

    def value(self):
        return val(self.rng.randrange(self.m))

    def heads(self, sort):
        return [f for f in self.symbols if f.result == sort and f.arity > 0]

    def consts(self, sort):
        return [f for f in self.symbols if f.result == sort and f.arity == 0]

    def term(self, sort, depth, leaves, top=False, theory_ok=True):
        rng = self.rng
        heads = self.heads(sort)
        if top:
            options = [f for f in self.symbols if f.result == sort]
            if not options:
                raise GenerationExhausted(f"no term symbol of sort {sort}")
            f = rng.choice(options)
            return App(f, [self.term(s, depth - 1, leaves) for s in f.arg_sorts])
        if depth > 0 and rng.random() < 0.45:
            if sort == INT and theory_ok and rng.random() < 0.3:
                return App(ADD, (self.term(INT, depth - 1, leaves), self.term(INT, depth - 1, leaves)))
            if heads:
                f = rng.choice(heads)
                return App(f, [self.term(s, depth - 1, leaves) for s in f.arg_sorts])
        pool = [v for v in leaves if v.sort == sort]
        if sort == INT:
            if pool and rng.random() < 0.75:
                return rng.choice(pool)
            return self.value()
        consts = self.consts(sort)
        if pool and (not consts or rng.random() < 0.6):
            return rng.choice(pool)
        if consts:
            return App(rng.choice(consts))
        if heads:
            f = rng.choice(heads)
            return App(f, [self.term(s, 0, leaves) for s in f.arg_sorts])
        raise GenerationExhausted(f"cannot build a term of sort {sort}")

    def linear(self, vs):
        rng = self.rng
        parts = []
        for v in vs:
            c = rng.randint(-2, 2)
            if c == 0:
                continue
            parts.append(v if c == 1 else App(MUL, (val(c % self.m), v)))
        if not parts:
            parts = [rng.choice(vs)] if vs else [self.value()]
        out = parts[0]
        for p in parts[1:]:
            out = App(ADD, (out, p))
        return out

    def atom(self, vs):
        rng = self.rng
        k = min(len(vs), rng.randint(1, 2))
        picked = rng.sample(vs, k)
        rel = rng.choice(RELATIONS)
        return App(rel, (self.linear(picked), self.value()))

    def guard(self, vs, n_atoms):
        if not vs or n_atoms == 0:
            return TRUE
        return conj(*[self.atom(vs) for _ in range(n_atoms)])


def pick_signature(rng, cfg):
    syms = list(cfg.symbols)
    if not syms:
        return ()
    n = rng.randint(min(cfg.min_symbols, len(syms)), min(cfg.max_symbols, len(syms)))
    chosen = rng.sample(syms, n)
    if not any(f.result == INT and f.arity > 0 for f in chosen):
        ints = [f for f in syms if f.result == INT and f.arity > 0]
        if ints:
            chosen.append(rng.choice(ints))
    return tuple(sorted(chosen, key=lambda f: f.name))


def gen_ect(cfg, symbols, rng=None, tries=50, rules=()):
    """A satisfiable, well-formed constrained term over ``symbols``.

    When ``rules`` are given, the term often embeds an instance of one of
    their left-hand sides so that redexes are likely.
    """
    rng = rng or random.Random(cfg.seed)
    if not [f for f in symbols if not f.theory]:
        raise GenerationExhausted("signature has no term symbols")
    g = _Gen(rng, cfg, symbols)
    backend = EnumBackend(IntMod(cfg.modulus))
    leaves = [Var("x"), Var("y"), Var("z"), Var("u", TERM), Var("w", TERM)]
    for _ in range(tries):
        sorts = [s for s in (INT, TERM) if any(f.result == s for f in symbols)]
        user = [r for r in rules if not r.calc]
        if user and rng.random() < 0.6:
            s = _embed_lhs(g, rng.choice(user).lhs, leaves)
        else:
            s = g.term(rng.choice(sorts), cfg.max_term_depth, leaves, top=True)
        ivars = [v for v in var_list(s) if v.sort == INT]
        X = [v for v in ivars if rng.random() < 0.7]
        bound = []
        atoms_over = list(X)
        if rng.random() < 0.25:
            e = Var("e")
            bound = [e]
            atoms_over = X + [e]
        n = rng.randint(0, cfg.max_guard_atoms)
        body = g.guard(atoms_over, n) if atoms_over else TRUE
        used = vars_of(body)
        bound = [v for v in bound if v in used]
        c = ECTerm(frozenset(X), s, ExistentialConstraint(tuple(bound), body))
        if well_formed(c):
            continue
        if backend.check_sat(c.constraint).is_sat:
            return c
    raise GenerationExhausted("no satisfiable constrained term found")


def _embed_lhs(g, lhs, leaves):
    rng = g.rng
    sub = {v: g.term(v.sort, 1, leaves) for v in var_list(lhs)}
    t = apply_subst(sub, lhs)
    outer = [f for f in g.symbols if not f.theory and t.sort in f.arg_sorts]
    if outer and rng.random() < 0.4:
        f = rng.choice(outer)
        i = f.arg_sorts.index(t.sort)
        args = [t if j == i else g.term(s, 1, leaves) for j, s in enumerate(f.arg_sorts)]
        t = App(f, args)
    return t


def gen_rule(g, rid, symbols):
    rng = g.rng
    heads = [f for f in symbols if not f.theory]
    counter = {"p": 0, "q": 0}

    def fresh(sort):
        key = "p" if sort == INT else "q"
        counter[key] += 1
        return Var(f"{key}{counter[key]}", sort)

    def pattern(sort, depth):
        sub = [f for f in heads if f.result == sort and f.arity > 0]
        if depth > 0 and sub and rng.random() < 0.3:
            f = rng.choice(sub)
            return App(f, [pattern(s, depth - 1) for s in f.arg_sorts])
        return fresh(sort)

    f = rng.choice([h for h in heads if h.arity > 0] or heads)
    lhs = App(f, [pattern(s, 1) for s in f.arg_sorts])
    lvars = var_list(lhs)
    Z = [v for v in lvars if v.sort == INT and rng.random() < 0.6]
    extra = []
    if rng.random() < 0.4:
        extra.append(Var("e1"))
    leaves = lvars + extra
    rhs = g.term(lhs.sort, max(1, g.cfg.max_term_depth - 1), leaves)
    extra = [v for v in extra if v in vars_of(rhs)]
    guard_vars = Z + extra
    if rng.random() < 0.2:
        guard_vars = guard_vars + [Var("e2")]
    n = rng.randint(0, g.cfg.max_guard_atoms)
    guard = g.guard(guard_vars, n) if guard_vars else TRUE
    logical = set(Z) | set(extra) | vars_of(guard)
    return ConstrainedRule(rid, frozenset(logical), lhs, rhs, guard)


def gen_system(cfg, symbols=None, rng=None):
    """A left-linear, left-value-free system plus the calculation rule for ``+``."""
    rng = rng or random.Random(cfg.seed)
    if symbols is None:
        symbols = pick_signature(rng, cfg)
    g = _Gen(rng, cfg, symbols)
    n = rng.randint(1, cfg.max_rules)
    rules = []
    for i in range(1, n + 1):
        r = gen_rule(g, f"r{i}", symbols)
        assert validate_rule(r).ok, validate_rule(r).violations
        rules.append(r)
    return LCTRS(tuple(rules) + tuple(calculation_rules([ADD])), True, (ADD,))


def gen_case(theorem, cfg, index):
    seed = f"{cfg.seed}:{theorem}:{index}"
    rng = random.Random(seed)
    symbols = pick_signature(rng, cfg)
    R = gen_system(cfg, symbols, rng)
    c = gen_ect(cfg, symbols, rng, rules=R.rules)
    other = None
    if theorem == "T-4.5":
        other = gen_partner(c, cfg, symbols, rng)
    return Case(theorem, cfg.modulus, R, c, other, seed)


def gen_partner(c, cfg, symbols, rng, tries=50):
    """A second constrained term related to ``c`` by a random mutation."""
    g = _Gen(rng, cfg, symbols)
    backend = EnumBackend(IntMod(cfg.modulus))
    for _ in range(tries):
        kind = rng.randrange(5)
        term = c.term
        if kind == 0:
            ps = [p for p in positions(term) if p]
            if ps:
                p = rng.choice(ps)
                sub = subterm_at(term, p)
                term = replace_at(term, p, Var("n1", sub.sort))
        elif kind == 1:
            vs = [v for v in var_list(term) if v.sort == INT]
            if vs:
                term = apply_subst({rng.choice(vs): g.value()}, term)
        elif kind == 2:
            vs = var_list(term)
            ren = {v: Var(v.name + "'", v.sort) for v in vs}
            term = apply_subst(ren, term)
        elif kind == 3:
            term = g.term(term.sort, cfg.max_term_depth, var_list(term), top=True)
        ivars = [v for v in var_list(term) if v.sort == INT]
        X = [v for v in ivars if rng.random() < 0.7]
        body = g.guard(X, rng.randint(0, cfg.max_guard_atoms)) if X else TRUE
        if kind == 4 and c.logical <= set(ivars):
            X = list(c.logical) + [v for v in X if v not in c.logical]
            body = conj(c.constraint.body, g.guard(X, 1)) if rng.random() < 0.5 else c.constraint.body
            bound = c.constraint.bound
        else:
            bound = ()
        d = ECTerm(frozenset(X), term, ExistentialConstraint(tuple(bound), body))
        if not well_formed(d) and backend.check_sat(d.constraint).is_sat:
            return d
    raise GenerationExhausted("no partner term found")


# ---------------------------------------------------------------------------
# brute-force oracle for instance inclusion

def _brute_holds(ec, env, model):
    bound = list(ec.bound)
    for vals in product(*[model.carrier(v.sort) for v in bound]):
        e = dict(env)
        e.update(zip(bound, vals))
        if evaluate(ec.body, e, model):
            return True
    return False


def _brute_generators(c, model):
    X = sorted(c.logical)
    for vals in product(*[model.carrier(v.sort) for v in X]):
        env = dict(zip(X, vals))
        if _brute_holds(c.constraint, env, model):
            yield apply_subst({v: model.value_term(x, v.sort) for v, x in env.items()}, c.term)


def _plain_match(p, s, sigma):
    if isinstance(p, Var):
        if p in sigma:
            return sigma[p] == s
        sigma[p] = s
        return True
    if isinstance(s, Var) or p.head != s.head:
        return False
    return all(_plain_match(a, b, sigma) for a, b in zip(p.args, s.args))


def _brute_member(b, u, model):
    Y = sorted(b.logical)
    for vals in product(*[model.carrier(v.sort) for v in Y]):
        env = dict(zip(Y, vals))
        t = apply_subst({v: model.value_term(x, v.sort) for v, x in env.items()}, b.term)
        if _plain_match(t, u, {}) and _brute_holds(b.constraint, env, model):
            return True
    return False


def brute_subsumes(a, b, model):
    """Instance inclusion by enumerating every valued instantiation of ``a``."""
    return all(_brute_member(b, u, model) for u in _brute_generators(a, model))


# ---------------------------------------------------------------------------
# checks

class _Ctx:
    def __init__(self, case, pool_extra=True):
        self.case = case
        self.model = IntMod(case.modulus)
        self.backend = EnumBackend(self.model)
        self.rules = case.system.rules
        pool = []
        syms = {f for r in self.rules for t in (r.lhs, r.rhs) for f in _heads(t)}
        syms |= set(_heads(case.ect.term))
        if pool_extra:
            pool.append(val(1 % case.modulus))
            if F in syms:
                pool.append(App(F, (val(0),)))
            if A in syms:
                pool.append(App(A))
            elif K in syms and B in syms:
                pool.append(App(K, (App(B),)))
        self.dom = DomainSpec(self.model, tuple(pool), 4000)
        self._g = {}
        self._gall = None

    def ground(self, r):
        if r.id not in self._g:
            self._g[r.id] = GroundIndex(sorted(interpret_rule(r, self.model), key=str))
        return self._g[r.id]

    def ground_all(self):
        if self._gall is None:
            self._gall = GroundIndex([g for r in self.rules for g in self.ground(r)])
        return self._gall

    def vinst(self, c):
        return sorted(value_instances(c, self.model, canonical=False), key=format_term)

    def inst(self, c):
        return sorted(enumerate_instances(c, self.dom), key=format_term)


def _heads(t):
    if isinstance(t, Var):
        return []
    out = [t.head]
    for a in t.args:
        out += _heads(a)
    return out


class _Result:
    def __init__(self):
        self.failures = []
        self.unknowns = 0
        self.exercised = False

    def fail(self, msg):
        self.failures.append(msg)

    def tri(self, v):
        if v.unknown:
            self.unknowns += 1
        return v


def _redex_keys(c, rules, mode, backend):
    out = {}
    for r in rules:
        for info in find_redexes(c, r, mode, backend, check_input=False):
            out[(r.id, info.position)] = info
    return out


def check_T32(ctx, res):
    c = ctx.case.ect
    mg = _redex_keys(c, ctx.rules, MG, ctx.backend)
    pa = _redex_keys(c, ctx.rules, PARTIAL, ctx.backend)
    res.exercised = bool(mg)
    for k in mg:
        if k not in pa:
            res.fail(f"most general redex {k} is not a partial redex")


def check_T35(ctx, res):
    c = ctx.case.ect
    mg = _redex_keys(c, ctx.rules, MG, ctx.backend)
    pa = _redex_keys(c, ctx.rules, PARTIAL, ctx.backend)
    res.exercised = bool(mg)
    for k, info in mg.items():
        if well_formed(construct_step(c, info)):
            res.fail(f"reduct for {k} is ill-formed")
        if k in pa and construct_step(c, info) != construct_step(c, pa[k]):
            res.fail(f"steps for {k} differ between modes")


def _strengthened(c, info):
    v = info.variant
    lhs_vars = vars_of(v.lhs)
    z = tuple(x for x in var_list(v.guard) if x not in lhs_vars)
    guard = apply_subst(info.matcher, v.guard)
    return ECTerm(c.logical, c.term,
                  ExistentialConstraint(c.constraint.bound + z, conj(c.constraint.body, guard)))


def _mg_from_strengthened(ctx, res, info, d, with_subsumption):
    c = ctx.case.ect
    r = next(r for r in ctx.rules if r.id == info.rule_id)
    c2 = _strengthened(c, info)
    bad = well_formed(c2)
    if bad:
        res.fail(f"strengthened term ill-formed: {bad}")
        return
    if with_subsumption and not res.tri(subsumes(c2, c, ctx.backend)).yes:
        res.fail(f"strengthened term not subsumed by the input at {info.position}")
    mg = [x for x in find_redexes(c2, r, MG, ctx.backend, check_input=False)
          if x.position == info.position]
    if not mg:
        res.fail(f"no most general step from the strengthened term at {info.position}")
        return
    d2 = construct_step(c2, mg[0])
    if not res.tri(equivalent(d2, d, ctx.backend)).yes:
        res.fail(f"strengthened step at {info.position} not equivalent to the partial step")


def check_T36(ctx, res):
    c = ctx.case.ect
    for k, info in _redex_keys(c, ctx.rules, PARTIAL, ctx.backend).items():
        res.exercised = True
        _mg_from_strengthened(ctx, res, info, construct_step(c, info), False)


def check_T37(ctx, res):
    c = ctx.case.ect
    for k, info in _redex_keys(c, ctx.rules, PARTIAL, ctx.backend).items():
        res.exercised = True
        _mg_from_strengthened(ctx, res, info, construct_step(c, info), True)


def check_T45(ctx, res):
    a, b = ctx.case.ect, ctx.case.other
    for x, y in ((a, b), (b, a)):
        got = res.tri(subsumes(x, y, ctx.backend))
        want = brute_subsumes(x, y, ctx.model)
        res.exercised = res.exercised or want
        if got.unknown:
            continue
        if got.yes != want:
            res.fail(f"subsumes={got} but brute force says {want}")
    got = res.tri(equivalent(a, b, ctx.backend))
    want = brute_subsumes(a, b, ctx.model) and brute_subsumes(b, a, ctx.model)
    if not got.unknown and got.yes != want:
        res.fail(f"equivalent={got} but brute force says {want}")


def _steps(ctx, mode, res):
    out = all_steps(ctx.case.ect, ctx.rules, mode, ctx.backend, check_input=False)
    for st in out:
        bad = well_formed(st.output)
        if bad:
            res.fail(f"reduct at {list(st.position)} is ill-formed: {bad}")
    return out


def check_T48(ctx, res):
    c = ctx.case.ect
    U = ctx.inst(c)
    for st in _steps(ctx, PARTIAL, res):
        res.exercised = True
        Gr = ctx.ground(ctx.case.system.rule(st.rule_id))
        p = st.position
        succ = {u: ground_steps(u, Gr, p) for u in U}
        if not any(succ.values()):
            res.fail(f"no instance reducible at {list(p)} by {st.rule_id}")
        reach = set().union(*succ.values()) if succ else set()
        for w in ctx.inst(st.output):
            if w not in reach:
                res.fail(f"{format_term(w)} has no predecessor at {list(p)}")
                break
        for u, vs in succ.items():
            for v in vs:
                if not contains_instance(st.output, v, ctx.backend):
                    res.fail(f"{format_term(u)} -> {format_term(v)} leaves the step's output")
                    break


def _path(ctx, mode, rng, length):
    c = ctx.case.ect
    path = []
    for _ in range(length):
        out = all_steps(c, ctx.rules, mode, ctx.backend, check_input=False)
        if not out:
            break
        st = rng.choice(out)
        path.append(st)
        c = st.output
    return path


def check_T49(ctx, res):
    rng = random.Random(ctx.case.seed + ":path")
    path = _path(ctx, PARTIAL, rng, rng.randint(1, 2))
    if not path:
        return
    res.exercised = True
    U = ctx.inst(ctx.case.ect)
    if len(U) > 400:
        return
    reach = reachable(U, ctx.ground_all(), len(path))
    D = ctx.inst(path[-1].output)
    if not D:
        res.fail("reduct has no instances")
    for v in D:
        if v not in reach:
            res.fail(f"{format_term(v)} not reachable from any instance")
            break


def check_T410(ctx, res):
    c = ctx.case.ect
    U = ctx.inst(c)
    for st in _steps(ctx, MG, res):
        res.exercised = True
        Gr = ctx.ground(ctx.case.system.rule(st.rule_id))
        for u in U:
            if not reducible_at(u, Gr, st.position):
                res.fail(f"instance {format_term(u)} not reducible at {list(st.position)}")
                break


def check_T411(ctx, res):
    rng = random.Random(ctx.case.seed + ":path")
    path = _path(ctx, MG, rng, rng.randint(1, 2))
    if not path:
        return
    res.exercised = True
    d = path[-1].output
    U = ctx.inst(ctx.case.ect)
    if len(U) > 400:
        return
    G = ctx.ground_all()
    for u in U:
        if not any(contains_instance(d, v, ctx.backend) for v in reachable([u], G, len(path))):
            res.fail(f"instance {format_term(u)} reaches nothing in the reduct")
            break
    reach = reachable(U, G, len(path))
    for v in ctx.inst(d):
        if v not in reach:
            res.fail(f"{format_term(v)} not reachable from any instance")
            break


def check_T61(ctx, res):
    c = ctx.case.ect
    U = ctx.vinst(c)
    for st in _steps(ctx, PARTIAL, res):
        res.exercised = True
        Gr = ctx.ground(ctx.case.system.rule(st.rule_id))
        p = st.position
        succ = {u: ground_steps(u, Gr, p) for u in U}
        if not any(succ.values()):
            res.fail(f"no value instance reducible at {list(p)}")
        reach = set().union(*succ.values()) if succ else set()
        for w in ctx.vinst(st.output):
            if w not in reach:
                res.fail(f"value instance {format_term(w)} has no predecessor")
                break
        for u, vs in succ.items():
            for v in vs:
                if not contains_value_instance(st.output, v, ctx.backend):
                    res.fail(f"{format_term(v)} is not a value instance of the reduct")
                    break


def check_T62(ctx, res):
    c = ctx.case.ect
    U = ctx.vinst(c)
    for r in ctx.rules:
        Gr = ctx.ground(r)
        red = None
        for p in positions(c.term):
            for u in U:
                vs = ground_steps(u, Gr, p)
                if not vs:
                    continue
                res.exercised = True
                if red is None:
                    red = {i.position: i for i in find_redexes(c, r, PARTIAL, ctx.backend,
                                                               check_input=False)}
                if p not in red:
                    res.fail(f"{format_term(u)} reducible at {list(p)} by {r.id} without a partial redex")
                    continue
                d = construct_step(c, red[p])
                for v in vs:
                    if not contains_value_instance(d, v, ctx.backend):
                        res.fail(f"{format_term(v)} is not a value instance of the partial reduct")


def check_T63(ctx, res):
    c = ctx.case.ect
    nf = res.tri(is_normal_form(c, ctx.rules, PARTIAL, ctx.backend))
    G = ctx.ground_all()
    ground_nf = all(is_ground_normal(u, G) for u in ctx.vinst(c))
    res.exercised = True
    if not nf.unknown and nf.yes != ground_nf:
        res.fail(f"partial normal form={nf} but value instances normal={ground_nf}")


def _all_reducible(ctx, U, r, p):
    Gr = ctx.ground(r)
    return all(reducible_at(u, Gr, p) for u in U)


def check_T65(ctx, res):
    c = ctx.case.ect
    U = ctx.vinst(c)
    for r in ctx.rules:
        mg = None
        for p in positions(c.term):
            if _all_reducible(ctx, U, r, p):
                res.exercised = True
                if mg is None:
                    mg = {i.position for i in find_redexes(c, r, MG, ctx.backend,
                                                           check_input=False)}
                if p not in mg:
                    res.fail(f"every value instance reducible at {list(p)} by {r.id} "
                             "but no most general redex")


def check_T66(ctx, res):
    c = ctx.case.ect
    U = ctx.inst(c)
    for r in ctx.rules:
        mg = {i.position for i in find_redexes(c, r, MG, ctx.backend, check_input=False)}
        for p in positions(c.term):
            every = _all_reducible(ctx, U, r, p)
            res.exercised = res.exercised or every or p in mg
            if every != (p in mg):
                res.fail(f"at {list(p)} by {r.id}: redex={p in mg} all-instances-reducible={every}")


def check_T67(ctx, res):
    c = ctx.case.ect
    nf = res.tri(is_normal_form(c, ctx.rules, MG, ctx.backend))
    U = ctx.vinst(c)
    want = all(not _all_reducible(ctx, U, r, p) for r in ctx.rules for p in positions(c.term))
    res.exercised = True
    if not nf.unknown and nf.yes != want:
        res.fail(f"most general normal form={nf} but characterization says {want}")


def check_T69(ctx, res):
    c = ctx.case.ect
    inst = res.tri(instantiation_normal(c, ctx.rules, ctx.model))
    if inst.yes:
        res.exercised = True
        nf = res.tri(is_normal_form(c, ctx.rules, PARTIAL, ctx.backend))
        if not nf.yes:
            res.fail("instantiation normal but not a partial normal form")


def converse_witness():
    """``f(a) -> b`` and ``f(x)``: partial normal, yet an instance is reducible."""
    fa = FunSym("f", (TERM,), TERM)
    a, b = FunSym("a", (), TERM), FunSym("b", (), TERM)
    r = rule("f(a)->b", App(fa, (App(a),)), App(b))
    c = ECTerm(frozenset(), App(fa, (Var("x", TERM),)))
    return LCTRS((r,)), c


CHECKS = {
    "T-3.2": check_T32, "T-3.5": check_T35, "T-3.6": check_T36, "T-3.7": check_T37,
    "T-4.5": check_T45, "T-4.8": check_T48, "T-4.9": check_T49, "T-4.10": check_T410,
    "T-4.11": check_T411, "T-6.1": check_T61, "T-6.2": check_T62, "T-6.3": check_T63,
    "T-6.5": check_T65, "T-6.6": check_T66, "T-6.7": check_T67, "T-6.9": check_T69,
}


def run_case(case):
    """Failure messages and unknown count for one case."""
    res = _Result()
    try:
        CHECKS[case.theorem](_Ctx(case), res)
    except CapExceeded:
        res.unknowns += 1
    return res


def check(theorem_id, cfg=GenConfig(), shrink=True):
    if theorem_id not in CHECKS:
        raise KeyError(f"unknown theorem id {theorem_id!r}")
    if cfg.mode not in ("exact", "both"):
        # every catalogue entry makes a universal claim, which needs a finite model
        raise ValueError(f"theorem checks need exact mode, not {cfg.mode!r}")
    report = CheckReport(theorem_id)
    for i in range(cfg.cases):
        case = gen_case(theorem_id, cfg, i)
        res = run_case(case)
        report.cases_run += 1
        report.exercised += res.exercised
        report.unknowns += res.unknowns
        if res.failures:
            small = minimize(case) if shrink else case
            report.failures.append({"case": small.describe(),
                                    "messages": run_case(small).failures or res.failures})
    if theorem_id == "T-6.9":
        R, c = converse_witness()
        report.cases_run += 1
        model = IntMod(cfg.modulus)
        inst = instantiation_normal(c, R.rules, model)
        nf = is_normal_form(c, R.rules, PARTIAL, EnumBackend(model))
        if not (nf.yes and inst.no):
            report.failures.append({"case": "f(a) -> b witness",
                                    "messages": [f"partial normal={nf}, instantiation normal={inst}"]})
    return report


def check_all(cfg=GenConfig(), theorems=THEOREMS):
    return [check(t, cfg) for t in theorems]


# ---------------------------------------------------------------------------
# shrinking

def _size(case):
    n = sum(len(positions(r.lhs)) + len(positions(r.rhs)) + len(conjuncts(r.guard))
            for r in case.system.rules)
    n += len(case.system.rules) * 10
    n += len(positions(case.ect.term)) + len(conjuncts(case.ect.constraint.body))
    if case.other is not None:
        n += len(positions(case.other.term)) + len(conjuncts(case.other.constraint.body))
    return n + case.modulus


def _drop_atom(body, i):
    parts = conjuncts(body)
    return conj(*(parts[:i] + parts[i + 1:]))


def _with_body(c, body):
    used = vars_of(body)
    return ECTerm(c.logical, c.term,
                  ExistentialConstraint(tuple(v for v in c.constraint.bound if v in used), body))


def _ect_candidates(c):
    parts = conjuncts(c.constraint.body)
    if c.constraint.body != TRUE:
        for i in range(len(parts)):
            yield _with_body(c, _drop_atom(c.constraint.body, i))
    for p in positions(c.term):
        if not p:
            continue
        sub = subterm_at(c.term, p)
        if isinstance(sub, Var):
            continue
        t = replace_at(c.term, p, Var("s1", sub.sort))
        keep = c.logical & vars_of(t)
        body = conj(*[a for a in parts if vars_of(a) <= keep | set(c.constraint.bound)])
        yield _with_body(ECTerm(keep, t, c.constraint), body)


def _renormalize(t, m):
    if isinstance(t, Var):
        return t
    if is_value(t) and t.sort == INT:
        return val(t.head.value % m)
    if not t.args:
        return t
    return App(t.head, [_renormalize(a, m) for a in t.args])


def _remod(case, m):
    def rr(r):
        return ConstrainedRule(r.id, r.logical, _renormalize(r.lhs, m), _renormalize(r.rhs, m),
                               _renormalize(r.guard, m), r.calc)

    def rc(c):
        if c is None:
            return None
        ec = c.constraint
        return ECTerm(c.logical, _renormalize(c.term, m),
                      ExistentialConstraint(ec.bound, _renormalize(ec.body, m)))

    sys2 = LCTRS(tuple(rr(r) for r in case.system.rules), case.system.includes_calc,
                 case.system.symbols)
    return replace(case, modulus=m, system=sys2, ect=rc(case.ect), other=rc(case.other))


def _candidates(case):
    rules = case.system.rules
    for i in range(len(rules)):
        yield replace(case, system=replace(case.system, rules=rules[:i] + rules[i + 1:]))
    for i, r in enumerate(rules):
        parts = conjuncts(r.guard)
        if r.guard == TRUE:
            continue
        for j in range(len(parts)):
            g = _drop_atom(r.guard, j)
            r2 = ConstrainedRule(r.id, r.logical, r.lhs, r.rhs, g, r.calc)
            yield replace(case, system=replace(case.system, rules=rules[:i] + (r2,) + rules[i + 1:]))
    for c2 in _ect_candidates(case.ect):
        yield replace(case, ect=c2)
    if case.other is not None:
        for c2 in _ect_candidates(case.other):
            yield replace(case, other=c2)
    if case.modulus > 2:
        yield _remod(case, case.modulus - 1)


def _valid(case):
    backend = EnumBackend(IntMod(case.modulus))
    for c in (case.ect, case.other):
        if c is None:
            continue
        if well_formed(c) or not backend.check_sat(c.constraint).is_sat:
            return False
    return all(validate_rule(r).ok for r in case.system.rules)


def minimize(case, fails=None, max_rounds=200):
    """Greedily shrink ``case`` while ``fails(case)`` stays true.

    ``fails`` defaults to re-running the case's own theorem check.
    """
    if fails is None:
        def fails(k):
            return bool(run_case(k).failures)
    current = case
    for _ in range(max_rounds):
        for cand in _candidates(current):
            if _size(cand) < _size(current) and _valid(cand) and fails(cand):
                current = cand
                break
        else:
            break
    return current


__all__ = [
    "GenConfig", "Case", "CheckReport", "THEOREMS", "CHECKS", "gen_system", "gen_ect",
    "gen_case", "gen_partner", "pick_signature", "check", "check_all", "run_case", "minimize",
    "brute_subsumes", "converse_witness", "TERM",
]
