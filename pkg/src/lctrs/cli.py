"""Command-line front end.

Exit codes: 0 success, 1 error, 2 answer dominated by solver unknowns,
64 usage error.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys

from .constrained import equivalent, format_ect, subsumes
from .engine import FUEL, GATED, is_normal_form, reduce, trace_entry
from .errors import LctrsError
from .interpret import DomainSpec, enumerate_instances, interpret_rule, parse_domain, value_instances
from .syntax import load_problem
from .terms import Var, format_term, var_list

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _globals(parser, suppress):
    # repeated on every subcommand; there the defaults are suppressed so a
    # value given before the subcommand is not overwritten
    def d(x):
        return argparse.SUPPRESS if suppress else x
    parser.add_argument("--smt-bin", default=d("z3"), help="SMT-LIB2 solver binary (default z3)")
    parser.add_argument("--smt-timeout-ms", type=int, default=d(5000))
    parser.add_argument("--seed", type=int, default=d(42), help="random seed for verify")
    return parser


def build_parser():
    common = _globals(_Parser(add_help=False), True)
    p = _globals(_Parser(prog="lctrs",
                         description="Constrained rewriting with existential constraints."), False)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("rewrite", parents=[common], help="build a reduction tree")
    r.add_argument("file")
    r.add_argument("--ect", help="constrained term id (default: first in file)")
    r.add_argument("--mode", choices=["mg", "partial"], required=True)
    r.add_argument("--fuel", type=int, default=50)
    r.add_argument("--strategy", choices=["full", "first"], default="full")
    r.add_argument("--trace", help="write a JSON-lines trace to this file")

    n = sub.add_parser("normal", parents=[common], help="is the term a normal form?")
    n.add_argument("file")
    n.add_argument("--ect")
    n.add_argument("--mode", choices=["mg", "partial"], required=True)

    for name, text in (("subsume", "is A subsumed by B?"), ("equiv", "are A and B equivalent?")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("file")
        s.add_argument("a")
        s.add_argument("b")

    i = sub.add_parser("interpret", parents=[common], help="enumerate instances")
    i.add_argument("file")
    i.add_argument("id", help="constrained term id, or rule id with --kind rule")
    i.add_argument("--kind", choices=["std", "value", "rule"], default="value")
    i.add_argument("--domain", default=None, help="mod:M or int:LO..HI")
    i.add_argument("--pool", type=int, default=0,
                   help="extra variables v1..vN non-logical variables may become")
    i.add_argument("--cap", type=int, default=100_000)

    v = sub.add_parser("verify", parents=[common], help="randomized property checks")
    v.add_argument("--theorem", default="all")
    v.add_argument("--cases", type=int, default=300)
    v.add_argument("--mod", type=int, default=5)
    v.add_argument("--no-shrink", action="store_true")

    t = sub.add_parser("trace", parents=[common], help="replay a recorded trace")
    t.add_argument("action", choices=["replay"])
    t.add_argument("file")
    t.add_argument("trace")
    return p


def _ect(problem, ident):
    if ident is None:
        if not problem.ects:
            raise LctrsError("problem file declares no constrained term")
        return next(iter(problem.ects.items()))
    return ident, problem.ect(ident)


def _backend(problem, args):
    return problem.backend(args.smt_bin, args.smt_timeout_ms)


def _trace_lines(header, red):
    lines = [json.dumps(header)]
    lines += [json.dumps(trace_entry(s), ensure_ascii=False) for s in red.steps]
    return lines


def cmd_rewrite(args, out):
    problem = load_problem(args.file)
    ident, c = _ect(problem, args.ect)
    backend = _backend(problem, args)
    red = reduce(c, problem.system().rules, args.mode, backend, args.fuel, args.strategy)
    print(f"input: {format_ect(c)}", file=out)
    print(f"mode: {args.mode}  fuel: {args.fuel}  strategy: {args.strategy}", file=out)
    print(f"steps: {len(red.steps)}  nodes: {len(red.nodes)}", file=out)
    nfs = red.normal_forms()
    print(f"normal forms ({len(nfs)}):", file=out)
    for d in nfs:
        print(f"  {format_ect(d)}", file=out)
    for tag in (FUEL, GATED):
        rest = [n.ect for n in red.nodes if n.tag == tag]
        if rest:
            print(f"{tag} ({len(rest)}):", file=out)
            for d in rest:
                print(f"  {format_ect(d)}", file=out)
    values = red.value_normal_forms(backend)
    if values:
        print("values: " + " ".join(str(x) for x in sorted(values)), file=out)
    if args.trace:
        header = {"kind": "header", "ect": ident, "mode": args.mode, "fuel": args.fuel,
                  "strategy": args.strategy}
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("\n".join(_trace_lines(header, red)) + "\n")
    return EXIT_UNKNOWN if any(n.tag == GATED for n in red.nodes) else EXIT_OK


def _answer(label, verdict, out):
    print(f"{label}: {verdict.answer.value}", file=out)
    ev = verdict.evidence
    if ev is not None and not verdict.unknown:
        text = format_term(ev) if hasattr(ev, "sort") else str(ev)
        print(f"evidence: {text}", file=out)
    if verdict.reason:
        print(f"reason: {verdict.reason}", file=out)
    return EXIT_UNKNOWN if verdict.unknown else EXIT_OK


def cmd_normal(args, out):
    problem = load_problem(args.file)
    _, c = _ect(problem, args.ect)
    v = is_normal_form(c, problem.system().rules, args.mode, _backend(problem, args))
    print(f"normal: {v.answer.value}", file=out)
    if v.no:
        info = v.evidence
        print(f"redex: {info.rule_id} at {list(info.position)}", file=out)
    return EXIT_UNKNOWN if v.unknown else EXIT_OK


def cmd_subsume(args, out):
    problem = load_problem(args.file)
    a, b = problem.ect(args.a), problem.ect(args.b)
    return _answer("subsumed", subsumes(a, b, _backend(problem, args)), out)


def cmd_equiv(args, out):
    problem = load_problem(args.file)
    a, b = problem.ect(args.a), problem.ect(args.b)
    return _answer("equivalent", equivalent(a, b, _backend(problem, args)), out)


def cmd_interpret(args, out):
    problem = load_problem(args.file)
    if args.domain:
        model = parse_domain(args.domain)
    elif hasattr(problem.model, "modulus"):
        model = problem.model
    else:
        raise LctrsError("--domain is required for an unbounded theory")
    if args.kind == "rule":
        items = sorted(str(g) for g in interpret_rule(problem.rule(args.id),
                                                      DomainSpec(model, (), args.cap)))
    else:
        c = problem.ect(args.id)
        sorts = []
        for v in var_list(c.term):
            if v not in c.logical and v.sort not in sorts:
                sorts.append(v.sort)
        pool = tuple(Var(f"v{k}", s) for s in sorts for k in range(1, args.pool + 1))
        d = DomainSpec(model, pool, args.cap)
        found = enumerate_instances(c, d) if args.kind == "std" else value_instances(c, d)
        items = sorted(format_term(t) for t in found)
    if not model.exact:
        print(f"# {model}: window enumeration, the set may be incomplete", file=out)
    for line in items:
        print(line, file=out)
    return EXIT_OK


def cmd_verify(args, out):
    from .harness import GenConfig, THEOREMS, check
    cfg = GenConfig(seed=args.seed, cases=args.cases, modulus=args.mod)
    ids = THEOREMS if args.theorem == "all" else [args.theorem]
    reports = [check(t, cfg, shrink=not args.no_shrink).to_dict() for t in ids]
    total = sum(len(r["failures"]) for r in reports)
    json.dump({"seed": args.seed, "cases": args.cases, "modulus": args.mod,
               "reports": reports, "total_failures": total}, out, indent=2)
    out.write("\n")
    return EXIT_OK if total == 0 else EXIT_ERROR


def cmd_trace(args, out):
    problem = load_problem(args.file)
    with open(args.trace, encoding="utf-8") as fh:
        recorded = [line.rstrip("\n") for line in fh if line.strip()]
    if not recorded:
        raise LctrsError("empty trace")
    header = json.loads(recorded[0])
    c = problem.ect(header["ect"])
    red = reduce(c, problem.system().rules, header["mode"], _backend(problem, args),
                 header["fuel"], header.get("strategy", "full"))
    fresh = _trace_lines(header, red)
    want = [json.dumps(json.loads(x), ensure_ascii=False) for x in recorded]
    got = [json.dumps(json.loads(x), ensure_ascii=False) for x in fresh]
    if want == got:
        print(f"trace matches ({len(got) - 1} steps)", file=out)
        return EXIT_OK
    for line in difflib.unified_diff(want, got, "recorded", "replayed", lineterm=""):
        print(line, file=out)
    return EXIT_ERROR


COMMANDS = {
    "rewrite": cmd_rewrite, "normal": cmd_normal, "subsume": cmd_subsume, "equiv": cmd_equiv,
    "interpret": cmd_interpret, "verify": cmd_verify, "trace": cmd_trace,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.cmd](args, out)
    except (LctrsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
