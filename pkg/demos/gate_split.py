"""
One redex, two gates
====================

``1 + sum(y)`` with ``y`` ranging over 0..4 has a redex for the base-case
rule only for some instances.  The partial gate (satisfiability) accepts
it, the most general gate (validity) rejects it and produces a valuation
that breaks the implication.
"""

from lctrs import (
    EnumBackend, ExistentialConstraint, apply_subst, construct_step, evaluate, find_redexes,
    format_ect, format_term, parse_problem,
)

problem = parse_problem("""
theory intmod 16
sig sum : Int -> Int term
rule base: sum(x) -> 0 [0 >= x] vars {x}
ect shifted: X {y} term 1 + sum(y) exists [w] phi 1 <= w /\\ w <= 5 /\\ y = w - 1
""")
backend = EnumBackend(problem.model)
c = problem.ect("shifted")
base = problem.rule("base")

print(format_ect(c))
print("most general redexes:", find_redexes(c, base, "mg", backend))

(redex,) = find_redexes(c, base, "partial", backend)
matcher = {str(k): format_term(v) for k, v in redex.matcher.items()}
print("partial redex at", list(redex.position), "matching", matcher)
print("reduct:", format_ect(construct_step(c, redex)))

# a valuation that satisfies the constraint but not the instantiated guard
guard = apply_subst(redex.matcher, redex.variant.guard)
verdict = backend.check_valid_implication(c.constraint, ExistentialConstraint((), guard))
print("\nguard implied?", verdict.is_sat)
print("counter-valuation:", {str(k): v for k, v in verdict.witness.items()})
print(format_term(guard), "evaluates to", evaluate(guard, verdict.witness, problem.model))
