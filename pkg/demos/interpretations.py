"""
Instances of constrained terms and rules
========================================

Over a finite carrier the instance sets are small enough to print.  The
last part shows why comparing value instances cannot decide subsumption:
``h(x)`` with ``x`` logical is subsumed by ``h(x)`` with ``x`` free, yet
neither value-instance set contains the other.
"""

from lctrs import (
    INT, DomainSpec, EnumBackend, IntMod, IntWindow, Var, contains_instance, enumerate_instances,
    format_term, interpret_rule, parse_problem, subsumes, val, value_instances,
)

problem = parse_problem("""
theory intmod 6
sig f : Int * Int -> Int term
sig h : Int -> Int term
rule drop: f(x, y) -> y [0 >= x] vars {x}
ect even: X {x} term f(x, z) exists [y] phi x = y * 2
ect logical: X {x} term h(x) phi true
ect free: term h(x) phi true
""")
mod6 = IntMod(6)
even = problem.ect("even")
f = even.term.head
x, y, z = (Var(n, INT) for n in "xyz")


def show(label, terms):
    print(f"{label}: {{{', '.join(sorted(format_term(t) for t in terms))}}}")


print("even:", problem.ect("even"))
show("  standard, pool {z}", enumerate_instances(even, DomainSpec(mod6, (z,))))
show("  value", value_instances(even, mod6))
u = f(val(0), f(x, y))
print(f"  contains {format_term(u)}?", contains_instance(even, u, EnumBackend(mod6)))

# rule instances over a window of the integers
print("\nground instances of drop on -3..3:")
for g in sorted(interpret_rule(problem.rule("drop"), IntWindow(-3, 3)), key=str):
    print("  ", g)

mod2 = EnumBackend(IntMod(2))
logical, free = problem.ect("logical"), problem.ect("free")
print("\nsubsumed:", subsumes(logical, free, mod2).answer.value)
show("  value instances, logical", value_instances(logical, mod2.model))
show("  value instances, free", value_instances(free, mod2.model))
