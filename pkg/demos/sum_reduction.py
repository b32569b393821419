"""
Summing 1 + ... + x with constrained rewriting
==============================================

The same start term is reduced twice.  Partial steps may narrow the
constraint, so every branch eventually settles on one value.  Most general
steps must hold for all instances at once and get stuck early.
"""

from pathlib import Path

from lctrs import EnumBackend, IntMod, SmtBackend, format_ect, load_problem, reduce

HERE = Path(__file__).parent
problem = load_problem(HERE / "problems" / "sum.lctrs")
rules = problem.system().rules
start = problem.ect("start")

# z3 when available, otherwise integers modulo 16 (large enough for 15)
backend = problem.backend() if SmtBackend.available() else EnumBackend(IntMod(16))
print("backend:", type(backend).__name__)
print("start:  ", format_ect(start))

partial = reduce(start, rules, "partial", backend, fuel=40)
print(f"\npartial: {len(partial.steps)} steps, {len(partial.normal_forms())} normal forms")
print("values:", sorted(partial.value_normal_forms(backend)))

mg = reduce(start, rules, "mg", backend, fuel=40)
print(f"\nmost general: {len(mg.steps)} steps")
for line in mg.trace_lines():
    print("  ", line)
for c in mg.normal_forms():
    print("stuck at:", format_ect(c))

if isinstance(backend, SmtBackend):
    backend.close()
