"""
Randomized checks of the step characterizations
===============================================

Each check generates small systems and constrained terms over integers
modulo a small number, runs the engine, and compares the outcome with
ground rewriting on the enumerated instances.  A failing case is shrunk
before it is reported.
"""

from lctrs import EnumBackend, IntMod, format_ect, format_term, instantiation_normal, is_normal_form
from lctrs.harness import THEOREMS, GenConfig, check, converse_witness

cfg = GenConfig(seed=42, cases=40, modulus=5)
for tid in THEOREMS:
    r = check(tid, cfg)
    print(f"{tid:7s} cases={r.cases_run:3d} exercised={r.exercised:3d} "
          f"failures={len(r.failures)} unknowns={r.unknowns}")

# the fixed witness: partial-normal but not instantiation-normal
system, c = converse_witness()
mod5 = IntMod(5)
print("\nrule f(a) -> b, term", format_ect(c))
print("  partial normal form:", is_normal_form(c, system.rules, "partial", EnumBackend(mod5)).answer.value)
inst = instantiation_normal(c, system.rules, mod5)
print("  instantiation normal:", inst.answer.value, "witness", format_term(inst.evidence))
