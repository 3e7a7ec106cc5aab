"""
Flattening two adaptive queries
===============================

The plan solves instance A, then B0 or B1 depending on the parity of A's
solution. The flattened instance is a single Imbalance-mod-3 instance whose
every solution decodes to a full run of the plan.
"""

from modklab import all_solutions, brute_force_solve, gen_random
from modklab.turing import flatten, run_plan_sequential, two_query_plan

plan = two_query_plan(3)
inp = tuple(gen_random("imbalance", 2, 3, seed=j) for j in range(3))

seq = run_plan_sequential(plan, inp, brute_force_solve)
print("sequential answer:", seq)

flat, extract = flatten(plan, inp)
sols = all_solutions(flat)
print("flattened:", flat.describe(), "with", len(sols), "solutions")
for sol in sols[:4]:
    value = extract(sol)
    print(f"  {sol} -> {value} ok={plan.answer_check(inp, value)}")
print("all decode:", all(plan.answer_check(inp, extract(s)) for s in sols))
