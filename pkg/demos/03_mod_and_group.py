"""
Mod-k and Group-mod-k
=====================

A Mod[3] permutation is copied until the ground size is 1 mod 3, then cut
back into a Mod[3] instance. Solutions survive both directions.
"""

from modklab import all_solutions, compose, gen_random, group_to_modk, modk_to_group
from modklab.core import cycle_of

M = gen_random("mod", 3, 3, seed=2)
print("input:", M.describe())
print("short or broken orbits:", all_solutions(M))

G, _ = modk_to_group().build(M)
print("as a group instance:", G.describe(), "ground size", (1 << G.n) - G.m)

red = compose(modk_to_group(), group_to_modk())
out, pull = red.build(M)
for sol in all_solutions(out)[:5]:
    print(f"  {sol} -> {pull(sol)}")

closed = [cycle_of(out, x, 3) for x in range(1 << out.n)]
print("closed orbit sizes:", sorted({len(c) for c in closed if c}),
      " elements on broken orbits:", sum(c is None for c in closed))
