"""
Walking the reduction cycle
===========================

A small Bipartite-mod-3 instance goes through the four reductions
Bipartite -> Hyper -> Imbalance -> Group -> Bipartite. Each output solution
is pulled back and checked against the original.
"""

from modklab import (bip_to_hyper, brute_force_solve, check_reduction, gen_random,
                     group_to_bipartite, hyper_to_imbalance, imbalance_to_group)
from modklab.harness import materialize

# a seeded instance: 3 bits per side, every vertex should have degree 0 or 3
inst = gen_random("bipartite", 2, 3, ell=1, seed=7)
print("input:", inst.describe())
print("first solution:", brute_force_solve(inst))

# apply the steps one at a time, tabulating each output so the next step
# works on a plain table
cur = inst
for red in (bip_to_hyper(), hyper_to_imbalance(), imbalance_to_group(), group_to_bipartite()):
    rep = check_reduction(red, cur)
    print(f"{red.name:>20}: {rep.summary()}")
    cur = materialize(red.forward(cur), 22)

# the round trip is sound but not small: widths grow at every step
print("back at:", cur.describe())
