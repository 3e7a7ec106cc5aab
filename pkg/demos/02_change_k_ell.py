"""
Changing the modulus and the trivial degree
===========================================

Bipartite[6#2] reduces to Bipartite[3#1] because PF(3,1) = {3} lies inside
PF(6,2) = {3}. The same input cannot reach Bipartite[2#1].
"""

from modklab import chain_stages, change_k_ell, check_reduction, gen_random, pf_kl
from modklab.errors import PreconditionFailed

inst = gen_random("bipartite", 2, 6, ell=2, seed=0)
print("input:", inst.describe())
print("PF(6,2) =", pf_kl(6, 2), " PF(3,1) =", pf_kl(3, 1), " PF(2,1) =", pf_kl(2, 1))

print("stages:", " -> ".join(r.name for r in chain_stages(6, 2, 3, 1)))

# stage_cap tabulates every intermediate instance, which keeps the
# exhaustive check fast
rep = check_reduction(change_k_ell(3, 1, stage_cap=22), inst, measure=False)
print("(6,2) -> (3,1):", rep.summary())

try:
    change_k_ell(2, 1).build(inst)
except PreconditionFailed as e:
    print("(6,2) -> (2,1) rejected:", e)
