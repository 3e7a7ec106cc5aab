"""Total search problems based on counting modulo k, and reductions between them."""

from .core import (BadDegreeVertex, BadHyperedge, BitString, BrokenOrbit, InconsistentEdge,
                   Instance, Kind, Oracle, Reduction, ShortOrbit, cap_degree, compose, degree,
                   identity, normalize_edges, verify_solution)
from .errors import *  # noqa: F401,F403
from .harness import (CheckReport, all_solutions, brute_force_solve, check_reduction,
                      checkpoint, gen_random, materialize)
from .numbers import (find_beta, find_exponent, find_multiplier, find_r, pf_kl,
                      prime_factors, subset_rank, subset_unrank, totient)
from .problems import (AnyOfInstance, amper_combine, dispatch_fixed_ell, make_bipartite,
                       make_group, make_hyper, make_imbalance, make_leaf, make_mod,
                       otimes_combine, trivial_solution, verify)
from .cycle import (MitosisGadget, bip2_to_leaf, bip_to_group, bip_to_hyper, completeness_cycle,
                    eliminate_multiedges, group_to_bipartite, hyper_to_imbalance,
                    imbalance_to_group, leaf_to_bip2, ppad_imbalance_to_mod_k)
from .structural import (chain_stages, change_k_ell, collapse_ell, combine_primes, dispatch_to_prime,
                         embed_prime, glue_copies, power_tuples, scale_edges, split_versions)
from .pmod import (group_pow2_to_mod, group_to_modk, mod2k_to_modk, modk_to_group,
                   modk_to_mod2k)
from .turing import (AskQuery, FinalAnswer, QueryPlan, flatten, is_pm1, normalize_pm1,
                     run_plan_sequential, single_query_plan, two_query_plan)

__version__ = "0.1.0"
