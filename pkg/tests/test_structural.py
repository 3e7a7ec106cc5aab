import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from fixtures import t1
from modklab.core import BrokenOrbit, Kind, ShortOrbit, cycle_of, degree, iterate
from modklab.errors import (NoMultiplier, NotDivisor, NotPrime, PreconditionFailed,
                            PrimesNotDistinct)
from modklab.harness import all_solutions, check_reduction, gen_random
from modklab.numbers import find_r, pf_kl
from modklab.problems import AnyOfInstance, make_bipartite, make_group
from modklab.structural import (chain_stages, change_k_ell, collapse_ell, combine_primes,
                                dispatch_to_prime, embed_prime, glue_copies, power_tuples,
                                scale_edges, split_versions)

PROPERTY_SETTINGS = settings(max_examples=20, deadline=None)


def star(n, k, degs):
    """Left vertices 0, 1, ... with the given degrees into the right side."""
    size = 1 << n
    rows = [[] for _ in range(2 * size)]
    for u, d in enumerate(degs):
        for y in range(d):
            rows[u].append(size + y)
            rows[size + y].append(u)
    return make_bipartite(n, k, rows)


def test_glue_k6_5_to_2():
    inst = star(3, 6, [5, 6, 4])
    red = glue_copies(2)
    out, _ = red.build(inst)
    assert degree(out, 0) == 2
    shards = [degree(out, s << (inst.n + 2)) for s in range(4)]
    assert shards == [2, 6, 6, 6]
    assert sum(shards) == 20


def test_glue_identity_and_no_multiplier():
    inst = gen_random("bipartite", 2, 6, ell=2, seed=0)
    out, _ = glue_copies(2).build(inst)
    assert out is inst
    with pytest.raises(NoMultiplier):
        glue_copies(3).build(inst)


@pytest.mark.parametrize("k", [3, 4, 6])
def test_glue_sound_for_all_valid_pairs(k):
    for l1, l2 in itertools.product(range(1, k), repeat=2):
        if l2 % math.gcd(k, l1):
            continue
        inst = gen_random("bipartite", 2 if l1 < 4 else 3, k, ell=l1, seed=l1 * 7 + l2)
        rep = check_reduction(glue_copies(l2), inst)
        assert rep.failures == [] and rep.oracle_calls <= rep.cost_bound


def test_split_versions():
    inst = star(3, 6, [5, 6])
    out, _ = split_versions(3).build(inst)
    assert out.k == 3 and degree(out, 0) == 2
    assert sorted([degree(out, 0), degree(out, 1 << inst.n)]) == [2, 3]
    four = star(3, 6, [5, 4])
    rep = check_reduction(split_versions(3), four)
    assert rep.failures == [] and rep.solutions_checked > 0
    with pytest.raises(NotDivisor):
        split_versions(4).build(inst)
    with pytest.raises(PreconditionFailed):
        split_versions(2).build(gen_random("bipartite", 2, 6, ell=2, seed=0))


def test_scale_edges_on_t1():
    red = scale_edges(2)
    out, _ = red.build(t1())
    assert out.k == 6 and degree(out, 0) == 2
    rep = check_reduction(red, t1())
    assert rep.failures == [] and rep.solutions_checked > 0
    inst = t1()
    assert scale_edges(1).build(inst)[0] is inst


def test_embed_prime():
    for p, k, ell in [(3, 6, 2), (2, 6, 3)]:
        inst = gen_random("bipartite", 2, p, ell=1, seed=p)
        out, _ = embed_prime(k).build(inst)
        assert out.k == k and degree(out, 0) == ell
        assert pf_kl(k, ell).factors == (p,)
    with pytest.raises(NotDivisor):
        embed_prime(9).build(gen_random("bipartite", 2, 2, ell=1, seed=0))
    with pytest.raises(NotPrime):
        embed_prime(8).build(gen_random("bipartite", 2, 4, ell=1, seed=0))


def test_collapse_ground_size_example():
    assert math.comb(6, 2) == 15 and 15 % 2 == 1
    G = gen_random("group", 3, 4, ell=2, seed=0)
    out, _ = collapse_ell().build(G)
    g = (1 << G.n) - G.m
    assert (1 << out.n) - out.m == math.comb(g, 2)
    assert ((1 << out.n) - out.m) % 2 == 1


def test_collapse_short_orbit_pulls_back():
    # ground {2..7}: one 4-cycle {2,3,4,5} and a swapped pair {6,7}
    G = make_group(3, 4, 2, [0, 1, 3, 4, 5, 2, 7, 6])
    red = collapse_ell()
    out, _ = red.build(G)
    rep = check_reduction(red, G)
    assert rep.failures == []
    assert all_solutions(out)


@pytest.mark.parametrize("K,ell", [(4, 2), (6, 2), (6, 3)])
def test_collapse_sound(K, ell):
    for seed in range(6):
        G = gen_random("group", 3, K, ell=ell, seed=seed)
        rep = check_reduction(collapse_ell(), G)
        assert rep.failures == [] and rep.oracle_calls <= rep.cost_bound


def test_power_tuples_examples():
    assert find_r(2, 2, 3) == 2
    G = make_group(2, 2, 1, [0, 2, 1, 3])
    red = power_tuples(2)
    out, pb = red.build(G)
    assert (1 << out.n) - out.m == 9 and out.k == 4
    assert check_reduction(red, G).failures == []
    # fixed point 3 is a short orbit; every solution pulls back to it
    assert {pb(s) for s in all_solutions(out)} == {ShortOrbit(3, 1)}


def test_power_tuples_full_orbits_have_size_k_power():
    G = make_group(3, 2, 1, [0, 2, 1, 4, 3, 6, 5, 7])
    out, _ = power_tuples(2).build(G)
    for x in range(out.m, 1 << out.n):
        cyc = cycle_of(out, x, 64)
        assert cyc is not None
    assert any(len(cycle_of(out, x, 64)) == 4 for x in range(out.m, 1 << out.n))


def test_combine_primes():
    g2 = make_group(2, 2, 1, [0, 2, 1, 3])
    g3 = make_group(2, 3, 0, [1, 2, 0, 3])
    red = combine_primes()
    inst = AnyOfInstance([g2, g3])
    out, pb = red.build(inst)
    assert out.k == 6 and ((1 << out.n) - out.m) % 6 == 1
    rep = check_reduction(red, inst)
    assert rep.failures == [] and rep.solutions_checked > 0
    with pytest.raises(PrimesNotDistinct):
        red.build(AnyOfInstance([g3, g3]))
    with pytest.raises(NotPrime):
        red.build(AnyOfInstance([gen_random("group", 3, 4, ell=1, seed=0)]))


def test_combine_full_classes_have_size_s():
    g2 = make_group(2, 2, 1, [0, 2, 1, 3])
    g3 = make_group(3, 3, 1, [0, 2, 3, 1, 5, 6, 4, 7])
    out, pb = combine_primes().build(AnyOfInstance([g2, g3]))
    sizes = {}
    for x in range(out.m, 1 << out.n):
        c = cycle_of(out, x, 64)
        sizes[len(c)] = sizes.get(len(c), 0) + 1
    assert 6 in sizes
    backs = {pb(s) for s in all_solutions(out)}
    assert backs == {(0, ShortOrbit(3, 1)), (1, ShortOrbit(7, 1))}


def test_chain_stage_lists():
    names = lambda *a: [r.name for r in chain_stages(*a)]
    assert "collapse_ell" in names(6, 2, 3, 1)
    assert names(6, 3, 2, 1) == ["bip_to_group", "collapse_ell", "group_to_bipartite"]
    assert "split_versions" in names(6, 1, 3, 1)
    assert "power_tuples(2)" in names(2, 1, 4, 1)
    with pytest.raises(PreconditionFailed):
        chain_stages(6, 2, 2, 1)


def test_dispatch_to_prime():
    for ell, p in [(2, 3), (3, 2), (1, 2)]:
        inst = gen_random("bipartite", 2, 6, ell=ell, seed=ell)
        assert dispatch_to_prime(inst)[0] == p


def test_change_k_ell_6_2_to_3_1():
    inst = gen_random("bipartite", 2, 6, ell=2, seed=0)
    rep = check_reduction(change_k_ell(3, 1, stage_cap=22), inst, measure=False)
    assert rep.failures == [] and rep.solutions_checked > 0


@PROPERTY_SETTINGS
@given(st.integers(0, 10**6), st.sampled_from([(4, 2), (6, 2), (6, 3), (2, 1), (3, 1)]))
def test_collapse_and_power_ground_sizes(seed, kl):
    K, ell = kl
    if ell > 1:
        G = gen_random("group", 3, K, ell=ell, seed=seed)
        out, _ = collapse_ell().build(G)
        assert ((1 << out.n) - out.m) % (K // ell) == 1 % (K // ell)
    else:
        G = gen_random("group", 2, K, ell=1, seed=seed)
        out, _ = power_tuples(2).build(G)
        assert ((1 << out.n) - out.m) % K ** 2 == 1
        assert check_reduction(power_tuples(2), G).failures == []
