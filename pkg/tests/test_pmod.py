import pytest
from hypothesis import given, settings, strategies as st

from modklab.core import ShortOrbit, compose, cycle_of
from modklab.errors import InvalidParameters
from modklab.harness import all_solutions, check_reduction, gen_random
from modklab.pmod import (group_pow2_to_mod, group_to_modk, mod2k_to_modk, modk_to_group,
                          modk_to_mod2k)
from modklab.problems import make_group, make_mod

PROPERTY_SETTINGS = settings(max_examples=30, deadline=None)


def test_six_cycle_splits_into_two_three_cycles():
    M = make_mod(3, 6, [1, 2, 3, 4, 5, 0, 6, 7])
    out, pb = mod2k_to_modk().build(M)
    assert sorted(cycle_of(out, 0, 3)) == [0, 1, 2]
    assert sorted(cycle_of(out, 3, 3)) == [3, 4, 5]
    assert out.C(6) == (6,)
    assert {pb(s) for s in all_solutions(out)} == {ShortOrbit(6, 1), ShortOrbit(7, 1)}


def test_three_cycle_weaves_into_six_cycle():
    M = make_mod(2, 3, [1, 2, 0, 3])
    out, pb = modk_to_mod2k().build(M)
    assert len(cycle_of(out, 0, 6)) == 6
    assert len(cycle_of(out, 3, 6)) == 2
    assert {pb(s) for s in all_solutions(out)} == {ShortOrbit(3, 1)}
    with pytest.raises(InvalidParameters):
        modk_to_mod2k().build(make_mod(2, 2, [0, 1, 2, 3]))


def test_modk_to_group_copies():
    out, _ = modk_to_group().build(make_mod(2, 3, [1, 2, 0, 3]))
    assert out.n == 2 and out.m == 0
    out, _ = modk_to_group().build(make_mod(3, 3, [1, 2, 0, 4, 5, 3, 6, 7]))
    assert out.n == 4 and (1 << out.n) % 3 == 1


def test_group_to_modk_single_fixed_point():
    G = make_group(2, 3, 3, [0, 1, 2, 3])
    red = group_to_modk()
    out, pb = red.build(G)
    assert sorted(cycle_of(out, 0, 3)) == [0, 1, 2]
    assert all_solutions(out) == [ShortOrbit(3, 1)]
    assert pb(ShortOrbit(3, 1)) == ShortOrbit(3, 1)


def test_group_pow2_to_mod_filler():
    G = make_group(4, 4, 5, list(range(16)))
    out, pb = group_pow2_to_mod().build(G)
    assert sorted(cycle_of(out, 1, 4)) == [1, 2, 3, 4]
    assert out.C(0) == (0,)
    assert check_reduction(group_pow2_to_mod(), G).failures == []
    G1 = make_group(2, 4, 1, [0, 2, 3, 1])
    out, _ = group_pow2_to_mod().build(G1)
    assert out.C(0) == (0,)


def test_round_trip_mod_group_mod():
    red = compose(modk_to_group(), group_to_modk())
    for n in (2, 3):
        for seed in range(10):
            assert check_reduction(red, gen_random("mod", n, 3, seed=seed)).failures == []


@PROPERTY_SETTINGS
@given(st.integers(0, 10**6), st.integers(2, 3), st.integers(2, 3))
def test_pmod_reductions_sound(seed, n, k):
    assert check_reduction(mod2k_to_modk(), gen_random("mod", n, 2 * k, seed=seed)).failures == []
    if k == 3:
        M = gen_random("mod", n, k, seed=seed)
        assert check_reduction(modk_to_mod2k(), M).failures == []
        assert check_reduction(modk_to_group(), M).failures == []
        G = gen_random("group", n, k, ell=1, seed=seed)
        assert check_reduction(group_to_modk(), G).failures == []
    for r in (1, 2):
        K = 1 << r
        if (1 << n) >= K:
            G = gen_random("group", n, K, ell=K - 1, seed=seed)
            assert check_reduction(group_pow2_to_mod(), G).failures == []
