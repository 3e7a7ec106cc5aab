import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from modklab.errors import NoMultiplier, NotCoprime, RankOutOfRange
from modklab.numbers import (find_beta, find_exponent, find_multiplier, find_r, is_prime,
                             pf_kl, prime_factors, subset_rank, subset_unrank, totient)

PROPERTY_SETTINGS = settings(max_examples=200, deadline=None)


def test_prime_factors_examples():
    assert prime_factors(12).factors == (2, 3)
    assert prime_factors(7).factors == (7,)
    assert prime_factors(30).factors == (2, 3, 5)


def test_pf_kl_examples():
    assert pf_kl(6, 2).factors == (3,)
    assert pf_kl(6, 3).factors == (2,)
    assert pf_kl(6, 5) == prime_factors(6)


def test_find_multiplier_examples():
    assert find_multiplier(6, 5, 2) == 4
    with pytest.raises(NoMultiplier):
        find_multiplier(6, 2, 3)
    assert find_multiplier(7, 3, 3) == 1


def test_find_exponent_examples():
    assert find_exponent(2, 3) == 0
    assert find_exponent(3, 3) == 1
    with pytest.raises(ValueError):
        find_exponent(2, 4)


def test_totient_and_find_r_examples():
    assert totient(9) == 6
    assert find_r(6, 1, 5) == 2
    assert find_r(2, 2, 3) == 2
    with pytest.raises(NotCoprime):
        find_r(6, 1, 3)


def test_find_beta_examples():
    assert find_beta(5, 3) == 1
    assert find_beta(17, 2) == 0
    assert find_beta(0, 5) == 0


def test_subset_ranking_examples():
    assert subset_unrank(0, 2, 4) == [0, 1]
    assert subset_rank([1, 2]) == 2
    assert all(subset_rank(subset_unrank(r, 3, 6)) == r for r in range(math.comb(6, 3)))
    with pytest.raises(RankOutOfRange):
        subset_unrank(math.comb(5, 2), 2, 5)


def test_pf_kl_subset_of_pf():
    for k in range(2, 31):
        for ell in range(1, k):
            assert pf_kl(k, ell) <= prime_factors(k)


def test_find_multiplier_iff_gcd_divides():
    for k in range(2, 13):
        for l1, l2 in itertools.product(range(1, k), repeat=2):
            ok = l2 % math.gcd(k, l1) == 0
            if ok:
                m = find_multiplier(k, l1, l2)
                assert 1 <= m < k and (m * l1 - l2) % k == 0
                assert all((j * l1 - l2) % k for j in range(1, m))
            else:
                with pytest.raises(NoMultiplier):
                    find_multiplier(k, l1, l2)


def test_colex_order_matches_itertools():
    for u in range(0, 9):
        for a in range(0, u + 1):
            subsets = sorted(itertools.combinations(range(u), a), key=lambda s: s[::-1])
            for r, s in enumerate(subsets):
                assert subset_unrank(r, a, u) == list(s)


@PROPERTY_SETTINGS
@given(st.integers(2, 10**6))
def test_prime_factors_reproduce_k(k):
    f = prime_factors(k)
    assert all(is_prime(p) for p in f)
    rest = k
    for p in f:
        while rest % p == 0:
            rest //= p
    assert rest == 1


@PROPERTY_SETTINGS
@given(st.sets(st.integers(0, 11)))
def test_rank_unrank_inverse(s):
    r = subset_rank(s)
    assert subset_unrank(r, len(s), 12) == sorted(s)


@PROPERTY_SETTINGS
@given(st.integers(2, 12), st.integers(1, 3), st.integers(1, 200))
def test_find_r_contract(k, ell, base):
    if math.gcd(base, k) != 1:
        return
    r = find_r(k, ell, base)
    assert r >= ell and pow(base, r, k ** ell) == 1 % k ** ell
    assert r % totient(k ** ell) == 0


@PROPERTY_SETTINGS
@given(st.integers(0, 10), st.sampled_from([3, 5, 7, 9, 15]))
def test_find_exponent_is_smallest(n, k):
    i = find_exponent(n, k)
    assert pow(2, n + i, k) == 1
    assert all(pow(2, n + j, k) != 1 for j in range(i))


@PROPERTY_SETTINGS
@given(st.integers(0, 1000), st.integers(1, 7))
def test_find_beta_contract(alpha, ell):
    b = find_beta(alpha, ell)
    f = math.factorial(max(ell - 1, 1))
    assert 0 <= b < f and (alpha + b) % f == 0 or ell <= 2 and b == 0
