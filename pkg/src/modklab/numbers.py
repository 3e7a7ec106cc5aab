"""Modular arithmetic and subset ranking helpers used by the constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoMultiplier, NotCoprime, RankOutOfRange

_LIMIT = 1 << 64


def _checked(x: int) -> int:
    if x >= _LIMIT:
        raise OverflowError(f"{x} does not fit in 64 bits")
    return x


@dataclass(frozen=True)
class PrimeFactorSet:
    factors: tuple[int, ...]

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def __contains__(self, p):
        return p in self.factors

    def __le__(self, other: PrimeFactorSet) -> bool:
        return set(self.factors) <= set(other.factors)

    def __str__(self):
        return "{" + ",".join(map(str, self.factors)) + "}"

    @property
    def product(self) -> int:
        return math.prod(self.factors)


def prime_factors(k: int) -> PrimeFactorSet:
    """Distinct prime divisors of ``k`` by trial division."""
    if k < 1:
        raise ValueError("k must be positive")
    found = []
    p = 2
    while p * p <= k:
        if k % p == 0:
            found.append(p)
            while k % p == 0:
                k //= p
        p += 1
    if k > 1:
        found.append(k)
    return PrimeFactorSet(tuple(found))


def is_prime(p: int) -> bool:
    return p >= 2 and prime_factors(p).factors == (p,)


def is_power_of_two(k: int) -> bool:
    return k >= 1 and k & (k - 1) == 0


def pf_kl(k: int, ell: int) -> PrimeFactorSet:
    """Prime factors of ``k / gcd(k, ell)``."""
    if not 1 <= ell <= k - 1:
        raise ValueError(f"ell={ell} outside 1..{k - 1}")
    return prime_factors(k // math.gcd(k, ell))


def find_multiplier(k: int, ell1: int, ell2: int) -> int:
    """Smallest m in 1..k-1 with m*ell1 = ell2 (mod k)."""
    if math.gcd(k, ell1) and ell2 % math.gcd(k, ell1):
        raise NoMultiplier(f"gcd({k},{ell1}) does not divide {ell2}")
    for m in range(1, k):
        if (m * ell1 - ell2) % k == 0:
            return m
    raise NoMultiplier(f"no multiplier for {ell1} -> {ell2} mod {k}")


def find_exponent(n: int, k: int) -> int:
    """Smallest i >= 0 with 2^(n+i) = 1 (mod k), for odd k >= 3."""
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be odd and at least 3")
    for i in range(k):
        if pow(2, n + i, k) == 1:
            return i
    raise AssertionError("Euler's theorem violated")  # unreachable


def totient(x: int) -> int:
    result = x
    for p in prime_factors(x):
        result -= result // p
    return result


def find_r(k: int, ell: int, base: int) -> int:
    """Smallest multiple r of phi(k^ell) with r >= ell; base^r = 1 (mod k^ell)."""
    mod = _checked(k ** ell)
    if math.gcd(base, mod) != 1:
        raise NotCoprime(f"gcd({base}, {mod}) != 1")
    phi = totient(mod)
    r = phi * max(1, -(-ell // phi))
    if pow(base, r, mod) != 1 % mod:
        raise AssertionError("totient theorem violated")
    return r


def find_beta(alpha: int, ell: int) -> int:
    """beta in [0, (ell-1)!) with alpha + beta = 0 (mod (ell-1)!)."""
    if ell < 1:
        raise ValueError("ell must be positive")
    if ell <= 2:
        return 0
    return (-alpha) % math.factorial(ell - 1)


def subset_rank(subset) -> int:
    """Colexicographic rank of a set of distinct non-negative integers."""
    elems = sorted(subset)
    if len(set(elems)) != len(elems):
        raise ValueError("elements must be distinct")
    return _checked(sum(math.comb(e, j + 1) for j, e in enumerate(elems)))


def subset_unrank(r: int, a: int, universe: int) -> list[int]:
    """The ``a``-subset of ``range(universe)`` with colex rank ``r``."""
    if not 0 <= r < math.comb(universe, a):
        raise RankOutOfRange(f"rank {r} outside [0, C({universe},{a}))")
    out = [0] * a
    top = universe
    while a > 0:
        top -= 1
        c = math.comb(top, a)
        if r >= c:
            r -= c
            a -= 1
            out[a] = top
    return out
