"""Reductions between Mod-k and Group-mod-k[#1]."""

from __future__ import annotations

from .core import Instance, Kind, Oracle, Reduction, cycle_of, first_witness, _pow2
from .errors import InvalidParameters, PullbackError
from .numbers import find_exponent


def _mod(n: int, k: int, C) -> Instance:
    return Instance(Kind.MOD, n, k, {"C": Oracle(lambda x: (C(x),), n, n, 1, name="C")})


def _orbit_x(sol) -> int:
    return sol.x


def mod2k_to_modk() -> Reduction:
    """Mod[2k] -> Mod[k]: every orbit of size exactly 2k is cut into two runs
    of k starting from its smallest element; other orbits pass through."""

    def build(M):
        if M.k % 2:
            raise InvalidParameters(f"modulus {M.k} is odd")
        K, k = M.k, M.k // 2

        def C(x):
            if x == 0 and _pow2(k):
                return 0
            cyc = cycle_of(M, x, K)
            if cyc is None:
                return x
            if len(cyc) != K:
                return cyc[1 % len(cyc)]
            s = cyc.index(min(cyc))
            p = (-s) % K
            rot = cyc[s:] + cyc[:s]
            return rot[p // k * k + (p % k + 1) % k]

        return _mod(M.n, k, C), lambda sol: first_witness(M, [_orbit_x(sol)])

    return Reduction("mod2k_to_modk", build, lambda M: M.k, {Kind.MOD}, Kind.MOD)


def modk_to_mod2k() -> Reduction:
    """Mod[k] -> Mod[2k]: each orbit is woven with its copy,
    C'(0x) = 1x and C'(1x) = 0C(x)."""

    def build(M):
        if _pow2(M.k):
            raise InvalidParameters("weaving needs k that is not a power of 2: the spare "
                                    "element 1.0^n would be an unexplained solution")
        n = M.n
        top = 1 << n

        def C(y):
            if y < top:
                return y | top
            row = M.C(y - top)
            return row[0] if row else y - top

        return _mod(n + 1, 2 * M.k, C), lambda sol: first_witness(M, [_orbit_x(sol) % top])

    return Reduction("modk_to_mod2k", build, lambda M: 2, {Kind.MOD}, Kind.MOD)


def _check_odd(k: int):
    if k < 3 or k % 2 == 0:
        raise InvalidParameters(f"k={k} must be odd and at least 3")


def modk_to_group() -> Reduction:
    """Mod[k] (k odd) -> Group[k#1]: 2^i copies with 2^(n+i) = 1 (mod k), m = 0."""

    def build(M):
        _check_odd(M.k)
        n = M.n
        i = find_exponent(n, M.k)
        mask = (1 << n) - 1

        def C(y):
            row = M.C(y & mask)
            return ((y >> n << n) | row[0],) if row else (y,)

        out = Instance(Kind.GROUP, n + i, M.k, {"C": Oracle(C, n + i, n + i, 1, name="C")},
                       1, 0)
        return out, lambda sol: first_witness(M, [_orbit_x(sol) & mask])

    return Reduction("modk_to_group", build, lambda M: 1, {Kind.MOD}, Kind.GROUP)


def _filled_mod(G: Instance, n: int, k: int, lo: int, hi: int, shift: int):
    """Mod[k] on n bits: elements in [lo, hi) cycle in consecutive k-blocks,
    elements from hi on are G's elements shifted by ``shift``."""
    if (hi - lo) % k:
        raise AssertionError(f"{hi - lo} filler elements is not 0 mod {k}")

    def C(y):
        if y < lo:
            return y
        if y < hi:
            r = y - lo
            return lo + r // k * k + (r % k + 1) % k
        x = y - shift
        row = G.C(x) if x >= G.m else ()
        return row[0] + shift if row else y

    def pullback(sol):
        y = _orbit_x(sol)
        if y < hi:
            raise PullbackError(f"solution {sol!r} lies in a filler block")
        return first_witness(G, [y - shift])

    return _mod(n, k, C), pullback


def group_to_modk() -> Reduction:
    """Group[k#1] (k odd) -> Mod[k]: x becomes 1^i x; everything else is cut
    into k-blocks by rank."""

    def build(G):
        _check_odd(G.k)
        if ((1 << G.n) - G.m) % G.k != 1:
            raise InvalidParameters("input must be Group[k#1]")
        n, i = G.n, find_exponent(G.n, G.k)
        shift = ((1 << i) - 1) << n
        return _filled_mod(G, n + i, G.k, 0, shift + G.m, shift)

    return Reduction("group_to_modk", build, lambda G: 1, {Kind.GROUP}, Kind.MOD)


def group_pow2_to_mod() -> Reduction:
    """Group[2^r#(2^r-1)] -> Mod[2^r]: {1, ..., m-1} is cut into 2^r-blocks,
    0 stays pinned."""

    def build(G):
        K = G.k
        if not _pow2(K):
            raise InvalidParameters(f"k={K} is not a power of 2")
        if (1 << G.n) < K or ((1 << G.n) - G.m) % K != K - 1:
            raise InvalidParameters("input must be Group[2^r#(2^r-1)] with n >= r")
        return _filled_mod(G, G.n, K, 1, G.m, 0)

    return Reduction("group_pow2_to_mod", build, lambda G: 1, {Kind.GROUP}, Kind.MOD)
