"""Structural reductions: copy-and-glue, version splitting, edge scaling,
collapsing ell, power tuples, prime products and the composed change of
(k, ell)."""

from __future__ import annotations

import math

from .core import (BrokenOrbit, Instance, Kind, Oracle, Reduction, ShortOrbit, bipartite_shards,
                   compose, degree, first_witness, identity, local_witness, mutual_neighbors,
                   neighbors, solution_vertices, _bitlen)
from .cycle import bip_to_group, eliminate_multiedges, group_to_bipartite, normalized_orbit
from .errors import (InvalidParameters, NotDivisor, NotPrime, PreconditionFailed,
                     PrimesNotDistinct, PullbackError)
from .numbers import (find_beta, find_multiplier, find_r, is_prime, pf_kl, subset_rank,
                      subset_unrank)
from .problems import AnyOfInstance


# ------------------------------------------------------------ copy and glue

def _glued(inst: Instance, copies: int) -> tuple[Instance, callable]:
    n = inst.n
    cb = _bitlen(copies - 1)
    n2 = n + cb
    mask = (1 << n) - 1

    def enc(v, c):
        if v == 0:
            return 0
        return ((v >> n) << n2) | (c << n) | (v & mask)

    def C(w):
        side, c, body = w >> n2, (w >> n) & ((1 << cb) - 1), w & mask
        if c >= copies or (side == 0 and body == 0 and c):
            return ()
        row = inst.C((side << n) | body)
        if w == 0:
            return tuple(sorted(enc(y, j) for j in range(copies) for y in row))
        return tuple(sorted(enc(y, c) for y in row))

    def support():
        for v in inst.support():
            for c in range(copies):
                if v or not c:
                    yield enc(v, c)

    a = inst.C.out_arity * copies
    out = Instance(Kind.BIPARTITE, n2, inst.k, {"C": Oracle(C, n2 + 1, n2 + 1, a, name="C")},
                   None, support_fn=support)
    parent = lambda w: ((w >> n2) << n) | (w & mask)
    return out, lambda sol: first_witness(inst, [parent(v) for v in solution_vertices(sol)])


def glue_copies(ell2: int) -> Reduction:
    """m disjoint copies sharing one trivial vertex, m * ell1 = ell2 (mod k),
    followed by degree capping."""

    def copies(inst):
        return find_multiplier(inst.k, degree(inst, 0), ell2)

    def build(inst):
        m = copies(inst)
        if m == 1:
            return inst, lambda sol: sol
        glued = Reduction("glue", lambda i: _glued(i, m), lambda i: 1)
        return compose(glued, bipartite_shards(inst.k)).build(inst)

    def cost(inst):
        m = copies(inst)
        return 1 if m == 1 else (inst.k + 1) * (m * inst.C.out_arity + 1)

    return Reduction("glue_copies", build, cost, {Kind.BIPARTITE}, Kind.BIPARTITE)


# ---------------------------------------------------------- version splitting

def split_versions(k: int) -> Reduction:
    """Bipartite[kr#ell] -> Bipartite[k#(ell mod k)]: each vertex is split into
    versions holding consecutive blocks of k neighbours."""

    def build(inst):
        if inst.k % k:
            raise NotDivisor(f"{k} does not divide {inst.k}")
        if degree(inst, 0) % k == 0:
            raise PreconditionFailed(f"trivial degree {degree(inst, 0)} is 0 mod {k}")
        return bipartite_shards(k, name="split_versions", new_k=k).build(inst)

    return Reduction("split_versions", build, lambda inst: (k + 1) * (inst.C.out_arity + 1),
                     {Kind.BIPARTITE}, Kind.BIPARTITE)


# --------------------------------------------------------------- edge scaling

def _weighted(inst: Instance, r: int) -> tuple[Instance, callable]:
    def C(v):
        return tuple(y for y in mutual_neighbors(inst, v) for _ in range(r))

    ell = None if inst.ell is None else inst.ell * r
    out = Instance(Kind.BIPARTITE, inst.n, inst.k * r,
                   {"C": Oracle(C, inst.width, inst.width, inst.C.out_arity * r, name="C")},
                   ell, multi=True, support_fn=inst.support_fn)
    return out, lambda sol: first_witness(inst, solution_vertices(sol))


def scale_edges(r: int) -> Reduction:
    """Bipartite[k#ell] -> Bipartite[kr#ell*r]: every edge gets weight r, the
    extra copies then become mitosis gadgets."""
    if r < 1:
        raise InvalidParameters("r must be positive")
    if r == 1:
        return identity()

    def build(inst):
        capped = bipartite_shards(inst.k)
        weight = Reduction("weight", lambda i: _weighted(i, r), lambda i: i.C.out_arity + 1)
        out, pb = compose(capped, weight, eliminate_multiedges(inst.k * r)).build(inst)
        if out.ell is None:
            out.ell = degree(inst, 0) % inst.k * r
        return out, pb

    def cost(inst):
        cap = bipartite_shards(inst.k).cost_bound(inst)
        return cap * (inst.k + 1) * (inst.k * r + 2)

    return Reduction("scale_edges", build, cost, {Kind.BIPARTITE}, Kind.BIPARTITE)


def embed_prime(k: int) -> Reduction:
    """Bipartite-mod-p -> Bipartite-mod-k for a prime p dividing k."""

    def check(inst):
        p = inst.k
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if k % p:
            raise NotDivisor(f"{p} does not divide {k}")
        return scale_edges(k // p)

    def build(inst):
        out, pb = check(inst).build(inst)
        if out is inst:
            return out, pb
        return Instance(out.kind, out.n, out.k, out.oracles, None, out.m, out.multi,
                        out.support_fn, out.label), pb

    return Reduction("embed_prime", build, lambda inst: check(inst).cost_bound(inst),
                     {Kind.BIPARTITE}, Kind.BIPARTITE)


# ------------------------------------------------------------- orbit helpers

class _Padded:
    """Orbit structure of a Group instance after normalization, with ``blocks``
    extra cycles of length ``size`` appended at 2^n, 2^n + 1, ..."""

    def __init__(self, G: Instance, blocks: int, size: int):
        self.G, self.size = G, size
        self.lo, self.top = G.m, 1 << G.n
        self.hi = self.top + blocks * size

    @property
    def count(self) -> int:
        return self.hi - self.lo

    def orbit(self, x: int) -> list[int]:
        if x >= self.top:
            b = self.top + (x - self.top) // self.size * self.size
            return list(range(b, b + self.size))
        return normalized_orbit(self.G, x)

    def witness(self, xs):
        """First input solution among the original elements of ``xs``."""
        return first_witness(self.G, [x for x in xs if x < self.top])


def _group_out(k: int, count: int, C, bits: int | None = None) -> tuple[Instance, int]:
    N = max(bits or 0, count.bit_length())
    m = (1 << N) - count

    def fn(x):
        return (x,) if x < m else (C(x - m) + m,)

    return Instance(Kind.GROUP, N, k, {"C": Oracle(fn, N, N, 1, name="C")},
                    count % k, m), m


def _orbit_solution(sol) -> int:
    if not isinstance(sol, (ShortOrbit, BrokenOrbit)):
        raise PullbackError(f"unexpected solution {sol!r}")
    return sol.x


# ------------------------------------------------------------- collapsing ell

def collapse_ell() -> Reduction:
    """Group[k*ell#ell] -> Group[k#1] on ell-subsets of the ground set.

    Subsets with the same number of members in each orbit form a class; the
    successor cycles the members in the first orbit whose count a has
    k | C(k*ell, a) through blocks of k in colex order.
    """

    def params(G):
        K, ell = G.k, G.ell
        if not ell or K % ell:
            raise PreconditionFailed(f"ell={ell} does not divide {K}")
        return K // ell, ell

    def build(G):
        k, ell = params(G)
        K = G.k
        g = (1 << G.n) - G.m
        beta = find_beta((g - ell) // K, ell)
        P = _Padded(G, beta, K)
        total = math.comb(P.count, ell)
        if total % k != 1 % k:
            raise AssertionError(f"{total} subsets is not 1 mod {k}")
        bits = ell * (G.n + (1 if beta else 0))

        def C(r):
            a = [P.lo + o for o in subset_unrank(r, ell, P.count)]
            orbits = {}
            for x in a:
                orb = sorted(P.orbit(x))
                orbits.setdefault(orb[0], orb)
            if any(len(o) != K for o in orbits.values()):
                return r
            for rep in sorted(orbits):
                orb = orbits[rep]
                part = [orb.index(x) for x in a if x in orb]
                if math.comb(K, len(part)) % k == 0:
                    break
            else:
                raise AssertionError(f"no orbit count a with {k} | C({K}, a)")
            f = subset_rank(part)
            f = f // k * k + (f + 1) % k
            moved = [orb[j] for j in subset_unrank(f, len(part), K)]
            rest = [x for x in a if x not in orb]
            return subset_rank(x - P.lo for x in rest + moved)

        out, m = _group_out(k, total, C, bits)
        if out.ell != 1 % k:
            raise AssertionError("output ground size is not 1 mod k")

        def pullback(sol):
            r = _orbit_solution(sol) - m
            return P.witness(P.lo + o for o in subset_unrank(r, ell, P.count))

        return out, pullback

    return Reduction("collapse_ell", build, lambda G: G.ell * (G.k + 1),
                     {Kind.GROUP}, Kind.GROUP)


# ---------------------------------------------------------------- power tuples

def power_tuples(ell: int) -> Reduction:
    """Group[k#1] -> Group[k^ell#1] on r-tuples of ground elements."""
    if ell < 1:
        raise InvalidParameters("ell must be positive")

    def build(G):
        k = G.k
        g = (1 << G.n) - G.m
        r = find_r(k, ell, g)
        P = _Padded(G, 0, k)

        def decode(x):
            return [P.lo + (x // g ** j) % g for j in range(r)]

        def C(x):
            xs = decode(x)
            orbs = [P.orbit(xs[0])]
            while len(orbs) < ell and min(orbs[-1]) == xs[len(orbs) - 1]:
                orbs.append(P.orbit(xs[len(orbs)]))
            for j, orb in enumerate(orbs):
                x += (orb[(orb.index(xs[j]) + 1) % len(orb)] - xs[j]) * g ** j
            return x

        out, m = _group_out(k ** ell, g ** r, C, G.n * r)
        return out, lambda sol: P.witness(decode(_orbit_solution(sol) - m)[:ell])

    return Reduction(f"power_tuples({ell})", build, lambda G: ell * G.k,
                     {Kind.GROUP}, Kind.GROUP)


# ------------------------------------------------------------ prime products

def combine_primes() -> Reduction:
    """AnyOf(Group[p_i#1]) -> Group[s#1], s = prod p_i, on tuples with the
    product partition, walked as an odometer (component 1 moves fastest)."""

    def build(inst: AnyOfInstance):
        parts = list(inst.parts)
        ps = [G.k for G in parts]
        if not parts:
            raise InvalidParameters("need at least one part")
        if len(set(ps)) != len(ps):
            raise PrimesNotDistinct(f"moduli {ps} repeat")
        for p in ps:
            if not is_prime(p):
                raise NotPrime(f"{p} is not prime")
        s = math.prod(ps)
        pads = []
        for G, p in zip(parts, ps):
            g = (1 << G.n) - G.m
            if g % p != 1:
                raise PreconditionFailed(f"part with k={p} has ground size {g} != 1 mod {p}")
            pads.append(_Padded(G, (1 - g) // p % (s // p), p))
        sizes = [P.count for P in pads]
        radix = [math.prod(sizes[:j]) for j in range(len(sizes))]

        def decode(x):
            return [P.lo + x // w % c for P, w, c in zip(pads, radix, sizes)]

        def C(x):
            for P, w, y in zip(pads, radix, decode(x)):
                orb = P.orbit(y)
                z = orb[(orb.index(y) + 1) % len(orb)]
                x += (z - y) * w
                if z != min(orb):
                    break
            return x

        out, m = _group_out(s, math.prod(sizes), C)

        def pullback(sol):
            ys = decode(_orbit_solution(sol) - m)
            for i, (P, y) in enumerate(zip(pads, ys)):
                if y < P.top:
                    w = local_witness(P.G, y)
                    if w is not None:
                        return i, w
            raise PullbackError(f"no part explains {sol!r}")

        return out, pullback

    return Reduction("combine_primes", build, lambda inst: sum(G.k for G in inst.parts),
                     None, Kind.GROUP)


# --------------------------------------------------------- changing (k, ell)

def chain_stages(k1: int, ell1: int, k2: int, ell2: int) -> list[Reduction]:
    """Stages taking Bipartite[k1#ell1] to Bipartite[k2#ell2]; steps that
    would be the identity are left out."""
    if not pf_kl(k2, ell2) <= pf_kl(k1, ell1):
        raise PreconditionFailed(f"PF({k2},{ell2}) = {pf_kl(k2, ell2)} is not inside "
                                 f"PF({k1},{ell1}) = {pf_kl(k1, ell1)}")
    g1, g2 = math.gcd(k1, ell1), math.gcd(k2, ell2)
    k, target = k1 // g1, k2 // g2
    e = 1
    while k ** e % target:
        e += 1
    stages = []
    if ell1 != g1:
        stages.append(glue_copies(g1))
    stages.append(bip_to_group())
    if g1 != 1:
        stages.append(collapse_ell())
    if e > 1:
        stages.append(power_tuples(e))
    stages.append(group_to_bipartite())
    if k ** e != target:
        stages.append(split_versions(target))
    if g2 != 1:
        stages.append(scale_edges(g2))
    if ell2 != g2:
        stages.append(glue_copies(ell2))
    return stages


def change_k_ell(k2: int, ell2: int, stage_cap: int | None = None) -> Reduction:
    """Bipartite[k1#ell1] -> Bipartite[k2#ell2] whenever PF(k2, ell2) is inside
    PF(k1, ell1). With ``stage_cap`` every stage output is tabulated."""
    if not 1 <= ell2 < k2:
        raise InvalidParameters(f"ell2={ell2} outside 1..{k2 - 1}")

    def chain(inst):
        stages = chain_stages(inst.k, degree(inst, 0), k2, ell2)
        if stage_cap is not None:
            from .harness import checkpoint

            stages = [checkpoint(r, stage_cap) for r in stages]
        return compose(*stages)

    return Reduction(f"change_k_ell({k2},{ell2})", lambda inst: chain(inst).build(inst),
                     lambda inst: chain(inst).cost_bound(inst), {Kind.BIPARTITE},
                     Kind.BIPARTITE)


def dispatch_to_prime(inst: Instance, stage_cap: int | None = None) -> tuple[int, Reduction]:
    """Smallest prime p in PF(k, ell) and a reduction to Bipartite-mod-p."""
    p = min(pf_kl(inst.k, degree(inst, 0)))
    return p, change_k_ell(p, 1, stage_cap)
