"""The completeness cycle Bipartite -> Hyper -> Imbalance -> Group -> Bipartite,
mitosis gadgets, Leaf <-> Bipartite-mod-2 and the exact-Imbalance embedding."""

from __future__ import annotations

from dataclasses import dataclass

from .core import (Instance, Kind, Oracle, Reduction, bipartite_shards, compose, cycle_of,
                   first_witness, imbalance_shards, mutual_neighbors, neighbors,
                   solution_vertices, successor, _bitlen, BadDegreeVertex, InconsistentEdge,
                   BadHyperedge, ShortOrbit, BrokenOrbit)
from .errors import PreconditionFailed, TrivialDegenerate


def _chain(prep: Reduction, name: str, core_build, core_cost, source, target) -> Reduction:
    """``prep`` (a normalization) followed by a construction that assumes it."""

    def build(inst):
        mid, pb0 = prep.build(inst)
        out, pb1 = core_build(mid)
        return out, lambda sol: pb0(pb1(sol))

    def cost(inst):
        return prep.cost_bound(inst) * core_cost(prep.forward(inst))

    return Reduction(name, build, cost, source, target)


def _concat(members, n: int, k: int) -> int:
    """Members packed into k chunks of n bits, first member in the high chunk."""
    v = 0
    for j, u in enumerate(members):
        v |= u << ((k - 1 - j) * n)
    return v


def _chunks(v: int, n: int, k: int) -> list[int]:
    mask = (1 << n) - 1
    return [(v >> ((k - 1 - j) * n)) & mask for j in range(k)]


# ----------------------------------------------------------- mitosis gadget

@dataclass(frozen=True)
class MitosisGadget:
    """k+1 vertices per side; a_{k+1} and b_{k+1} are the degree-1 ports.

    Vertices are indexed 1..k+1 as in the usual drawing.
    """

    k: int

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        k = self.k
        es = {(i, j) for i in range(1, k + 1) for j in range(1, k + 1)} - {(k, k)}
        return frozenset(es | {(k, k + 1), (k + 1, k)})

    def degrees(self) -> tuple[list[int], list[int]]:
        left = [sum(1 for a, _ in self.edges if a == i) for i in range(1, self.k + 2)]
        right = [sum(1 for _, b in self.edges if b == j) for j in range(1, self.k + 2)]
        return left, right


def eliminate_multiedges(k: int | None = None) -> Reduction:
    """Replace each repeated copy of an edge {u, v} by a mitosis gadget whose
    ports are u and v, so every degree is unchanged and gadget interiors have
    degree k.

    Output vertex layout (below the side bit): tag | position | index | body,
    where original vertices have tag 0 and a gadget is named by its left
    endpoint u and the position of the repeated entry in u's sorted list.
    """

    def build(inst):
        kk = k or inst.k
        n = inst.n
        a = max(1, inst.C.out_arity)
        pb_bits = _bitlen(a - 1)
        ib = _bitlen(kk - 1)
        n2 = n + 1 + pb_bits + ib
        tag = 1 << (n2 - 1)
        mask = (1 << n) - 1

        def orig(v):
            return ((v >> n) << n2) | (v & mask)

        def gadget(side, p, i, u):
            return (side << n2) | tag | (p << (n + ib)) | (i << n) | u

        def gadget_of(u, p):
            """Right endpoint v if (u, p) names a live gadget, else None."""
            lst = neighbors(inst, u)
            if not 1 <= p < len(lst) or lst[p] != lst[p - 1]:
                return None
            v = lst[p]
            mu = min(lst.count(v), neighbors(inst, v).count(u))
            return v if p - lst.index(v) < mu else None

        def C(w):
            side = w >> n2
            if not w & tag:
                if (w >> n) & ((1 << (n2 - n)) - 1):
                    return ()
                v = (side << n) | (w & mask)
                lst = neighbors(inst, v)
                out = []
                for y in sorted(set(lst)):
                    ly = neighbors(inst, y)
                    mu = min(lst.count(y), ly.count(v))
                    if mu == 0:
                        continue
                    out.append(orig(y))
                    u, first = (v, lst.index(y)) if side == 0 else (y, ly.index(v))
                    for p in range(first + 1, first + mu):
                        # u attaches to b_k, v attaches to a_k
                        out.append(gadget(1 - side, p, kk - 1, u & mask))
                return tuple(sorted(out))
            p = (w >> (n + ib)) & ((1 << pb_bits) - 1)
            i = (w >> n) & ((1 << ib) - 1)
            u = w & mask
            if i >= kk:
                return ()
            v = gadget_of(u, p)
            if v is None:
                return ()
            other = [gadget(1 - side, p, j, u) for j in range(kk)]
            if i == kk - 1:
                other = other[:-1] + [orig(v) if side == 0 else orig(u)]
            return tuple(sorted(other))

        def support():
            for v in inst.support():
                yield orig(v)
                if v >> n == 0:
                    lst = neighbors(inst, v)
                    for p in range(1, len(lst)):
                        if gadget_of(v, p) is not None:
                            for i in range(kk):
                                yield gadget(0, p, i, v)
                                yield gadget(1, p, i, v)

        def parents(w):
            if w & tag:
                u = w & mask
                v = gadget_of(u, (w >> (n + ib)) & ((1 << pb_bits) - 1))
                return [u] if v is None else [u, v]
            return [((w >> n2) << n) | (w & mask)]

        out = Instance(Kind.BIPARTITE, n2, kk, {"C": Oracle(C, n2 + 1, n2 + 1, a, name="C")},
                       inst.ell, support_fn=support)
        pb = lambda sol: first_witness(inst, [p for v in solution_vertices(sol)
                                              for p in parents(v)])
        return out, pb

    return Reduction("eliminate_multiedges", build,
                     lambda inst: inst.C.out_arity + 2, {Kind.BIPARTITE}, Kind.BIPARTITE)


# ------------------------------------------------------------ Bipartite -> Hyper

def _bip_to_hyper_core(B: Instance):
    n = B.n
    half = 1 << n

    # B comes out of the capping step, so its lists are already consistent
    def C(u):
        return tuple(tuple(neighbors(B, r)) for r in neighbors(B, u))

    def support():
        return (v for v in B.support() if v < half)

    out = Instance(Kind.HYPER, n, B.k, {"C": Oracle(C, n, n, B.C.out_arity, name="C")},
                   B.ell, support_fn=support)

    def near(sol):
        vs = set()
        for v in solution_vertices(sol):
            vs.add(v)
            vs.update(neighbors(B, v))
        return sorted(vs)

    return out, lambda sol: first_witness(B, near(sol))


def bip_to_hyper() -> Reduction:
    """Left vertices become hypergraph vertices; each right vertex contributes
    its neighbourhood as a hyperedge."""

    def build(inst):
        return _chain(bipartite_shards(inst.k), "", _bip_to_hyper_core,
                      lambda B: B.k + 1, None, None).build(inst)

    def cost(inst):
        return bipartite_shards(inst.k).cost_bound(inst) * (inst.k + 1)

    return Reduction("bip_to_hyper", build, cost, {Kind.BIPARTITE}, Kind.HYPER)


# ------------------------------------------------------------ Hyper -> Imbalance

def hyper_filtered(H: Instance, x: int) -> list[tuple[int, ...]]:
    """Hyperedges at ``x`` that every member lists with the same multiplicity.

    Edges of more than k members cannot be encoded and are dropped.
    """
    raw = [tuple(sorted(set(e))) for e in H.C(x)]
    out = []
    for e in sorted(set(raw)):
        if x not in e or len(e) > H.k:
            continue
        c = raw.count(e)
        if all([tuple(sorted(set(f))) for f in H.C(y)].count(e) == c for y in e if y != x):
            out.extend([e] * c)
    return out


def hyper_to_imbalance() -> Reduction:
    """Vertex u -> v_u, hyperedge e -> v_e, with an arc v_u -> v_e whenever u in e.

    Repeated hyperedges get distinct v_e by a copy index stored between the
    side bit and the member chunks.
    """

    def build(H):
        k, n = H.k, H.n
        if hyper_filtered(H, 0) != sorted(tuple(sorted(set(e))) for e in H.C(0)):
            raise TrivialDegenerate("trivial vertex has inconsistent hyperedges")
        a = max(1, H.C.out_arity)
        cb = _bitlen(a - 1)
        kn = k * n
        W = 1 + cb + kn
        top = 1 << (cb + kn)

        def v_u(u):
            return u << ((k - 1) * n)

        def v_e(e, c):
            return top | (c << kn) | _concat(e, n, k)

        def decode(v):
            if v & top:
                c = (v >> kn) & ((1 << cb) - 1)
                ch = _chunks(v, n, k)
                e = [ch[0]]
                for y in ch[1:]:
                    if y <= e[-1]:
                        break
                    e.append(y)
                if any(ch[len(e):]):
                    return None
                return ("e", tuple(e), c)
            if (v >> kn) or v & ((1 << ((k - 1) * n)) - 1):
                return None
            return ("u", v >> ((k - 1) * n), None)

        def S(v):
            d = decode(v)
            if d is None or d[0] != "u":
                return ()
            lst = hyper_filtered(H, d[1])
            return tuple(v_e(e, lst[:i].count(e)) for i, e in enumerate(lst))

        def P(v):
            d = decode(v)
            if d is None or d[0] != "e":
                return ()
            _, e, c = d
            if hyper_filtered(H, e[0]).count(e) <= c:
                return ()
            return tuple(v_u(u) for u in e)

        def support():
            for u in H.support():
                yield v_u(u)
                for w in S(v_u(u)):
                    yield w

        out = Instance(Kind.IMBALANCE, W, k,
                       {"S": Oracle(S, W, W, a, name="S"), "P": Oracle(P, W, W, k, name="P")},
                       H.ell, support_fn=support)

        def near(sol):
            vs = []
            for v in solution_vertices(sol):
                d = decode(v)
                if d is not None:
                    vs.extend([d[1]] if d[0] == "u" else d[1])
            return vs

        return out, lambda sol: first_witness(H, near(sol))

    def cost(H):
        a = max(1, H.C.out_arity)
        return 1 + a * H.k

    return Reduction("hyper_to_imbalance", build, cost, {Kind.HYPER}, Kind.IMBALANCE)


# ------------------------------------------------------- slot partition -> Group

def _slot_group(W: int, k: int, ell: int, targets, sources, near, base: Instance):
    """Group instance whose classes are built from a source -> target structure.

    Every vertex w of width W owns k elements (w, 0..k-1). If w has targets
    t_1 <= ... <= t_j, element (w, i) joins the class of t_i for i < j and the
    rest are singletons; a vertex without targets has its k elements as one
    class. Elements (0, ell..k-1) are excluded. Element (w, i) has rank
    k*w + i, shifted down by k - ell above the excluded block, and sits at
    m + rank in the ground set.
    """
    N = W + k
    size = k * (1 << W) - (k - ell)
    m = (1 << N) - size

    def rank(w, i):
        r = k * w + i
        return r if r < ell else r - (k - ell)

    def unrank(r):
        if r >= ell:
            r += k - ell
        return divmod(r, k)

    def members(w, i):
        T = targets(w)
        if i < len(T):
            t = T[i]
            return sorted(rank(s, j) for s in sources(t)
                          for j, tt in enumerate(targets(s)) if tt == t)
        if not T:
            return [rank(w, j) for j in range(k)]
        return [rank(w, i)]

    def C(x):
        if x < m:
            return (x,)
        r = x - m
        mem = members(*unrank(r))
        if r not in mem:
            raise AssertionError(f"element {x} missing from its own class")
        return (m + mem[(mem.index(r) + 1) % len(mem)],)

    out = Instance(Kind.GROUP, N, k, {"C": Oracle(C, N, N, 1, name="C")}, ell, m)

    def pullback(sol):
        w, i = unrank(sol.x - m) if sol.x >= m else (None, None)
        vs = [] if w is None else near(w, i)
        return first_witness(base, vs)

    return out, pullback


def _imbalance_split(B: Instance):
    """Directed out/in split of a consistent, capped Imbalance instance."""
    from .core import in_list as mutual_in, out_list as mutual_out

    n, k = B.n, B.k
    inbit = 1 << n

    def balanced(u):
        return len(mutual_out(B, u)) == len(mutual_in(B, u))

    def targets(w):
        if w & inbit:
            return []
        o = mutual_out(B, w)
        T = [inbit | y for y in o]
        if len(o) == len(mutual_in(B, w)):
            T += [inbit | w] * (k - len(o))
        return sorted(T)

    def sources(t):
        v = t & (inbit - 1)
        s = list(mutual_in(B, v))
        if balanced(v):
            s.append(v)
        return sorted(s)

    def near(w, i):
        T = targets(w)
        vs = [w & (inbit - 1)]
        if i < len(T):
            vs.append(T[i] & (inbit - 1))
        return vs

    return targets, sources, near


def _reverse(inst: Instance) -> Instance:
    return Instance(Kind.IMBALANCE, inst.n, inst.k, {"S": inst.P, "P": inst.S},
                    None if inst.ell is None else None, support_fn=inst.support_fn)


def orient_trivial() -> Reduction:
    """Reverse every arc if the trivial vertex has negative imbalance."""
    from .core import imbalance

    def build(inst):
        if imbalance(inst, 0) > 0:
            return inst, lambda s: s
        out = _reverse(inst)
        return out, lambda sol: first_witness(inst, solution_vertices(sol))

    return Reduction("orient_trivial", build, lambda inst: 1, {Kind.IMBALANCE}, Kind.IMBALANCE)


def imbalance_to_group() -> Reduction:
    """Split vertices into in/out copies, pad balanced vertices with k - d
    internal arcs, and give every split vertex k elements whose classes
    collect the arcs entering each in-copy."""

    def core(B):
        from .core import imbalance

        ell = imbalance(B, 0) % B.k
        targets, sources, near = _imbalance_split(B)
        return _slot_group(B.n + 1, B.k, ell, targets, sources, near, B)

    def build(inst):
        prep = compose(orient_trivial(), imbalance_shards())
        return _chain(prep, "", core, lambda B: 2 * B.k + 6, None, None).build(inst)

    def cost(inst):
        return imbalance_shards().cost_bound(inst) * (2 * inst.k + 6)

    return Reduction("imbalance_to_group", build, cost, {Kind.IMBALANCE}, Kind.GROUP)


def bip_to_group() -> Reduction:
    """The slot partition applied directly to a bipartite graph (left vertices
    are sources, right vertices are targets); equivalent to going through
    Hyper and Imbalance but with a far smaller ground set."""

    def core(B):
        half = 1 << B.n

        def targets(w):
            return [] if w >= half else neighbors(B, w)

        def near(w, i):
            T = targets(w)
            return [w] + ([T[i]] if i < len(T) else [])

        return _slot_group(B.n + 1, B.k, len(neighbors(B, 0)), targets,
                           lambda t: neighbors(B, t), near, B)

    def build(inst):
        return _chain(bipartite_shards(inst.k), "", core, lambda B: B.k + 2,
                      None, None).build(inst)

    def cost(inst):
        return bipartite_shards(inst.k).cost_bound(inst) * (inst.k + 2)

    return Reduction("bip_to_group", build, cost, {Kind.BIPARTITE}, Kind.GROUP)


# ----------------------------------------------------------- Group -> Bipartite

def normalized_orbit(G: Instance, x: int) -> list[int]:
    """Orbit of x after every element with C^k(x) != x is made a fixed point."""
    if G.kind is Kind.GROUP and x < G.m:
        return [x]
    cyc = cycle_of(G, x, G.k)
    if cyc is None or G.k % len(cyc):
        return [x]
    return cyc


def _group_multigraph(G: Instance) -> tuple[Instance, callable]:
    n, k, m = G.n, G.k, G.m
    ell = ((1 << n) - m) % k
    nk = n * k
    right = 1 << nk
    size = 1 << n

    def block(x):
        if x < m + ell:
            return 0, list(range(m, m + ell))
        b = (x - m - ell) // k
        lo = m + ell + b * k
        return b + 1, list(range(lo, lo + k))

    def cp(x):
        b, mem = block(x)
        return 0 if b == 0 else _concat(mem, n, k)

    def decode_left(v):
        if v == 0:
            return list(range(m, m + ell))
        ch = _chunks(v, n, k)
        lo = ch[0]
        if lo < m + ell or (lo - m - ell) % k or ch != list(range(lo, lo + k)) or ch[-1] >= size:
            return None
        return ch

    def orbit_vertex(x):
        return right | (min(normalized_orbit(G, x)) << (n * (k - 1)))

    def C(v):
        if v & right:
            body = v & (right - 1)
            y = body >> (n * (k - 1))
            if body & ((1 << (n * (k - 1))) - 1) or y < m:
                return ()
            orb = normalized_orbit(G, y)
            if min(orb) != y:
                return ()
            return tuple(sorted(cp(x) for x in orb))
        mem = decode_left(v)
        if mem is None:
            return ()
        return tuple(sorted(orbit_vertex(x) for x in mem))

    def support():
        seen = set()
        for x in range(m, size):
            seen.add(cp(x))
            if min(normalized_orbit(G, x)) == x:
                seen.add(orbit_vertex(x))
        return seen

    out = Instance(Kind.BIPARTITE, nk, k, {"C": Oracle(C, nk + 1, nk + 1, k, name="C")}, ell,
                   multi=True, support_fn=support)

    def near(sol):
        xs = []
        for v in solution_vertices(sol):
            if v & right:
                xs.append((v & (right - 1)) >> (n * (k - 1)))
            else:
                xs.extend(decode_left(v) or [])
        return [x for x in xs if m <= x < size]

    return out, lambda sol: first_witness(G, near(sol))


def group_to_bipartite() -> Reduction:
    """Canonical k-blocks of the ground set on the left, one right vertex per
    orbit, an edge per element; repeated edges go through mitosis gadgets."""
    multi = Reduction("group_multigraph", _group_multigraph, lambda G: G.k * G.k,
                      {Kind.GROUP}, Kind.BIPARTITE)
    red = compose(multi, eliminate_multiedges())

    def cost(G):
        return G.k * G.k * (G.k + 3)

    return Reduction("group_to_bipartite", red.build, cost, {Kind.GROUP}, Kind.BIPARTITE)


def completeness_cycle(stage_cap: int | None = None) -> Reduction:
    """Bipartite -> Hyper -> Imbalance -> Group -> Bipartite.

    With ``stage_cap`` every intermediate instance is tabulated once, which
    keeps exhaustive checks of the whole cycle fast; stacked lazy oracles
    multiply their per-call costs.
    """
    stages = [bip_to_hyper(), hyper_to_imbalance(), imbalance_to_group(), group_to_bipartite()]
    if stage_cap is not None:
        from .harness import checkpoint

        stages = [checkpoint(r, stage_cap) for r in stages]
    return compose(*stages)


# ------------------------------------------------------------- Leaf <-> Bip-2

def leaf_to_bip2() -> Reduction:
    """x_u = 0.u.0^n on the left and y_uv = 1.u.v on the right for each edge."""

    def build(L):
        n = L.n
        if len(mutual_neighbors(L, 0)) != 1:
            raise TrivialDegenerate("trivial leaf has an inconsistent edge")
        top = 1 << (2 * n)
        mask = (1 << n) - 1

        def y(u, v):
            u, v = min(u, v), max(u, v)
            return top | (u << n) | v

        def C(w):
            if w & top:
                u, v = (w >> n) & mask, w & mask
                if u < v and v in mutual_neighbors(L, u):
                    return (u << n, v << n)
                return ()
            if w & mask:
                return ()
            u = w >> n
            return tuple(sorted(y(u, v) for v in mutual_neighbors(L, u)))

        def support():
            for u in range(1 << n):
                yield u << n
                for v in mutual_neighbors(L, u):
                    yield y(u, v)

        out = Instance(Kind.BIPARTITE, 2 * n, 2,
                       {"C": Oracle(C, 2 * n + 1, 2 * n + 1, 2, name="C")}, 1,
                       support_fn=support)

        def near(sol):
            vs = []
            for w in solution_vertices(sol):
                if w & top:
                    vs += [(w >> n) & mask, w & mask]
                else:
                    vs.append((w >> n) & mask)
            return vs

        return out, lambda sol: first_witness(L, near(sol))

    return Reduction("leaf_to_bip2", build, lambda L: 3, {Kind.LEAF}, Kind.BIPARTITE)


def bip2_to_leaf() -> Reduction:
    """A Bipartite-mod-2 graph with degrees capped at 2 is a Leaf instance."""

    def core(B):
        W = B.n + 1
        C = Oracle(lambda v: tuple(mutual_neighbors(B, v)), W, W, 2, name="C")
        out = Instance(Kind.LEAF, W, 2, {"C": C}, support_fn=B.support_fn)
        return out, lambda sol: first_witness(B, solution_vertices(sol))

    def build(inst):
        if inst.k != 2:
            raise PreconditionFailed("bip2_to_leaf needs k = 2")
        return _chain(bipartite_shards(2), "", core, lambda B: 3, None, None).build(inst)

    def cost(inst):
        return bipartite_shards(2).cost_bound(inst) * 3

    return Reduction("bip2_to_leaf", build, cost, {Kind.BIPARTITE}, Kind.LEAF)


# --------------------------------------------------------- exact -> mod k

def ppad_imbalance_to_mod_k(k: int) -> Reduction:
    """Exact Imbalance to Imbalance-mod-k: every shard carries imbalance in
    {-1, 0, +1}, except the trivial vertex whose excess is packed in blocks."""
    red = imbalance_shards(k, "unit_all", name="ppad_imbalance_to_mod_k", new_k=k)

    def build(inst):
        from .core import imbalance

        if inst.k not in (0, None):
            raise PreconditionFailed("input must be an exact Imbalance instance (k = 0)")
        out, pb = red.build(inst)
        d0 = imbalance(inst, 0)
        out.ell = d0 % k if d0 > 0 else None
        return out, pb

    return Reduction("ppad_imbalance_to_mod_k", build, red.cost_bound, {Kind.IMBALANCE},
                     Kind.IMBALANCE)
