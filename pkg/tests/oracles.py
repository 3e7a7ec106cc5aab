"""Independent solution oracles computed from raw tables.

These re-derive each problem's solution set from the defining conditions
without going through modklab's verifier, so they can cross-check it.
"""

from modklab.core import (BadDegreeVertex, BadHyperedge, BrokenOrbit, InconsistentEdge, Kind,
                          ShortOrbit)


def _nbrs(inst, v):
    n = inst.n
    row = inst.oracles["C"](v)
    return {y for y in row if y != v and (y >> n) != (v >> n)}


def bipartite_solutions(inst):
    size = 1 << (inst.n + 1)
    N = {v: _nbrs(inst, v) for v in range(size)}
    sols = {BadDegreeVertex(v) for v in range(1, size) if len(N[v]) not in (0, inst.k)}
    sols |= {InconsistentEdge(x, y) for x in range(size) for y in N[x] if x not in N[y]}
    return sols


def imbalance_solutions(inst):
    size = 1 << inst.n
    S = {v: set(inst.oracles["S"](v)) - {v} for v in range(size)}
    P = {v: set(inst.oracles["P"](v)) - {v} for v in range(size)}
    sols = {BadDegreeVertex(v) for v in range(1, size) if (len(S[v]) - len(P[v])) % inst.k}
    for x in range(size):
        for y in S[x]:
            if x not in P[y]:
                sols.add(InconsistentEdge(x, y))
        for y in P[x]:
            if x not in S[y]:
                sols.add(InconsistentEdge(x, y))
    return sols


def hyper_solutions(inst):
    size = 1 << inst.n
    E = {x: [tuple(sorted(set(e))) for e in inst.oracles["C"](x)] for x in range(size)}
    sols = {BadDegreeVertex(v) for v in range(1, size) if len(E[v]) % inst.k}
    for x in range(size):
        for e in set(E[x]):
            if len(e) % inst.k:
                sols.add(BadHyperedge(x, e))
            if x not in e:
                sols.add(InconsistentEdge(x, x))
            for y in e:
                if y != x and E[x].count(e) != E[y].count(e):
                    sols.add(InconsistentEdge(x, y))
    return sols


def orbit_solutions(inst):
    size, k = 1 << inst.n, inst.k
    lo = inst.m if inst.kind is Kind.GROUP else 0
    pinned = inst.kind is Kind.MOD and k & (k - 1) == 0

    def step(x):
        if x < lo or (pinned and x == 0):
            return x
        row = inst.oracles["C"](x)
        return row[0] if row else x

    sols = set()
    for x in range(lo, size):
        y = x
        for _ in range(k):
            y = step(y)
        if y != x:
            sols.add(BrokenOrbit(x))
            continue
        for d in range(1, k):
            if k % d == 0 and not (pinned and x == 0):
                z = x
                for _ in range(d):
                    z = step(z)
                if z == x:
                    sols.add(ShortOrbit(x, d))
    return sols


def solutions(inst):
    return {
        Kind.BIPARTITE: bipartite_solutions,
        Kind.IMBALANCE: imbalance_solutions,
        Kind.HYPER: hyper_solutions,
        Kind.GROUP: orbit_solutions,
        Kind.MOD: orbit_solutions,
    }[inst.kind](inst)
