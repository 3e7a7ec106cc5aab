"""Brute-force solving, reduction checking, random instances and materialization."""

from __future__ import annotations

import hashlib
import os
import random
from dataclasses import dataclass, field
from typing import Iterable

from .core import (Instance, Kind, ORBIT_KINDS, Oracle, Reduction, Solution, hyperedges,
                   solution_key, verify_solution)
from .errors import InvalidParameters, ModkError, NoSolutionFound, SearchSpaceTooLarge
from .numbers import is_power_of_two
from . import problems

DEFAULT_CAP = 20


def default_cap() -> int:
    return int(os.environ.get("MODKLAB_CAP", DEFAULT_CAP))


def _support(inst: Instance, cap: int | None) -> list[int]:
    cap = default_cap() if cap is None else cap
    if inst.support_fn is None and inst.kind is not Kind.GROUP and inst.width > cap:
        raise SearchSpaceTooLarge(f"{inst!r}: width {inst.width} exceeds cap {cap}")
    sup = inst.support()
    if len(sup) > (1 << cap):
        raise SearchSpaceTooLarge(f"{inst!r}: support of {len(sup)} exceeds 2^{cap}")
    return sup


# ---------------------------------------------------------------- solving

def all_solutions(inst: Instance, cap: int | None = None) -> list[Solution]:
    """Every valid solution, in candidate-space order.

    Only vertices in the support can carry a solution; the support itself is
    cross-checked against dense scans in the test suite.
    """
    found = []
    for v in _support(inst, cap):
        for cand in problems.local_candidates(inst, v):
            if verify_solution(inst, cand):
                found.append(cand)
    return sorted(set(found), key=solution_key)


def brute_force_solve(inst: Instance, cap: int | None = None) -> Solution:
    """Smallest valid solution in candidate-space order."""
    sols = all_solutions(inst, cap)
    if not sols:
        raise NoSolutionFound(f"no solution in {inst!r}")
    return sols[0]


# ---------------------------------------------------------- materializing

def _probe(inst: Instance, against: Instance | None, fn, x):
    if against is None:
        return fn(x), 0
    before = against.total_calls()
    out = fn(x)
    return out, against.total_calls() - before


def materialize_with_cost(inst: Instance, cap: int | None = None,
                          against: Instance | None = None) -> tuple[Instance, int]:
    """Table-backed copy of ``inst`` plus the largest number of ``against``
    oracle calls made by one evaluation of an ``inst`` oracle."""
    sup = _support(inst, cap)
    worst = 0
    oracles = {}
    for name, o in inst.oracles.items():
        table = {}
        for x in sup:
            row, calls = _probe(inst, against, o, x)
            worst = max(worst, calls)
            if row:
                table[x] = row
        dflt = (lambda x: (x,)) if inst.kind in ORBIT_KINDS else None
        oracles[name] = Oracle.from_table(table, o.in_width, o.out_width, o.out_arity,
                                          default=dflt, name=name)
    keys = tuple(sup)
    out = Instance(inst.kind, inst.n, inst.k, oracles, inst.ell, inst.m, inst.multi,
                   support_fn=lambda: keys, label=inst.label)
    return out, worst


def materialize(inst: Instance, cap: int | None = None) -> Instance:
    return materialize_with_cost(inst, cap)[0]


def checkpoint(red: Reduction, cap: int | None = None) -> Reduction:
    """``red`` with its output materialized once, so later stages read tables."""

    def build(inst):
        out, pb = red.build(inst)
        return materialize(out, cap), pb

    return Reduction(red.name, build, red.cost_bound, red.source, red.target)


# ---------------------------------------------------------------- checking

@dataclass
class CheckReport:
    instances_checked: int = 0
    solutions_checked: int = 0
    failures: list = field(default_factory=list)
    oracle_calls: int = 0
    cost_bound: int = 0
    inconclusive: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures and self.oracle_calls <= self.cost_bound

    def merge(self, other: CheckReport) -> CheckReport:
        return CheckReport(self.instances_checked + other.instances_checked,
                           self.solutions_checked + other.solutions_checked,
                           sorted(self.failures + other.failures, key=repr),
                           max(self.oracle_calls, other.oracle_calls),
                           max(self.cost_bound, other.cost_bound),
                           self.inconclusive + other.inconclusive)

    def summary(self) -> str:
        return (f"instances={self.instances_checked} solutions={self.solutions_checked} "
                f"failures={len(self.failures)} oracle_calls={self.oracle_calls} "
                f"cost_bound={self.cost_bound} inconclusive={self.inconclusive}")


def digest(inst: Instance, cap: int | None = None) -> str:
    """Short content hash of an instance's tables over its support."""
    h = hashlib.sha256(inst.describe().encode())
    for x in _support(inst, cap):
        for name in sorted(inst.oracles):
            h.update(f"{name}{x}:{inst.oracles[name](x)};".encode())
    return h.hexdigest()[:12]


def check_reduction(red: Reduction, inst: Instance, mode: str = "exhaustive", *,
                    samples: int = 200, seed: int = 0, cap: int | None = None,
                    measure: bool = True) -> CheckReport:
    """Pull every (or a sample of) output solution back and verify it on ``inst``."""
    out, pb = red.build(inst)
    report = CheckReport(instances_checked=1, cost_bound=red.cost_bound(inst))
    if mode == "exhaustive":
        mat, worst = materialize_with_cost(out, cap, inst if measure else None)
        report.oracle_calls = worst
        sols = all_solutions(mat, cap)
    elif mode == "sampled":
        rng = random.Random(seed)
        sols = []
        calls = 0
        for _ in range(samples):
            v = rng.randrange(1 << out.width)
            for cand in problems.local_candidates(out, v):
                before = inst.total_calls()
                ok = verify_solution(out, cand)
                calls = max(calls, inst.total_calls() - before)
                if ok:
                    sols.append(cand)
        sols = sorted(set(sols), key=solution_key)
        if not sols:
            report.inconclusive = 1
        if measure:
            for name, o in out.oracles.items():
                for _ in range(min(samples, 32)):
                    x = rng.randrange(1 << o.in_width)
                    report.oracle_calls = max(report.oracle_calls, _probe(out, inst, o, x)[1])
    else:
        raise InvalidParameters(f"unknown mode {mode!r}")
    for sol in sols:
        report.solutions_checked += 1
        try:
            back = pb(sol)
            ok = problems.verify(inst, back)
        except ModkError as exc:
            back, ok = exc, False
        if not ok:
            report.failures.append((inst.label or inst.describe(), sol, back, ok))
    return report


def check_many(red: Reduction, instances: Iterable[Instance], **kw) -> CheckReport:
    total = CheckReport()
    for inst in instances:
        total = total.merge(check_reduction(red, inst, **kw))
    return total


# --------------------------------------------------------------- generators

def _pick_ell(rng, k, ell, limit):
    hi = min(k - 1, limit)
    if ell is None:
        if hi < 1:
            raise InvalidParameters(f"no room for a trivial degree with k={k}")
        return rng.randint(1, hi)
    if not 1 <= ell <= hi:
        raise InvalidParameters(f"ell={ell} impossible here (max {hi})")
    return ell


def _defects(rng, defects):
    return rng.randint(0, 2) if defects is None else defects


def gen_bipartite(n, k, ell=None, seed=0, defects=None) -> Instance:
    rng = random.Random(seed)
    half = 1 << n
    ell = _pick_ell(rng, k, ell, half)
    left, right = list(range(half)), list(range(half, 2 * half))
    adj = {v: set() for v in left + right}
    for r in rng.sample(right, len(right)):
        free = [u for u in left if u != 0 and len(adj[u]) < k]
        if len(free) >= k and rng.random() < 0.6:
            for u in rng.sample(free, k):
                adj[u].add(r)
                adj[r].add(u)
    for r in list(adj[0]):
        adj[0].discard(r)
        adj[r].discard(0)
    for r in rng.sample(right, ell):
        adj[0].add(r)
        adj[r].add(0)
    C = {v: sorted(s) for v, s in adj.items()}
    for _ in range(_defects(rng, defects)):
        u = rng.choice(left[1:]) if half > 1 else None
        r = rng.choice(right)
        if u is None:
            break
        if rng.random() < 0.5 and C[u]:
            gone = rng.choice(C[u])
            if gone not in adj[0]:
                C[u] = [y for y in C[u] if y != gone]
        elif r not in adj[0] and len(C[r]) < k:
            C[r] = sorted(set(C[r]) | {u})
    inst = problems.make_bipartite(n, k, C, ell if rng.random() < 0.5 else None)
    inst.label = f"bipartite/n{n}k{k}/s{seed}"
    return inst


def gen_hyper(n, k, ell=None, seed=0, defects=None) -> Instance:
    rng = random.Random(seed)
    size = 1 << n
    ell = _pick_ell(rng, k, ell, k)
    others = list(range(1, size))
    edges = []
    deg = [0] * size
    for _ in range(size):
        free = [u for u in others if deg[u] < k]
        if len(free) < k:
            break
        if rng.random() < 0.6:
            e = sorted(rng.sample(free, k))
            edges.append(e)
            for u in e:
                deg[u] += 1
    for _ in range(ell):
        free = [u for u in others if deg[u] < k]
        e = sorted([0] + rng.sample(free, min(k - 1, len(free))))
        edges.append(e)
        for u in e:
            deg[u] += 1
    forgotten = set()
    for _ in range(_defects(rng, defects)):
        cands = [i for i, e in enumerate(edges) if 0 not in e and len(e) > 1]
        if not cands:
            break
        i = rng.choice(cands)
        u = rng.choice(edges[i])
        if rng.random() < 0.5:
            forgotten.add((i, u))
        else:
            edges[i] = [y for y in edges[i] if y != u]
    lists = {x: [] for x in range(size)}
    for i, e in enumerate(edges):
        for u in e:
            if (i, u) not in forgotten:
                lists[u].append(tuple(e))
    inst = problems.make_hyper(n, k, [sorted(lists[x]) for x in range(size)],
                               ell if rng.random() < 0.5 else None)
    inst.label = f"hyper/n{n}k{k}/s{seed}"
    return inst


def gen_imbalance(n, k, ell=None, seed=0, defects=None) -> Instance:
    rng = random.Random(seed)
    size = 1 << n
    if k == 0:
        ell = ell or rng.choice([1, -1]) * rng.randint(1, max(1, min(2, size - 1)))
        if abs(ell) > size - 1:
            raise InvalidParameters(f"imbalance {ell} impossible with {size} vertices")
    else:
        ell = _pick_ell(rng, k, ell, size - 1)
    S = {x: set() for x in range(size)}
    P = {x: set() for x in range(size)}
    rounds = rng.randint(0, max(0, (k or 2) - 1))
    for _ in range(rounds):
        perm = rng.sample(range(1, size), size - 1)
        for a, b in zip(perm, perm[1:] + perm[:1]):
            if a != b and b not in S[a]:
                S[a].add(b)
                P[b].add(a)
    targets = rng.sample(range(1, size), abs(ell))
    for y in targets:
        if ell > 0:
            S[0].add(y)
            P[y].add(0)
        else:
            P[0].add(y)
            S[y].add(0)
    for _ in range(_defects(rng, defects)):
        a, b = rng.sample(range(1, size), 2) if size > 2 else (None, None)
        if a is None:
            break
        if rng.random() < 0.5:
            S[a].add(b)
        else:
            S[a].discard(b)
            P[b].discard(a)
    tag = ell if k and rng.random() < 0.5 else None
    inst = problems.make_imbalance(n, k, [sorted(S[x]) for x in range(size)],
                                   [sorted(P[x]) for x in range(size)], tag)
    inst.label = f"imbalance/n{n}k{k}/s{seed}"
    return inst


def _cycles_table(rng, elems, k, table):
    for i in range(0, len(elems) - len(elems) % k, k):
        block = elems[i:i + k]
        for a, b in zip(block, block[1:] + block[:1]):
            table[a] = b


def _orbit_defects(rng, table, ground, count):
    for _ in range(count):
        if not ground:
            break
        x = rng.choice(ground)
        if rng.random() < 0.5:
            table[x] = x
        else:
            table[x] = rng.choice(ground)


def gen_group(n, k, ell=None, seed=0, defects=None) -> Instance:
    rng = random.Random(seed)
    size = 1 << n
    ell = _pick_ell(rng, k, ell, size)
    choices = [m for m in range(size) if (size - m) % k == ell]
    m = rng.choice(choices[: max(1, len(choices) // 2 + 1)])
    ground = list(range(m, size))
    table = list(range(size))
    order = rng.sample(ground, len(ground))
    _cycles_table(rng, order[ell:], k, table)
    res = order[:ell]
    for a, b in zip(res, res[1:] + res[:1]):
        table[a] = b
    _orbit_defects(rng, table, ground, _defects(rng, defects))
    inst = problems.make_group(n, k, m, table)
    inst.label = f"group/n{n}k{k}/s{seed}"
    return inst


def gen_mod(n, k, seed=0, defects=None) -> Instance:
    rng = random.Random(seed)
    size = 1 << n
    ground = list(range(1, size)) if is_power_of_two(k) else list(range(size))
    table = list(range(size))
    order = rng.sample(ground, len(ground))
    _cycles_table(rng, order, k, table)
    tail = order[len(order) - len(order) % k:]
    while tail:
        piece = tail[:rng.randint(1, len(tail))]
        tail = tail[len(piece):]
        for a, b in zip(piece, piece[1:] + piece[:1]):
            table[a] = b
    _orbit_defects(rng, table, ground, _defects(rng, defects))
    inst = problems.make_mod(n, k, table)
    inst.label = f"mod/n{n}k{k}/s{seed}"
    return inst


def gen_leaf(n, seed=0, defects=None) -> Instance:
    rng = random.Random(seed)
    size = 1 << n
    if size < 2:
        raise InvalidParameters("leaf instances need n >= 1")
    order = [0] + rng.sample(range(1, size), size - 1)
    adj = {x: set() for x in range(size)}
    i = 0
    while i < size:
        j = min(size, i + rng.randint(2, max(2, size // 2 + 1)))
        seg = order[i:j]
        for a, b in zip(seg, seg[1:]):
            adj[a].add(b)
            adj[b].add(a)
        if i > 0 and len(seg) > 2 and rng.random() < 0.3:
            adj[seg[0]].add(seg[-1])
            adj[seg[-1]].add(seg[0])
        i = j
    C = {x: sorted(s) for x, s in adj.items()}
    for _ in range(_defects(rng, defects)):
        x = rng.randrange(1, size)
        if C[x] and rng.random() < 0.5:
            C[x] = C[x][:-1] if 0 not in C[x] else C[x]
    inst = problems.make_leaf(n, C)
    inst.label = f"leaf/n{n}/s{seed}"
    return inst


def gen_random(kind: Kind | str, n: int, k: int | None = None, ell: int | None = None,
               seed: int = 0, defects: int | None = None) -> Instance:
    """Deterministic (in ``seed``) table-backed instance of the given family."""
    if isinstance(kind, str):
        kind = Kind[kind.upper()] if kind.upper() in Kind.__members__ else Kind(kind)
    if kind is Kind.LEAF:
        return gen_leaf(n, seed, defects)
    if k is None:
        raise InvalidParameters("k is required")
    if kind is Kind.BIPARTITE:
        return gen_bipartite(n, k, ell, seed, defects)
    if kind is Kind.HYPER:
        return gen_hyper(n, k, ell, seed, defects)
    if kind is Kind.IMBALANCE:
        return gen_imbalance(n, k, ell, seed, defects)
    if kind is Kind.GROUP:
        return gen_group(n, k, ell, seed, defects)
    return gen_mod(n, k, seed, defects)
