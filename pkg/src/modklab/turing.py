"""Turing reductions to Imbalance-mod-p: the +-1 normal form and flattening an
adaptive query plan into one instance.

Imbalances here are out-degree minus in-degree, so in the normal form the
start vertex has one out-arc and no in-arcs, and every other unbalanced vertex
has one in-arc and no out-arcs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .core import (BadDegreeVertex, Instance, Kind, Oracle, Reduction,
                   compose, first_witness, imbalance, imbalance_shards,
                   solution_vertices, verify_solution, _bitlen)
from .cycle import orient_trivial
from .errors import InvalidParameters, NotPrime, PlanError, PlanNondeterminism, PullbackError
from .numbers import is_prime


# ------------------------------------------------------------ normal form

def _glued(inst: Instance, copies: int) -> tuple[Instance, Callable]:
    n = inst.n
    cb = _bitlen(copies - 1)
    n2 = n + cb
    mask = (1 << n) - 1

    def enc(v, c):
        return 0 if v == 0 else (c << n) | v

    def side(o):
        def fn(w):
            c, v = w >> n, w & mask
            if c >= copies or (v == 0 and c):
                return ()
            cs = range(copies) if w == 0 else (c,)
            return tuple(sorted(enc(y, j) for j in cs for y in o(v)))
        return fn

    def support():
        for v in inst.support():
            for c in range(copies):
                if v or not c:
                    yield enc(v, c)

    a = max(inst.S.out_arity, inst.P.out_arity) * copies
    out = Instance(Kind.IMBALANCE, n2, inst.k,
                   {"S": Oracle(side(inst.S), n2, n2, a, name="S"),
                    "P": Oracle(side(inst.P), n2, n2, a, name="P")}, None, support_fn=support)
    return out, lambda sol: first_witness(inst, [w & mask for w in solution_vertices(sol)])


def _fanout(inst: Instance) -> tuple[Instance, Callable]:
    """Every non-start vertex with a single out-arc and no in-arcs gets p - 1
    new sinks, so its own imbalance becomes p."""
    n, p = inst.n, inst.k
    tb = _bitlen(p - 1)
    n2 = n + tb
    mask = (1 << n) - 1

    def source(v):
        return v != 0 and len(inst.S(v)) == 1 and not inst.P(v)

    def S(w):
        j, v = w >> n, w & mask
        if j:
            return ()
        row = inst.S(v)
        if source(v):
            row = row + tuple((t << n) | v for t in range(1, p))
        return row

    def P(w):
        j, v = w >> n, w & mask
        if not j:
            return inst.P(v)
        return (v,) if j < p and source(v) else ()

    def support():
        for v in inst.support():
            yield v
            if source(v):
                for t in range(1, p):
                    yield (t << n) | v

    a = max(inst.S.out_arity + p - 1, inst.P.out_arity)
    out = Instance(Kind.IMBALANCE, n2, p, {"S": Oracle(S, n2, n2, a, name="S"),
                                          "P": Oracle(P, n2, n2, a, name="P")},
                   None, support_fn=support)
    return out, lambda sol: first_witness(inst, [w & mask for w in solution_vertices(sol)])


def normalize_pm1() -> Reduction:
    """Imbalance-mod-p -> Imbalance-mod-p in +-1 normal form (p prime):
    capped degrees, one-sided unbalanced vertices, start imbalance fixed via
    copies, unbalanced vertices split to single arcs, single out-arcs fanned
    into p - 1 sinks."""

    def build(inst):
        p = inst.k
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        oriented = orient_trivial()
        capped = imbalance_shards(p, "block")
        mid = compose(oriented, capped).forward(inst)
        d = imbalance(mid, 0)
        copies = pow(d, -1, p)
        stages = [oriented, capped]
        if copies != 1:
            stages.append(Reduction("glue", lambda i: _glued(i, copies), lambda i: 1))
        stages += [imbalance_shards(p, "unit"),
                   Reduction("fanout", _fanout, lambda i: 2)]
        return compose(*stages).build(inst)

    def cost(inst):
        a = max(inst.S.out_arity, inst.P.out_arity)
        p = inst.k
        first = (p + 1) * (2 * a + 2)
        second = (p + 1) * (2 * p * p + 2)
        return first * second * 2

    return Reduction("normalize_pm1", build, cost, {Kind.IMBALANCE}, Kind.IMBALANCE)


def normal_width(n: int, arity: int, p: int) -> int:
    """Upper bound on the vertex width normalize_pm1 produces from an
    instance with ``n``-bit vertices and list arity ``arity``."""
    return (n + _bitlen(-(-arity // p)) + _bitlen(p - 2) + _bitlen(2 * p - 3)
            + _bitlen(p - 1))


def is_pm1(inst: Instance) -> bool:
    """Whether every vertex in the support is balanced mod p or in +-1 form."""
    p = inst.k
    for v in inst.support():
        o, i = len(inst.S(v)), len(inst.P(v))
        if v == 0:
            if (o, i) != (1, 0):
                return False
        elif (o - i) % p and (o, i) != (0, 1):
            return False
    return True


# --------------------------------------------------------------- query plans

@dataclass(frozen=True)
class AskQuery:
    instance: Instance
    state: Any


@dataclass(frozen=True)
class FinalAnswer:
    value: Any


@dataclass
class QueryPlan:
    """An adaptive oracle algorithm: ``start(input)`` and ``resume(state,
    solution)`` return the next step; at most ``max_queries`` queries."""

    max_queries: int
    start: Callable[[Any], AskQuery | FinalAnswer]
    resume: Callable[[Any, Any], AskQuery | FinalAnswer]
    answer_check: Callable[[Any, Any], bool]
    p: int
    vertex_width: int | None = None


def run_plan_sequential(plan: QueryPlan, inp, solver) -> Any:
    """Ask each query of ``plan`` in turn, answering with ``solver``."""
    step = plan.start(inp)
    asked = 0
    while isinstance(step, AskQuery):
        asked += 1
        if asked > plan.max_queries:
            raise PlanError(f"plan asked more than {plan.max_queries} queries")
        step = plan.resume(step.state, solver(step.instance))
    return step.value


class _Replay:
    """Normalized queries along transcripts, memoised by transcript."""

    def __init__(self, plan: QueryPlan, inp):
        self.plan, self.inp = plan, inp
        self.red = normalize_pm1()
        self.memo: dict[tuple, tuple] = {}

    def query(self, prefix: tuple):
        """(normalized instance, pull-back, state) of the query after
        ``prefix``, or None if ``prefix`` is not a run of the plan."""
        if prefix in self.memo:
            return self.memo[prefix]
        if not prefix:
            step = self.plan.start(self.inp)
        else:
            prev = self.query(prefix[:-1])
            t = prefix[-1]
            if prev is None or not self.solved(prev[0], t):
                self.memo[prefix] = None
                return None
            step = self.plan.resume(prev[2], prev[1](BadDegreeVertex(t)))
        if not isinstance(step, AskQuery):
            res = None if prefix else _raise(PlanError("plan answers without asking; "
                                                       "return the answer directly"))
            self.memo[prefix] = res
            return res
        if len(prefix) >= self.plan.max_queries:
            raise PlanError(f"plan asked more than {self.plan.max_queries} queries")
        if step.instance.k != self.plan.p:
            raise InvalidParameters(f"query modulus {step.instance.k} != {self.plan.p}")
        G, pb = self.red.build(step.instance)
        res = (G, pb, step.state)
        self.memo[prefix] = res
        return res

    def finish(self, prefix: tuple, t: int):
        """The plan's next step after answering ``prefix`` + ``t``."""
        G, pb, state = self.query(prefix)
        return self.plan.resume(state, pb(BadDegreeVertex(t)))

    @staticmethod
    def solved(G: Instance, t: int) -> bool:
        return t != 0 and verify_solution(G, BadDegreeVertex(t))


def _raise(e):
    raise e


def flatten(plan: QueryPlan, inp) -> tuple[Instance, Callable]:
    """One Imbalance-mod-p instance whose solutions encode complete runs of
    ``plan``, plus an extractor from its solutions to the plan's answer.

    A vertex is a transcript (t_1, ..., t_{d-1}) of normalized query solutions
    and a vertex u of query d. Each solution t_d that leads to a further query
    gets an arc to the start of that query, so only finished runs stay
    unbalanced.
    """
    R = _Replay(plan, inp)
    R.query(())
    first = plan.start(inp).instance
    Q = plan.max_queries
    w = plan.vertex_width or normal_width(
        first.n, max(first.S.out_arity, first.P.out_arity), plan.p)
    seg = w + 1
    db = _bitlen(Q - 1)
    width = Q * seg + db
    mask = (1 << w) - 1

    def enc(prefix, u):
        v = (len(prefix)) << (Q * seg)
        for i, t in enumerate(prefix + (u,)):
            v |= (t | (1 << w) if i else t) << (i * seg)
        return v

    def dec(v):
        d = v >> (Q * seg)
        if d >= Q:
            return None
        parts = [(v >> (i * seg)) & ((1 << seg) - 1) for i in range(Q)]
        for i, x in enumerate(parts):
            flag = x >> w
            if flag != (0 < i <= d) or (i > d and x):
                return None
        parts = [x & mask for x in parts[:d + 1]]
        return tuple(parts[:-1]), parts[-1]

    def look(v):
        got = dec(v)
        if got is None:
            return None
        prefix, u = got
        q = R.query(prefix)
        if q is None or u >= (1 << q[0].n):
            return None
        return prefix, u, q[0]

    def bridge_out(prefix, u, G):
        if R.solved(G, u) and isinstance(R.finish(prefix, u), AskQuery):
            nxt = prefix + (u,)
            if R.query(nxt) is not None:
                return [enc(nxt, 0)]
        return []

    def S(v):
        got = look(v)
        if got is None:
            return ()
        prefix, u, G = got
        return tuple([enc(prefix, y) for y in G.S(u)] + bridge_out(prefix, u, G))

    def P(v):
        got = look(v)
        if got is None:
            return ()
        prefix, u, G = got
        row = [enc(prefix, y) for y in G.P(u)]
        if u == 0 and prefix:
            row.append(enc(prefix[:-1], prefix[-1]))
        return tuple(row)

    def support():
        todo = [()]
        while todo:
            prefix = todo.pop()
            G = R.query(prefix)[0]
            if G.n > w:
                raise PlanError(f"query vertex width {G.n} exceeds {w}")
            for u in G.support():
                yield enc(prefix, u)
                if R.solved(G, u) and isinstance(R.finish(prefix, u), AskQuery):
                    todo.append(prefix + (u,))

    out = Instance(Kind.IMBALANCE, width, plan.p,
                   {"S": Oracle(S, width, width, None, name="S"),
                    "P": Oracle(P, width, width, None, name="P")}, None, support_fn=support)

    def extract(sol):
        if not isinstance(sol, BadDegreeVertex):
            raise PullbackError(f"normal-form runs have no {type(sol).__name__} solutions")
        got = look(sol.v)
        if got is None:
            raise PlanNondeterminism(f"vertex {sol.v} does not replay to a run of the plan")
        prefix, u, G = got
        if not R.solved(G, u):
            raise PullbackError(f"{sol!r} is not a solution of its query")
        step = R.finish(prefix, u)
        if isinstance(step, AskQuery):
            raise PlanNondeterminism("replay asks a further query at a finished run")
        return step.value

    return out, extract


# ------------------------------------------------------------ example plans

def two_query_plan(p: int) -> QueryPlan:
    """Input (A, B0, B1): solve A, then solve B_b where b is the parity of the
    first vertex of A's solution; the answer is both solutions."""

    def start(inp):
        return AskQuery(inp[0], ("first", inp))

    def resume(state, sol):
        tag, inp = state[0], state[1]
        if tag == "first":
            b = solution_vertices(sol)[0] & 1
            return AskQuery(inp[1 + b], ("second", inp, sol, b))
        return FinalAnswer((state[2], state[3], sol))

    def check(inp, value):
        s1, b, s2 = value
        return (verify_solution(inp[0], s1) and b == solution_vertices(s1)[0] & 1
                and verify_solution(inp[1 + b], s2))

    return QueryPlan(2, start, resume, check, p)


def single_query_plan(p: int) -> QueryPlan:
    """Input: one instance; the answer is its solution."""
    return QueryPlan(1, lambda inp: AskQuery(inp, None),
                     lambda state, sol: FinalAnswer(sol),
                     lambda inp, value: verify_solution(inp, value), p)
