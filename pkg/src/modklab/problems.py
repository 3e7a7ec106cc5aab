"""Constructors, validity checks and candidate spaces for each problem family.

Tables are given as sequences indexed by vertex (or dicts, missing rows
empty) of integer lists. Group and Mod successor tables may hold plain ints.
Lonely is Group with k = 2 and Odd is Hyper with k = 2; they need no types
of their own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .core import (BadDegreeVertex, BadHyperedge, BitString, BrokenOrbit, InconsistentEdge,
                   Instance, Kind, Oracle, ORBIT_KINDS, ShortOrbit, Solution, degree,
                   hyperedges, imbalance, neighbors, verify_solution)
from .errors import (InvalidParameters, InvalidTrivialDegree, MalformedCandidate,
                     NonBipartiteOutput, NoTrivialVertex)
from .numbers import is_power_of_two


def _oracle(C, in_width: int, out_width: int, arity: int | None, name: str) -> Oracle:
    if isinstance(C, Oracle):
        return C
    if isinstance(C, Mapping):
        rows = {x: _row(v) for x, v in C.items()}
    else:
        rows = [_row(v) for v in C]
    return Oracle.from_table(rows, in_width, out_width, arity, name=name)


def _row(v) -> tuple:
    if isinstance(v, int):
        return (v,)
    return tuple(int(y) for y in v)


def _rows(o: Oracle):
    t = o.table
    if t is None:
        return None
    return t.items() if isinstance(t, dict) else enumerate(t)


def _check_range(o: Oracle, width: int):
    for x, row in _rows(o) or ():
        if not 0 <= x < (1 << o.in_width):
            raise InvalidParameters(f"row {x} outside {o.in_width} bits")
        for y in row:
            if not 0 <= y < (1 << width):
                raise InvalidParameters(f"entry {y} in row {x} outside {width} bits")


def _check_k(k):
    if not isinstance(k, int) or k < 2:
        raise InvalidParameters(f"modulus must be >= 2, got {k!r}")


def make_bipartite(n: int, k: int, C, ell: int | None = None, *, multi: bool = False,
                   support_fn=None) -> Instance:
    """Bipartite-mod-k (or Bipartite-mod-k[#ell]) on {0,1} x {0,1}^n."""
    _check_k(k)
    oracle = _oracle(C, n + 1, n + 1, None, "C")
    _check_range(oracle, n + 1)
    for x, row in _rows(oracle) or ():
        if any((y >> n) == (x >> n) for y in row if y != x):
            raise NonBipartiteOutput(f"vertex {x} lists a vertex on its own side")
    inst = Instance(Kind.BIPARTITE, n, k, {"C": oracle}, ell, multi=multi,
                    support_fn=support_fn)
    d = degree(inst, 0)
    if not 1 <= d <= k - 1:
        raise InvalidTrivialDegree(f"trivial degree {d} not in 1..{k - 1}")
    if ell is not None and d != ell:
        raise InvalidTrivialDegree(f"trivial degree {d} != ell={ell}")
    return inst


def make_hyper(n: int, k: int, C, ell: int | None = None, support_fn=None) -> Instance:
    """Hyper-mod-k: C(x) lists the hyperedges (member lists) containing x."""
    _check_k(k)
    if isinstance(C, Oracle):
        oracle = C
    else:
        rows = C.items() if isinstance(C, Mapping) else enumerate(C)
        table = {x: tuple(tuple(int(y) for y in e) for e in row) for x, row in rows}
        if not isinstance(C, Mapping):
            table = [table[x] for x in range(len(table))]
        rows_ = table.values() if isinstance(table, dict) else table
        if any(len(set(e)) > k for row in rows_ for e in row):
            raise InvalidParameters(f"hyperedges have at most {k} members")
        oracle = Oracle.from_table(table, n, n, None, name="C")
    inst = Instance(Kind.HYPER, n, k, {"C": oracle}, ell, support_fn=support_fn)
    d = len(hyperedges(inst, 0))
    if d % k == 0:
        raise InvalidTrivialDegree(f"trivial degree {d} is 0 mod {k}")
    if ell is not None and d != ell:
        raise InvalidTrivialDegree(f"trivial degree {d} != ell={ell}")
    return inst


def make_imbalance(n: int, k: int, S, P, ell: int | None = None, support_fn=None) -> Instance:
    """Imbalance-mod-k; ``k = 0`` gives the exact (PPAD) variant."""
    if k != 0:
        _check_k(k)
    so = _oracle(S, n, n, None, "S")
    po = _oracle(P, n, n, None, "P")
    _check_range(so, n)
    _check_range(po, n)
    inst = Instance(Kind.IMBALANCE, n, k, {"S": so, "P": po}, ell, support_fn=support_fn)
    d = imbalance(inst, 0)
    if (d % k == 0) if k else d == 0:
        raise InvalidTrivialDegree(f"trivial imbalance {d} vanishes modulo {k}")
    if ell is not None and d != ell:
        raise InvalidTrivialDegree(f"trivial imbalance {d} != ell={ell}")
    return inst


def make_group(n: int, k: int, m: int, C) -> Instance:
    """Group-mod-k: a partition of {m, ..., 2^n - 1} given by a successor map."""
    _check_k(k)
    if not 0 <= m < (1 << n):
        raise InvalidParameters(f"m={m} outside [0, 2^{n})")
    if ((1 << n) - m) % k == 0:
        raise InvalidParameters(f"2^{n} - {m} is 0 mod {k}")
    oracle = _oracle(C, n, n, 1, "C")
    _check_range(oracle, n)
    for x, row in _rows(oracle) or ():
        if x < m and row not in ((x,), ()):
            raise InvalidParameters(f"C({x}) must equal {x} below m")
    return Instance(Kind.GROUP, n, k, {"C": oracle}, ((1 << n) - m) % k, m)


def make_mod(n: int, k: int, C) -> Instance:
    """Mod-k: a partition of all of {0,1}^n (0 is pinned when k is a power of 2)."""
    _check_k(k)
    oracle = _oracle(C, n, n, 1, "C")
    _check_range(oracle, n)
    if is_power_of_two(k) and oracle.table is not None and oracle(0) not in ((0,), ()):
        raise InvalidParameters(f"C(0) must be 0 when k={k} is a power of 2")
    return Instance(Kind.MOD, n, k, {"C": oracle})


def make_leaf(n: int, C) -> Instance:
    """Leaf: degree <= 2 graph on {0,1}^n with 0 a leaf."""
    oracle = _oracle(C, n, n, None, "C")
    _check_range(oracle, n)
    inst = Instance(Kind.LEAF, n, 2, {"C": oracle})
    if degree(inst, 0) != 1:
        raise InvalidTrivialDegree("0 must have exactly one listed neighbour")
    return inst


def trivial_solution(inst: Instance) -> BitString:
    if inst.kind in ORBIT_KINDS:
        raise NoTrivialVertex(f"{inst.kind.value} has no trivial vertex")
    return BitString(inst.width, 0)


def trivial_degree(inst: Instance) -> int:
    """Degree (or imbalance) of the trivial vertex; for Group, (2^n - m) mod k."""
    if inst.kind is Kind.IMBALANCE:
        return imbalance(inst, 0)
    if inst.kind is Kind.HYPER:
        return len(hyperedges(inst, 0))
    if inst.kind is Kind.GROUP:
        return ((1 << inst.n) - inst.m) % inst.k
    if inst.kind is Kind.MOD:
        raise NoTrivialVertex("Mod has no trivial vertex")
    return degree(inst, 0)


def dispatch_fixed_ell(inst: Instance) -> tuple[int, Instance]:
    """Measure the trivial degree and return the instance tagged with it."""
    d = trivial_degree(inst)
    if inst.ell == d:
        return d, inst
    out = Instance(inst.kind, inst.n, inst.k, inst.oracles, d, inst.m, inst.multi,
                   inst.support_fn, inst.label)
    return d, out


# ------------------------------------------------------------- combinators

@dataclass(eq=False)
class AmperInstance:
    """Solve the instance selected by ``b``."""

    i0: object
    i1: object
    b: int

    def __post_init__(self):
        if self.b not in (0, 1):
            raise InvalidParameters("selector must be 0 or 1")

    @property
    def selected(self):
        return self.i1 if self.b else self.i0


@dataclass(eq=False)
class OtimesInstance:
    """Solve every part."""

    parts: list


@dataclass(eq=False)
class AnyOfInstance:
    """Solve any one part; a solution is a pair (part index, solution)."""

    parts: list
    label: str = ""

    def total_calls(self) -> int:
        return sum(p.total_calls() for p in self.parts)

    def describe(self) -> str:
        return "AnyOf(" + ", ".join(p.describe() for p in self.parts) + ")"


def amper_combine(i0, i1, b: int) -> AmperInstance:
    return AmperInstance(i0, i1, b)


def otimes_combine(parts: Sequence) -> OtimesInstance:
    return OtimesInstance(list(parts))


def verify(inst, cand) -> bool:
    """verify_solution extended to combined instances."""
    if isinstance(inst, AmperInstance):
        return verify(inst.selected, cand)
    if isinstance(inst, AnyOfInstance):
        if not isinstance(cand, (list, tuple)) or len(cand) != 2:
            raise MalformedCandidate("need a (part index, solution) pair")
        i, sol = cand
        return 0 <= i < len(inst.parts) and verify(inst.parts[i], sol)
    if isinstance(inst, OtimesInstance):
        if not isinstance(cand, (list, tuple)) or len(cand) != len(inst.parts):
            raise MalformedCandidate("need one solution per part")
        return all(verify(p, c) for p, c in zip(inst.parts, cand))
    return verify_solution(inst, cand)


# -------------------------------------------------------- candidate spaces

def candidate_space(inst: Instance) -> Iterator[Solution]:
    """Every admissible candidate, in the order brute force reports them.

    Vertex candidates come first (vertex order; for orbit kinds all (x, d)
    pairs of x then BrokenOrbit(x)), then hyperedge candidates, then ordered
    vertex pairs.
    """
    size = 1 << inst.width
    if inst.kind in ORBIT_KINDS:
        divisors = [d for d in range(1, inst.k) if inst.k % d == 0]
        for x in range(size):
            for d in divisors:
                yield ShortOrbit(x, d)
            yield BrokenOrbit(x)
        return
    for v in range(size):
        yield BadDegreeVertex(v)
    if inst.kind is Kind.HYPER:
        for x in range(size):
            for e in sorted(set(hyperedges(inst, x))):
                yield BadHyperedge(x, e)
    for x in range(size):
        for y in range(size):
            yield InconsistentEdge(x, y)


def candidate_space_size(inst: Instance) -> int:
    w = inst.width
    if inst.kind in ORBIT_KINDS:
        return (1 + sum(inst.k % d == 0 for d in range(1, inst.k))) << w
    return (1 << w) + (1 << (2 * w))


def local_candidates(inst: Instance, v: int) -> Iterator[Solution]:
    """Candidates that can only be valid because of ``v``'s own lists."""
    if inst.kind in ORBIT_KINDS:
        for d in range(1, inst.k):
            if inst.k % d == 0:
                yield ShortOrbit(v, d)
        yield BrokenOrbit(v)
        return
    yield BadDegreeVertex(v)
    if inst.kind is Kind.HYPER:
        edges = sorted(set(hyperedges(inst, v)))
        for e in edges:
            yield BadHyperedge(v, e)
        ys = sorted({y for e in edges for y in e} | {v})
    elif inst.kind is Kind.IMBALANCE:
        ys = sorted(set(inst.S(v)) | set(inst.P(v)))
    else:
        ys = sorted(set(neighbors(inst, v)))
    for y in ys:
        yield InconsistentEdge(v, y)


def is_solution(inst: Instance, cand: Solution) -> bool:
    try:
        return verify_solution(inst, cand)
    except MalformedCandidate:
        return False

