"""Vertex model, instrumented oracles, instances, solutions and reductions.

Vertices are plain ``int`` values of a declared width. For the bipartite
family the side bit is the most significant bit of the ``n + 1`` wide string,
so ``0x`` is ``x`` and ``1y`` is ``(1 << n) | y``. Ordering is numeric order
everywhere (neighbour ranking, shard assignment, orbit representatives).
"""

from __future__ import annotations

import enum
import threading
import weakref
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import KindMismatch, MalformedCandidate


@dataclass(frozen=True, order=True)
class BitString:
    width: int
    value: int

    def __post_init__(self):
        if self.width < 0 or not 0 <= self.value < (1 << self.width):
            raise ValueError(f"value {self.value} does not fit in {self.width} bits")

    def bit(self, i: int) -> int:
        return (self.value >> i) & 1

    def __int__(self):
        return self.value

    def __str__(self):
        return format(self.value, f"0{self.width}b") if self.width else ""

    @classmethod
    def parse(cls, text: str) -> BitString:
        text = text.replace("·", "")
        return cls(len(text), int(text, 2) if text else 0)

    def concat(self, low: BitString) -> BitString:
        """``self`` followed by ``low`` (``self`` takes the high bits)."""
        return BitString(self.width + low.width, (self.value << low.width) | low.value)


class Oracle:
    """A total, deterministic map from ``in_width``-bit integers to tuples.

    ``call_count`` counts evaluations and is safe to bump from several threads.
    Table-backed oracles keep their table in ``table`` (a sequence indexed by
    input, or a mapping with ``default`` for missing inputs).
    """

    def __init__(self, fn: Callable[[int], tuple], in_width: int, out_width: int,
                 out_arity: int, *, table=None, name: str = ""):
        self._fn = fn
        self.in_width = in_width
        self.out_width = out_width
        self.out_arity = out_arity
        self.table = table
        self.name = name
        self._lock = threading.Lock()
        self._calls = 0

    @classmethod
    def from_table(cls, table: Sequence | Mapping, in_width: int, out_width: int,
                   out_arity: int | None = None, *, default: Callable[[int], tuple] | None = None,
                   name: str = "") -> Oracle:
        if isinstance(table, Mapping):
            table = {int(x): tuple(v) for x, v in table.items()}
            dflt = default or (lambda x: ())

            def fn(x, _t=table, _d=dflt):
                out = _t.get(x)
                return _d(x) if out is None else out
        else:
            table = [tuple(v) for v in table]
            if len(table) != 1 << in_width:
                raise ValueError(f"table has {len(table)} rows, expected {1 << in_width}")
            fn = table.__getitem__
        if out_arity is None:
            rows = table.values() if isinstance(table, dict) else table
            out_arity = max((len(r) for r in rows), default=0)
        return cls(fn, in_width, out_width, out_arity, table=table, name=name)

    @property
    def call_count(self) -> int:
        return self._calls

    def reset(self):
        with self._lock:
            self._calls = 0

    def __call__(self, x: int) -> tuple:
        if not 0 <= x < (1 << self.in_width):
            raise ValueError(f"{self.name or 'oracle'}: input {x} outside {self.in_width} bits")
        with self._lock:
            self._calls += 1
        return self._fn(x)

    def __repr__(self):
        src = "table" if self.table is not None else "lazy"
        return f"Oracle({self.name!r}, {self.in_width}->{self.out_arity}x{self.out_width}, {src})"


class Kind(enum.Enum):
    BIPARTITE = "Bipartite"
    HYPER = "Hyper"
    IMBALANCE = "Imbalance"
    GROUP = "Group"
    MOD = "Mod"
    LEAF = "Leaf"


GRAPH_KINDS = frozenset({Kind.BIPARTITE, Kind.HYPER, Kind.IMBALANCE, Kind.LEAF})
ORBIT_KINDS = frozenset({Kind.GROUP, Kind.MOD})


@dataclass(eq=False)
class Instance:
    """One instance of a problem family.

    Oracles by kind: Bipartite/Leaf/Hyper/Group/Mod use ``C``; Imbalance uses
    ``S`` and ``P``. ``k == 0`` on an Imbalance instance means the exact
    (PPAD) variant. ``multi`` marks a bipartite multigraph whose lists carry
    multiplicities. ``support_fn`` optionally lists every vertex whose lists can
    be non-empty; everything else is isolated.
    """

    kind: Kind
    n: int
    k: int | None
    oracles: dict[str, Oracle]
    ell: int | None = None
    m: int | None = None
    multi: bool = False
    support_fn: Callable[[], Iterable[int]] | None = field(default=None, repr=False)
    label: str = ""

    @property
    def width(self) -> int:
        return self.n + 1 if self.kind is Kind.BIPARTITE else self.n

    @property
    def C(self) -> Oracle:
        return self.oracles["C"]

    @property
    def S(self) -> Oracle:
        return self.oracles["S"]

    @property
    def P(self) -> Oracle:
        return self.oracles["P"]

    def support(self) -> list[int]:
        """Sorted vertices outside of which the instance is inert."""
        if self.kind is Kind.GROUP:
            return list(range(self.m, 1 << self.n))
        if self.support_fn is None:
            return list(range(1 << self.width))
        return sorted(set(self.support_fn()))

    def total_calls(self) -> int:
        return sum(o.call_count for o in self.oracles.values())

    def reset_counts(self):
        for o in self.oracles.values():
            o.reset()

    def describe(self) -> str:
        parts = [f"{self.kind.value}", f"n={self.n}"]
        if self.k is not None:
            parts.append(f"k={self.k}")
        if self.ell is not None:
            parts.append(f"ell={self.ell}")
        if self.m is not None:
            parts.append(f"m={self.m}")
        return " ".join(parts)

    def __repr__(self):
        return f"Instance({self.describe()})"


# ---------------------------------------------------------------- solutions

@dataclass(frozen=True)
class BadDegreeVertex:
    v: int


@dataclass(frozen=True)
class InconsistentEdge:
    x: int
    y: int


@dataclass(frozen=True)
class ShortOrbit:
    x: int
    d: int


@dataclass(frozen=True)
class BrokenOrbit:
    x: int


@dataclass(frozen=True)
class BadHyperedge:
    x: int
    edge: tuple[int, ...]


Solution = Union[BadDegreeVertex, InconsistentEdge, ShortOrbit, BrokenOrbit, BadHyperedge]


def solution_key(sol: Solution) -> tuple:
    """Candidate-space order: vertex-local candidates by vertex, then pairs."""
    if isinstance(sol, BadDegreeVertex):
        return (0, sol.v)
    if isinstance(sol, BadHyperedge):
        return (1, sol.x, sol.edge)
    if isinstance(sol, ShortOrbit):
        return (0, sol.x, 0, sol.d)
    if isinstance(sol, BrokenOrbit):
        return (0, sol.x, 1)
    return (2, sol.x, sol.y)


# ------------------------------------------------------------- local views

def _dedup(seq, drop) -> list[int]:
    return sorted({y for y in seq if y != drop})


def neighbors(inst: Instance, v: int) -> list[int]:
    """Sorted neighbour list of ``v`` without duplicates and self-mentions.

    For bipartite instances entries on ``v``'s own side are dropped, which
    enforces bipartiteness structurally. Multigraphs keep multiplicities.
    """
    raw = inst.C(v)
    if inst.kind is Kind.BIPARTITE:
        side = v >> inst.n
        raw = [y for y in raw if (y >> inst.n) != side]
        if inst.multi:
            return sorted(raw)
    return _dedup(raw, v)


def degree(inst: Instance, v: int) -> int:
    """Size of the listed neighbour set; inconsistent edges still count."""
    _check_vertex(inst, v)
    return len(neighbors(inst, v))


def out_list(inst: Instance, v: int) -> list[int]:
    return _dedup(inst.S(v), v)


def in_list(inst: Instance, v: int) -> list[int]:
    return _dedup(inst.P(v), v)


def imbalance(inst: Instance, v: int) -> int:
    return len(out_list(inst, v)) - len(in_list(inst, v))


def hyperedges(inst: Instance, x: int) -> list[tuple[int, ...]]:
    """Canonical hyperedges listed at ``x`` (sorted member tuples, with repeats)."""
    return sorted(tuple(sorted(set(e))) for e in inst.C(x))


def successor(inst: Instance, x: int) -> int:
    """One step of the partition map, with the structural fixed points applied."""
    if inst.kind is Kind.GROUP and x < inst.m:
        return x
    if inst.kind is Kind.MOD and x == 0 and _pow2(inst.k):
        return 0
    out = inst.C(x)
    return out[0] if out else x


def iterate(inst: Instance, x: int, steps: int) -> int:
    for _ in range(steps):
        x = successor(inst, x)
    return x


def cycle_of(inst: Instance, x: int, bound: int) -> list[int] | None:
    """Elements of the cycle through ``x`` if it closes within ``bound`` steps."""
    seen = [x]
    y = successor(inst, x)
    while y != x:
        if len(seen) >= bound:
            return None
        seen.append(y)
        y = successor(inst, y)
    return seen


def trivial_vertex(inst: Instance) -> int | None:
    return None if inst.kind in ORBIT_KINDS else 0


def _pow2(k: int) -> bool:
    return k >= 1 and k & (k - 1) == 0


def _check_vertex(inst: Instance, v: int):
    if not isinstance(v, int) or not 0 <= v < (1 << inst.width):
        raise MalformedCandidate(f"vertex {v!r} outside {inst.width}-bit range")


# ------------------------------------------------------------ verification

def _bad_degree(inst: Instance, d: int) -> bool:
    if inst.kind is Kind.BIPARTITE:
        return d not in (0, inst.k)
    if inst.kind is Kind.LEAF:
        return d == 1
    if not inst.k:
        return d != 0
    return d % inst.k != 0


def _inconsistent(inst: Instance, x: int, y: int) -> bool:
    kind = inst.kind
    if kind is Kind.IMBALANCE:
        if y in out_list(inst, x) and x not in in_list(inst, y):
            return True
        return y in in_list(inst, x) and x not in out_list(inst, y)
    if kind is Kind.HYPER:
        edges = hyperedges(inst, x)
        if x == y:
            return any(x not in e for e in edges)
        other = hyperedges(inst, y)
        return any(y in e and edges.count(e) != other.count(e) for e in set(edges))
    nx = neighbors(inst, x)
    if y not in nx:
        return False
    ny = neighbors(inst, y)
    if inst.multi:
        return nx.count(y) != ny.count(x)
    return x not in ny


def verify_solution(inst: Instance, cand: Solution) -> bool:
    """Whether ``cand`` is a valid solution of ``inst``."""
    kind = inst.kind
    if kind in ORBIT_KINDS:
        if isinstance(cand, ShortOrbit):
            _check_vertex(inst, cand.x)
            if kind is Kind.GROUP and cand.x < inst.m:
                return False
            if kind is Kind.MOD and cand.x == 0 and _pow2(inst.k):
                return False
            d = cand.d
            if not (isinstance(d, int) and 1 <= d < inst.k and inst.k % d == 0):
                return False
            return iterate(inst, cand.x, d) == cand.x
        if isinstance(cand, BrokenOrbit):
            _check_vertex(inst, cand.x)
            return iterate(inst, cand.x, inst.k) != cand.x
        raise MalformedCandidate(f"{type(cand).__name__} is not a {kind.value} solution")
    if isinstance(cand, BadDegreeVertex):
        _check_vertex(inst, cand.v)
        if cand.v == 0:
            return False
        if kind is Kind.IMBALANCE:
            return _bad_degree(inst, imbalance(inst, cand.v))
        if kind is Kind.HYPER:
            return _bad_degree(inst, len(hyperedges(inst, cand.v)))
        return _bad_degree(inst, degree(inst, cand.v))
    if isinstance(cand, InconsistentEdge):
        _check_vertex(inst, cand.x)
        _check_vertex(inst, cand.y)
        return _inconsistent(inst, cand.x, cand.y)
    if isinstance(cand, BadHyperedge) and kind is Kind.HYPER:
        _check_vertex(inst, cand.x)
        e = tuple(sorted(set(cand.edge)))
        return e in hyperedges(inst, cand.x) and len(e) % inst.k != 0
    raise MalformedCandidate(f"{type(cand).__name__} is not a {kind.value} solution")


def local_witness(inst: Instance, v: int) -> Solution | None:
    """A valid solution located at ``v`` (or on an edge at ``v``), if any.

    Pull-backs map an output solution to a few input vertices and call this;
    it is the executable form of "yields a solution of the original instance".
    """
    kind = inst.kind
    if kind in ORBIT_KINDS:
        if kind is Kind.GROUP and v < inst.m:
            return None
        if iterate(inst, v, inst.k) != v:
            return BrokenOrbit(v)
        cyc = cycle_of(inst, v, inst.k)
        d = len(cyc)
        if d != inst.k and not (kind is Kind.MOD and v == 0 and _pow2(inst.k)):
            return ShortOrbit(v, d)
        return None
    for cand in _local_candidates(inst, v):
        if verify_solution(inst, cand):
            return cand
    return None


def _local_candidates(inst: Instance, v: int):
    yield BadDegreeVertex(v)
    if inst.kind is Kind.HYPER:
        for e in sorted(set(hyperedges(inst, v))):
            yield BadHyperedge(v, e)
        yield InconsistentEdge(v, v)
        for e in sorted(set(hyperedges(inst, v))):
            for y in e:
                if y != v:
                    yield InconsistentEdge(v, y)
    elif inst.kind is Kind.IMBALANCE:
        for y in sorted(set(out_list(inst, v)) | set(in_list(inst, v))):
            yield InconsistentEdge(v, y)
    else:
        for y in sorted(set(neighbors(inst, v))):
            yield InconsistentEdge(v, y)


def first_witness(inst: Instance, vertices: Iterable[int]) -> Solution:
    from .errors import PullbackError

    tried = []
    for v in vertices:
        if v is None:
            continue
        w = local_witness(inst, v)
        if w is not None:
            return w
        tried.append(v)
    raise PullbackError(f"no witness near {tried} in {inst!r}")


# -------------------------------------------------------------- reductions

Built = tuple[Instance, Callable[[Solution], Solution]]


class Reduction:
    """Instance map plus witness pull-back (a many-one reduction).

    ``build(inst)`` returns the output instance together with the pull-back
    for that input; results are memoised per input instance so ``forward`` and
    ``pullback`` agree. ``cost(inst)`` bounds the number of input-oracle calls
    made by one evaluation of any output oracle.
    """

    def __init__(self, name: str, build: Callable[[Instance], Built],
                 cost: Callable[[Instance], int], source: Iterable[Kind] | None = None,
                 target: Kind | None = None):
        self.name = name
        self._build = build
        self._cost = cost
        self.source = frozenset(source) if source is not None else None
        self.target = target
        self._memo: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()
        self._lock = threading.Lock()

    def build(self, inst: Instance) -> Built:
        if self.source is not None and inst.kind not in self.source:
            raise KindMismatch(f"{self.name} expects {sorted(k.value for k in self.source)}, "
                               f"got {inst.kind.value}")
        with self._lock:
            hit = self._memo.get(inst)
        if hit is None:
            hit = self._build(inst)
            with self._lock:
                self._memo[inst] = hit
        return hit

    def forward(self, inst: Instance) -> Instance:
        return self.build(inst)[0]

    def pullback(self, inst: Instance, sol: Solution) -> Solution:
        return self.build(inst)[1](sol)

    def cost_bound(self, inst: Instance) -> int:
        return self._cost(inst)

    def output_kind(self, kind: Kind) -> Kind:
        return self.target or kind

    def __repr__(self):
        return f"Reduction({self.name})"


def identity() -> Reduction:
    return Reduction("identity", lambda inst: (inst, lambda s: s), lambda inst: 1)


def compose(*reductions: Reduction) -> Reduction:
    """Sequential composition: first reduction applied first."""
    if not reductions:
        return identity()
    if len(reductions) == 1:
        return reductions[0]
    first, *rest = reductions
    second = compose(*rest) if len(rest) > 1 else rest[0]
    if first.target is not None and second.source is not None and first.target not in second.source:
        raise KindMismatch(f"{first.name} yields {first.target.value}, "
                           f"{second.name} expects {sorted(k.value for k in second.source)}")

    def build(inst):
        mid, pb1 = first.build(inst)
        out, pb2 = second.build(mid)
        return out, lambda sol: pb1(pb2(sol))

    def cost(inst):
        return first.cost_bound(inst) * second.cost_bound(first.forward(inst))

    target = second.target or first.target
    names = [r.name for r in reductions if r.name != "identity"] or ["identity"]
    return Reduction(" ; ".join(names), build, cost, first.source, target)


def on_vertices(pullback_vertices: Callable[[Solution], Iterable[int]], inst: Instance):
    """Pull-back that searches the given input vertices for a witness."""
    return lambda sol: first_witness(inst, pullback_vertices(sol))


def solution_vertices(sol: Solution) -> list[int]:
    if isinstance(sol, BadDegreeVertex):
        return [sol.v]
    if isinstance(sol, InconsistentEdge):
        return [sol.x, sol.y]
    if isinstance(sol, BadHyperedge):
        return [sol.x, *sol.edge]
    return [sol.x]


# ----------------------------------------------------- universal normalizations

def mutual_neighbors(inst: Instance, v: int) -> list[int]:
    """Neighbours ``y`` of ``v`` that list ``v`` back (bipartite/leaf)."""
    return [y for y in neighbors(inst, v) if v in neighbors(inst, y)]


def mutual_out(inst: Instance, v: int) -> list[int]:
    return [y for y in out_list(inst, v) if v in in_list(inst, y)]


def mutual_in(inst: Instance, v: int) -> list[int]:
    return [y for y in in_list(inst, v) if v in out_list(inst, y)]


def _parents_pullback(inst: Instance, parent: Callable[[int], int]):
    return lambda sol: first_witness(inst, [parent(v) for v in solution_vertices(sol)])


def normalize_edges() -> Reduction:
    """Drop every listed edge that is not listed back by the other endpoint."""

    def build(inst):
        from .errors import TrivialDegenerate

        if inst.kind is Kind.IMBALANCE:
            if len(mutual_out(inst, 0)) != len(out_list(inst, 0)) or \
                    len(mutual_in(inst, 0)) != len(in_list(inst, 0)):
                raise TrivialDegenerate("trivial vertex has inconsistent edges")
            S = Oracle(lambda v: tuple(mutual_out(inst, v)), inst.n, inst.n, inst.S.out_arity,
                       name="S")
            P = Oracle(lambda v: tuple(mutual_in(inst, v)), inst.n, inst.n, inst.P.out_arity,
                       name="P")
            out = Instance(Kind.IMBALANCE, inst.n, inst.k, {"S": S, "P": P}, inst.ell,
                           support_fn=inst.support_fn)
        else:
            if len(mutual_neighbors(inst, 0)) != len(neighbors(inst, 0)):
                raise TrivialDegenerate("trivial vertex has inconsistent edges")
            C = Oracle(lambda v: tuple(mutual_neighbors(inst, v)), inst.width, inst.width,
                       inst.C.out_arity, name="C")
            out = Instance(inst.kind, inst.n, inst.k, {"C": C}, inst.ell,
                           support_fn=inst.support_fn)
        return out, _parents_pullback(inst, lambda v: v)

    def cost(inst):
        a = max(o.out_arity for o in inst.oracles.values())
        return len(inst.oracles) * (a + 1)

    return Reduction("normalize_edges", build, cost,
                     {Kind.BIPARTITE, Kind.IMBALANCE, Kind.LEAF})


def _bitlen(x: int) -> int:
    return max(0, x).bit_length()


def _bip_shard(rank: int, deg: int, k: int, trivial: bool) -> int:
    # the trivial vertex puts its partial block first so shard 0 keeps degree ell
    if trivial:
        q = deg % k
        return 0 if rank < q else 1 + (rank - q) // k
    return rank // k


def _bip_block(lst: list[int], s: int, k: int, trivial: bool) -> list[int]:
    if trivial:
        q = len(lst) % k
        if s == 0:
            return lst[:q]
        lo = q + (s - 1) * k
        return lst[lo:lo + k]
    return lst[s * k:(s + 1) * k]


def bipartite_shards(k: int, *, name: str = "cap_degree", new_k: int | None = None,
                     new_ell: Callable[[Instance], int | None] | None = None) -> Reduction:
    """Split every bipartite vertex into shards holding consecutive blocks of <= k
    mutually listed neighbours (numeric rank order).

    The trivial vertex keeps its partial block in shard 0, so the output trivial
    vertex has degree ``deg(0) mod k``. Output vertex = side | shard | body.
    """

    def build(inst):
        from .errors import TrivialDegenerate

        n = inst.n
        a = inst.C.out_arity
        sb = _bitlen(-(-a // k) - 1)
        n2 = n + sb
        mask = (1 << n) - 1
        triv = mutual_neighbors(inst, 0)
        if len(triv) != len(neighbors(inst, 0)):
            raise TrivialDegenerate("trivial vertex has inconsistent edges")
        if len(triv) % k == 0:
            raise TrivialDegenerate(f"trivial degree {len(triv)} is a multiple of {k}")

        def enc(v, s):
            return ((v >> n) << n2) | (s << n) | (v & mask)

        def C(w):
            side, s, body = w >> n2, (w >> n) & ((1 << sb) - 1), w & mask
            v = (side << n) | body
            lst = mutual_neighbors(inst, v)
            out = []
            for y in _bip_block(lst, s, k, v == 0):
                ly = mutual_neighbors(inst, y)
                out.append(enc(y, _bip_shard(ly.index(v), len(ly), k, y == 0)))
            return tuple(out)

        def support():
            for v in inst.support():
                for s in range(1 << sb):
                    yield enc(v, s)

        ell = new_ell(inst) if new_ell else len(triv) % k
        out = Instance(Kind.BIPARTITE, n2, new_k or k,
                       {"C": Oracle(C, n2 + 1, n2 + 1, k, name="C")}, ell, support_fn=support)
        parent = lambda w: ((w >> n2) << n) | (w & mask)
        return out, _parents_pullback(inst, parent)

    return Reduction(name, build, lambda inst: (k + 1) * (inst.C.out_arity + 1),
                     {Kind.BIPARTITE}, Kind.BIPARTITE)


# Imbalance layouts. Each vertex's mutually consistent out/in edges are paired
# in rank order; the |out - in| unpaired ("excess") edges carry the imbalance.
#   block:    shard 0 = remainder of the excess mod M, then full excess
#             blocks of M, then blocks of M pairs (balanced)
#   unit:     the remainder excess edges become single-edge shards
#   unit_all: every excess edge and every pair is its own shard; the trivial
#             vertex still uses the block layout
def _imb_layout(n_out: int, n_in: int, M: int, mode: str, trivial: bool):
    e = abs(n_out - n_in)
    p = min(n_out, n_in)
    if mode == "unit_all" and not trivial:
        return (lambda j: j), (lambda i: e + i)
    rem, full = e % M, e // M
    if mode == "unit" and not trivial:
        return (lambda j: j if j < rem else rem + (j - rem) // M,
                lambda i: rem + full + i // M)
    return (lambda j: 0 if j < rem else 1 + (j - rem) // M,
            lambda i: 1 + full + i // M)


def _imb_shard(o: list[int], i: list[int], y: int, outgoing: bool, M, mode, trivial):
    excess, pair = _imb_layout(len(o), len(i), M, mode, trivial)
    lst = o if outgoing else i
    r = lst.index(y)
    p = min(len(o), len(i))
    return pair(r) if r < p else excess(r - p)


def _imb_max_shards(a: int, M: int, mode: str) -> int:
    blocks = 1 + -(-a // M)
    if mode == "unit":
        return M - 1 + -(-a // M)
    if mode == "unit_all":
        return max(a, blocks)
    return blocks


def imbalance_shards(M: int | None = None, mode: str = "block", *, name: str = "cap_degree",
                     new_k: int | None = None) -> Reduction:
    """Split imbalance vertices so every shard has in- and out-degree <= M."""

    def build(inst):
        from .errors import PreconditionFailed, TrivialDegenerate

        k = inst.k if new_k is None else new_k
        m = M or k
        n = inst.n
        a = max(inst.S.out_arity, inst.P.out_arity)
        sb = _bitlen(_imb_max_shards(a, m, mode) - 1)
        n2 = n + sb
        mask = (1 << n) - 1
        o0, i0 = mutual_out(inst, 0), mutual_in(inst, 0)
        if len(o0) != len(out_list(inst, 0)) or len(i0) != len(in_list(inst, 0)):
            raise TrivialDegenerate("trivial vertex has inconsistent edges")
        d0 = len(o0) - len(i0)
        if d0 % m == 0 or (k and d0 % k == 0):
            raise PreconditionFailed(f"trivial imbalance {d0} vanishes modulo {k or m}")

        def side(w, outgoing):
            s, v = w >> n, w & mask
            o, i = mutual_out(inst, v), mutual_in(inst, v)
            p = min(len(o), len(i))
            excess, pair = _imb_layout(len(o), len(i), m, mode, v == 0)
            mine = o if outgoing else i
            grow = len(o) >= len(i) if outgoing else len(i) >= len(o)
            out = []
            for r, y in enumerate(mine):
                if r < p:
                    t = pair(r)
                elif grow:
                    t = excess(r - p)
                else:
                    continue
                if t != s:
                    continue
                oy, iy = mutual_out(inst, y), mutual_in(inst, y)
                ty = _imb_shard(oy, iy, v, not outgoing, m, mode, y == 0)
                out.append((ty << n) | y)
            return tuple(out)

        def support():
            for v in inst.support():
                for s in range(1 << sb):
                    yield (s << n) | v

        S = Oracle(lambda w: side(w, True), n2, n2, m, name="S")
        P = Oracle(lambda w: side(w, False), n2, n2, m, name="P")
        ell = None if inst.ell is None else inst.ell
        out = Instance(Kind.IMBALANCE, n2, k, {"S": S, "P": P}, ell, support_fn=support)
        return out, _parents_pullback(inst, lambda w: w & mask)

    def cost(inst):
        a = max(inst.S.out_arity, inst.P.out_arity)
        return ((M or inst.k or 1) + 1) * (2 * a + 2)

    return Reduction(name, build, cost, {Kind.IMBALANCE}, Kind.IMBALANCE)


def cap_degree(k: int | None = None) -> Reduction:
    """Degree capping for Bipartite or Imbalance instances (modulus defaults to inst.k)."""

    def pick(inst):
        if inst.kind is Kind.BIPARTITE:
            return bipartite_shards(k or inst.k)
        return imbalance_shards(k)

    def build(inst):
        red = pick(inst)
        out, pb = red.build(inst)
        return out, pb

    def cost(inst):
        return pick(inst).cost_bound(inst)

    return Reduction("cap_degree", build, cost, {Kind.BIPARTITE, Kind.IMBALANCE})
