import pytest

from fixtures import t1, t1_rows, g1, i1
from modklab.core import BadDegreeVertex, BrokenOrbit, Kind, ShortOrbit, imbalance
from modklab.errors import (InvalidParameters, InvalidTrivialDegree, MalformedCandidate,
                            NoTrivialVertex)
from modklab.harness import gen_random
from modklab.problems import (AnyOfInstance, amper_combine, candidate_space,
                              candidate_space_size, make_bipartite, make_mod, otimes_combine,
                              trivial_degree, trivial_solution, verify)


def test_make_bipartite_trivial_degree_contract():
    assert trivial_degree(t1()) == 1
    with pytest.raises(InvalidTrivialDegree):
        make_bipartite(2, 3, t1_rows(), 2)
    with pytest.raises(InvalidTrivialDegree):
        make_bipartite(2, 3, [[] for _ in range(8)])


def test_group_and_imbalance_fixtures():
    assert trivial_degree(g1()) == 2
    assert imbalance(i1(), 0) == 1
    make_mod(2, 4, [0, 1, 2, 3])


def test_make_hyper_rejects_oversize_edges():
    from modklab.problems import make_hyper
    with pytest.raises(InvalidParameters):
        make_hyper(2, 2, [[(0, 1, 2)], [(0, 1, 2)], [(0, 1, 2)], []])
    assert make_hyper(2, 2, [[(0, 1)], [(0, 1)], [], []]).k == 2


def test_trivial_solution():
    assert trivial_solution(t1()).value == 0
    assert trivial_solution(t1()).width == 3
    assert trivial_solution(i1()).width == 2
    with pytest.raises(NoTrivialVertex):
        trivial_solution(g1())


def test_candidate_space_size_and_order():
    inst = t1()
    cands = list(candidate_space(inst))
    assert len(cands) == candidate_space_size(inst) == 8 + 64
    assert cands[:2] == [BadDegreeVertex(0), BadDegreeVertex(1)]
    orbit = list(candidate_space(g1()))
    assert orbit[:2] == [ShortOrbit(0, 1), BrokenOrbit(0)]
    assert len(orbit) == candidate_space_size(g1())


def test_combinators():
    a, b = t1(), g1()
    amp = amper_combine(a, b, 1)
    assert verify(amp, BrokenOrbit(2))
    assert not verify(amper_combine(a, b, 0), BadDegreeVertex(0))
    with pytest.raises(InvalidParameters):
        amper_combine(a, b, 2)
    ot = otimes_combine([a, b])
    assert verify(ot, [BadDegreeVertex(1), BrokenOrbit(2)])
    assert not verify(ot, [BadDegreeVertex(0), BrokenOrbit(2)])
    with pytest.raises(MalformedCandidate):
        verify(ot, [BadDegreeVertex(1)])
    anyof = AnyOfInstance([a, b])
    assert verify(anyof, (1, BrokenOrbit(2)))
    assert not verify(anyof, (0, BrokenOrbit(2)) if False else (2, BrokenOrbit(2)))


@pytest.mark.parametrize("kind", ["bipartite", "hyper", "imbalance", "group", "mod", "leaf"])
def test_generated_instances_are_deterministic(kind):
    for seed in range(5):
        x = gen_random(kind, 3, 3, seed=seed)
        y = gen_random(kind, 3, 3, seed=seed)
        assert x.describe() == y.describe()
        for name in x.oracles:
            o, p = x.oracles[name], y.oracles[name]
            assert [o(v) for v in range(1 << o.in_width)] == [p(v) for v in range(1 << p.in_width)]


def test_generated_group_ground_size():
    for seed in range(10):
        g = gen_random(Kind.GROUP, 3, 3, ell=1, seed=seed)
        assert (8 - g.m) % 3 == 1
