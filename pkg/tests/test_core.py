import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fixtures import R, t1, t1_rows, g1, i1, m1
from modklab.core import (BadDegreeVertex, BrokenOrbit, InconsistentEdge, Kind, ShortOrbit,
                          cap_degree, compose, mutual_neighbors, degree, identity, neighbors, normalize_edges,
                          verify_solution)
from modklab.errors import KindMismatch, MalformedCandidate, TrivialDegenerate, NonBipartiteOutput
from modklab.harness import all_solutions, brute_force_solve, check_reduction, gen_random
from modklab.problems import make_bipartite

PROPERTY_SETTINGS = settings(max_examples=60, deadline=None)


def test_t1_verify_examples():
    inst = t1()
    assert verify_solution(inst, BadDegreeVertex(1))
    assert not verify_solution(inst, BadDegreeVertex(0))
    assert degree(inst, R) == 3
    assert degree(inst, R + 3) == 0
    assert degree(inst, 0) == 1


def test_g1_broken_orbit():
    inst = g1()
    assert verify_solution(inst, BrokenOrbit(2))
    assert brute_force_solve(inst) == BrokenOrbit(2)


def test_i1_and_m1_brute_force():
    assert all_solutions(i1()) == [BadDegreeVertex(1)]
    assert brute_force_solve(m1()) == ShortOrbit(0, 1)


def test_wrong_width_is_malformed():
    with pytest.raises(MalformedCandidate):
        verify_solution(t1(), BadDegreeVertex(1 << 3))
    with pytest.raises(MalformedCandidate):
        verify_solution(t1(), ShortOrbit(0, 1))


def test_neighbors_drop_self_duplicates_and_same_side():
    rows = t1_rows()
    rows[1] = [R, R, R]
    inst = make_bipartite(2, 3, rows, 1)
    assert neighbors(inst, 1) == [R]
    rows[1] = [R, 2]
    with pytest.raises(NonBipartiteOutput):
        make_bipartite(2, 3, rows, 1)


def test_normalize_edges_identity_on_consistent():
    inst = t1()
    out, _ = normalize_edges().build(inst)
    for v in range(8):
        assert neighbors(out, v) == neighbors(inst, v)


def test_normalize_edges_drops_one_sided_edge():
    rows = t1_rows()
    rows[R] = [0, 1]
    inst = make_bipartite(2, 3, rows, 1)
    red = normalize_edges()
    out, pb = red.build(inst)
    assert degree(out, 2) == 0
    assert not any(isinstance(s, InconsistentEdge) for s in all_solutions(out))
    assert InconsistentEdge(2, R) in all_solutions(inst)
    assert all(verify_solution(inst, pb(s)) for s in all_solutions(out))
    assert check_reduction(red, inst).failures == []


def test_normalize_edges_rejects_trivial_drift():
    rows = t1_rows()
    rows[R] = [1, 2]
    with pytest.raises(TrivialDegenerate):
        normalize_edges().build(make_bipartite(2, 3, rows, 1))


def test_cap_degree_splits_high_degree():
    rows = [[] for _ in range(16)]
    rows[0] = [8]
    rows[8] = [0, 1, 2, 3]
    for v in (1, 2, 3):
        rows[v] = [8]
    inst = make_bipartite(3, 3, rows, 1, )
    red = cap_degree(3)
    out, pb = red.build(inst)
    rep = check_reduction(red, inst)
    assert rep.failures == [] and rep.solutions_checked > 0
    assert BadDegreeVertex(8) in {pb(s) for s in all_solutions(out)}


def test_compose_identity_and_kind_mismatch():
    inst = t1()
    out, _ = compose(identity(), identity()).build(inst)
    assert all(neighbors(out, v) == neighbors(inst, v) for v in range(8))
    from modklab.cycle import bip_to_hyper
    with pytest.raises(KindMismatch):
        compose(bip_to_hyper(), normalize_edges())
    rep = check_reduction(compose(normalize_edges(), cap_degree(3)), inst)
    assert rep.failures == []


@pytest.mark.parametrize("kind,n,ks", [
    ("bipartite", 2, (2, 3, 4, 6)), ("bipartite", 3, (3,)),
    ("hyper", 3, (2, 3)), ("imbalance", 4, (2, 3, 5)),
    ("group", 4, (2, 3, 4, 6)), ("mod", 4, (2, 3, 4, 6)),
])
def test_verifier_matches_raw_table_oracle(kind, n, ks):
    for k in ks:
        for seed in range(12):
            inst = gen_random(kind, n, k, seed=seed)
            assert set(all_solutions(inst)) == oracles.solutions(inst), (kind, k, seed)


@PROPERTY_SETTINGS
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4]))
def test_oracles_are_deterministic(seed, k):
    inst = gen_random(Kind.IMBALANCE, 3, k, seed=seed)
    for name, o in inst.oracles.items():
        assert [o(x) for x in range(8)] == [o(x) for x in range(8)]


@PROPERTY_SETTINGS
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4, 6]))
def test_normalize_edges_leaves_no_inconsistency(seed, k):
    inst = gen_random(Kind.BIPARTITE, 2, k, seed=seed)
    try:
        out, _ = normalize_edges().build(inst)
    except TrivialDegenerate:
        return
    assert not any(isinstance(s, InconsistentEdge) for s in all_solutions(out))
    assert check_reduction(normalize_edges(), inst).failures == []


@PROPERTY_SETTINGS
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_cap_degree_shards_sum_to_parent(seed, k):
    inst = gen_random(Kind.BIPARTITE, 3, 2 * k, ell=1, seed=seed)
    red = cap_degree(k)
    out, _ = red.build(inst)
    parent = {}
    for w in out.support():
        v = ((w >> out.n) << inst.n) | (w & ((1 << inst.n) - 1))
        parent[v] = parent.get(v, 0) + degree(out, w)
    for v in range(1 << inst.width):
        assert parent.get(v, 0) == len(mutual_neighbors(inst, v))
    assert all(degree(out, v) <= k for v in out.support())
    assert check_reduction(red, inst).failures == []
