import pytest
from hypothesis import given, settings, strategies as st

from modklab.core import Kind, imbalance
from modklab.errors import NotPrime, PlanError
from modklab.harness import all_solutions, brute_force_solve, check_reduction, gen_random
from modklab.turing import (AskQuery, FinalAnswer, QueryPlan, flatten, is_pm1, normalize_pm1,
                            run_plan_sequential, single_query_plan, two_query_plan)

PROPERTY_SETTINGS = settings(max_examples=20, deadline=None)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_normalize_pm1_form(p):
    red = normalize_pm1()
    for n in (2, 3):
        for seed in range(8):
            inst = gen_random("imbalance", n, p, seed=seed)
            out, _ = red.build(inst)
            assert is_pm1(out)
            assert imbalance(out, 0) == 1
            rep = check_reduction(red, inst)
            assert rep.failures == [] and rep.oracle_calls <= rep.cost_bound


def test_normalize_pm1_needs_prime():
    with pytest.raises(NotPrime):
        normalize_pm1().build(gen_random("imbalance", 2, 4, seed=0))


def three_inputs(p, n, seed):
    return tuple(gen_random(Kind.IMBALANCE, n, p, seed=seed + j) for j in range(3))


def test_two_query_plan_sequential():
    plan = two_query_plan(3)
    inp = three_inputs(3, 2, 0)
    value = run_plan_sequential(plan, inp, brute_force_solve)
    assert plan.answer_check(inp, value)


def test_flatten_extracts_valid_answers():
    plan = two_query_plan(3)
    inp = three_inputs(3, 2, 10)
    flat, extract = flatten(plan, inp)
    assert flat.kind is Kind.IMBALANCE and flat.k == 3
    sols = all_solutions(flat)
    assert sols
    values = [extract(s) for s in sols]
    assert all(plan.answer_check(inp, v) for v in values)
    seq = run_plan_sequential(plan, inp, brute_force_solve)
    assert seq[0] in {v[0] for v in values}


def test_single_query_plan_flattens_to_normal_form():
    plan = single_query_plan(3)
    inst = gen_random("imbalance", 2, 3, seed=4)
    flat, extract = flatten(plan, inst)
    assert all(plan.answer_check(inst, extract(s)) for s in all_solutions(flat))


def test_plan_errors():
    inst = gen_random("imbalance", 2, 3, seed=0)
    greedy = QueryPlan(1, lambda i: AskQuery(i, 0),
                       lambda st, sol: AskQuery(inst, st + 1) if st < 3 else FinalAnswer(sol),
                       lambda i, v: True, 3)
    with pytest.raises(PlanError):
        run_plan_sequential(greedy, inst, brute_force_solve)
    lazy = QueryPlan(1, lambda i: FinalAnswer(None), lambda st, sol: FinalAnswer(None),
                     lambda i, v: True, 3)
    with pytest.raises(PlanError):
        flatten(lazy, inst)


@PROPERTY_SETTINGS
@given(st.integers(0, 10**5), st.sampled_from([1, 2]))
def test_flatten_random_plans(seed, n):
    plan = two_query_plan(3)
    inp = three_inputs(3, n, seed)
    flat, extract = flatten(plan, inp)
    sols = all_solutions(flat)
    assert sols and all(plan.answer_check(inp, extract(s)) for s in sols)
    assert plan.answer_check(inp, run_plan_sequential(plan, inp, brute_force_solve))
