import numpy as np
import pytest
from hypothesis import given, settings

from transport_simplex import (
    INIT_RULES,
    Problem,
    StructuralError,
    TransportPlan,
    build_initial_plan,
    objective,
    plan_residual,
    potential_estimates,
    repair_degeneracy,
)

from conftest import integer_problem, is_spanning_tree, problems


def cells(plan):
    return {(i, j): x for i, j, x in plan.entries}


def test_northwest_trace():
    p = Problem([3, 2], [2, 3], [[1, 2], [4, 3]])
    assert cells(build_initial_plan(p, "northwest")) == {(0, 0): 2, (0, 1): 1, (1, 1): 2}


def test_leastcost_trace(two_by_two):
    plan = build_initial_plan(two_by_two, "leastcost")
    assert cells(plan) == {(0, 0): 2, (0, 1): 1, (1, 1): 2}
    assert objective(two_by_two, plan) == 10


@pytest.mark.parametrize("rule", INIT_RULES)
def test_single_origin_forces_plan(rule):
    p = Problem([10], [2, 3, 5], [[4, 1, 7]])
    assert cells(build_initial_plan(p, rule)) == {(0, 0): 2, (0, 1): 3, (0, 2): 5}


@pytest.mark.parametrize("rule", INIT_RULES)
def test_single_destination_forces_plan(rule):
    p = Problem([2, 3, 5], [10], [[4], [1], [7]])
    assert cells(build_initial_plan(p, rule)) == {(0, 0): 2, (1, 0): 3, (2, 0): 5}


def test_modified_russell_estimates():
    p = Problem([3, 2], [2, 3], [[1, 2], [4, 3]])
    est = potential_estimates(p, "russell")
    np.testing.assert_array_equal(est.w, [2, 4])
    np.testing.assert_array_equal(est.y, [4, 3])
    np.testing.assert_array_equal(est.reduced, [[-5, -3], [-4, -4]])


def test_modified_russell_order_with_tie():
    # D order: (0,0) -5, then the (1,0)/(1,1) tie at -4 broken by column, then (0,1)
    p = Problem([3, 2], [2, 3], [[1, 2], [4, 3]])
    assert cells(build_initial_plan(p, "modrussell")) == {(0, 0): 2, (1, 1): 2, (0, 1): 1}


def test_habr_estimates():
    p = Problem([3, 2], [2, 3], [[1, 2], [4, 3]])
    est = potential_estimates(p, "habr")
    np.testing.assert_allclose(est.reduced, p.cost - est.mr[:, None] - est.mc[None, :])
    with pytest.raises(ValueError):
        potential_estimates(p, "nope")


def test_row_minimum_exhausts_rows_in_order():
    p = Problem([4, 4], [3, 5], [[2, 1], [1, 2]])
    # row 0 takes its cheapest column 1 fully (4), then row 1: column 0 (3), column 1 (1)
    assert cells(build_initial_plan(p, "rowmin")) == {(0, 1): 4, (1, 0): 3, (1, 1): 1}


def test_column_rule_is_transposed_row_rule():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = integer_problem(rng, 4, 5)
        t = Problem(p.demand, p.supply, p.cost.T)
        for row, col in (("rowmin", "colmin"), ("modrowmin", "modcolmin")):
            a = {(j, i): x for (i, j), x in cells(build_initial_plan(p, col, repair=False)).items()}
            assert a == cells(build_initial_plan(t, row, repair=False))


def test_houthakker_takes_mutual_minima():
    p = Problem([1, 1], [1, 1], [[1, 5], [5, 1]])
    assert cells(build_initial_plan(p, "houthakker", repair=False)) == {(0, 0): 1, (1, 1): 1}


def test_vogel_picks_largest_penalty():
    # row penalties 1, 10; column penalties 9, 2 -> row 1, cheapest cell (1,1)
    p = Problem([5, 5], [5, 5], [[1, 2], [10, 0]])
    plan = build_initial_plan(p, "vogel")
    assert cells(plan)[(1, 1)] == 5


def test_repair_example():
    p = Problem([2, 2], [2, 2], [[1, 1], [1, 1]])
    plan = build_initial_plan(p, "northwest", repair=False)
    assert cells(plan) == {(0, 0): 2, (1, 1): 2}
    repair_degeneracy(plan, p)
    assert cells(plan) == {(0, 0): 2, (1, 1): 2, (0, 1): 0}


def test_repair_noop_on_full_basis():
    plan = TransportPlan.from_entries(1, 3, [(0, 0, 1), (0, 1, 2), (0, 2, 3)])
    before = plan.entries
    assert repair_degeneracy(plan).entries == before


def test_repair_rejects_cycles_and_overfull():
    plan = TransportPlan.from_entries(2, 2, [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)], capacity=4)
    with pytest.raises(StructuralError):
        repair_degeneracy(plan)
    plan = TransportPlan.from_entries(3, 3, [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)])
    with pytest.raises(StructuralError, match="cycle"):
        repair_degeneracy(plan)


def test_invalid_problem_rejected():
    with pytest.raises(ValueError):
        build_initial_plan(Problem([5], [4], [[1]]), "leastcost")
    with pytest.raises(ValueError):
        build_initial_plan(Problem([5], [5], [[1]]), "nosuchrule")


@settings(max_examples=40, deadline=None)
@given(problems())
def test_every_rule_gives_basic_feasible_plan(p):
    tol = 1e-9 * max(p.total_mass, 1)
    for rule in INIT_RULES:
        plan = build_initial_plan(p, rule)
        assert is_spanning_tree(plan), rule
        assert plan_residual(p, plan) <= tol, rule
        assert min(x for _, _, x in plan.entries) >= 0, rule


@pytest.mark.parametrize("rule", INIT_RULES)
def test_rules_are_deterministic(rule):
    p = integer_problem(np.random.default_rng(11), 7, 9)
    assert build_initial_plan(p, rule).entries == build_initial_plan(p, rule).entries


def test_ties_use_row_then_column_order():
    p = Problem([1, 1], [1, 1], np.zeros((2, 2)))
    assert cells(build_initial_plan(p, "leastcost", repair=False)) == {(0, 0): 1, (1, 1): 1}
