import numpy as np
import pytest

from mhaoi.costs import mixed_cost_functions
from mhaoi.oracles import (
    BudgetError,
    grid_search_sr_oracle,
    relative_value_iteration,
    simplex_grid,
    value_iteration_oracle,
)
from mhaoi.policies import AgeDebtPolicy, MaxWeightPolicy, RoundRobinPolicy
from mhaoi.policies.stationary import SingleHopProblem, optimize_distribution, reduce_to_single_hop
from mhaoi.simulator import SimulationConfig, run_replications

from helpers import line_instance, star_instance


@pytest.fixture(scope="module")
def functions_star():
    return star_instance([1.0] * 4, costs=mixed_cost_functions())


def test_single_pair_always_transmits():
    res = value_iteration_oracle(line_instance([1.0]), a_max=10, simulate_slots=1000)
    assert res.optimal_cost == pytest.approx(1.0, abs=1e-6)
    assert set(res.policy.table.tolist()) == {1}


def test_two_reliable_sources_alternate():
    res = value_iteration_oracle(star_instance([1.0, 1.0]), a_max=12, simulate_slots=10_000)
    assert res.optimal_cost == pytest.approx(3.0, abs=1e-5)
    assert res.simulated_cost == pytest.approx(3.0, abs=1e-3)


def test_two_state_chain_by_hand():
    # two states, cost (0, 1); action 0 stays, action 1 swaps: optimal gain 0
    stage = np.array([0.0, 1.0])
    stay, swap = np.array([0, 1]), np.array([1, 0])
    gain, _, greedy, _, ok = relative_value_iteration(stage, [[(1.0, stay)], [(1.0, swap)]])
    assert ok and gain == pytest.approx(0.0, abs=1e-9)
    assert greedy.tolist() == [0, 1]


def test_unreliable_pair_matches_geometric_age():
    # one link, gamma = 0.5, always transmit: mean age 1/gamma = 2
    res = value_iteration_oracle(line_instance([0.5]), a_max=60, simulate_slots=10_000)
    assert res.optimal_cost == pytest.approx(2.0, rel=1e-4)


def test_budget_is_enforced(functions_star):
    with pytest.raises(BudgetError):
        value_iteration_oracle(functions_star, a_max=30, budget=10**5)


def test_truncation_sensitivity(functions_star):
    small = value_iteration_oracle(functions_star, a_max=20, simulate_slots=1000)
    large = value_iteration_oracle(functions_star, a_max=40, simulate_slots=1000)
    assert abs(large.optimal_cost - small.optimal_cost) / large.optimal_cost < 0.005


def test_dp_policy_beats_heuristics(functions_star):
    res = value_iteration_oracle(functions_star, a_max=30, simulate_slots=10_000)
    cfg = SimulationConfig(50_000, replications=3, seed=4)
    dp = run_replications(functions_star, res.policy, cfg)
    targets = res.pair_costs * 1.01
    for factory in (MaxWeightPolicy, RoundRobinPolicy, lambda: AgeDebtPolicy(alpha=targets)):
        other = run_replications(functions_star, factory, cfg)
        assert dp.cost_ci[0] <= other.cost_ci[1]


def test_simplex_grid_sizes():
    assert simplex_grid(1, 10).tolist() == [[1.0]]
    assert len(simplex_grid(2, 10)) == 11
    assert len(simplex_grid(3, 10)) == 66
    assert np.allclose(simplex_grid(4, 6).sum(axis=1), 1.0)


def test_grid_oracle_examples():
    prob = reduce_to_single_hop(*_parts(star_instance([1.0, 1.0])))
    x, val = grid_search_sr_oracle(prob)
    assert x.tolist() == pytest.approx([0.0, 0.5, 0.5])
    assert val == pytest.approx(4.0)
    prob = reduce_to_single_hop(*_parts(star_instance([1.0, 1.0], weights=[4.0, 1.0])))
    x, val = grid_search_sr_oracle(prob)
    assert prob.frequencies(x).tolist() == pytest.approx([0.667, 0.333])
    assert val == pytest.approx(9.0, abs=1e-3)
    one = SingleHopProblem(np.ones(1), np.ones(1), np.ones((1, 1)), ["a"])
    assert grid_search_sr_oracle(one)[0].tolist() == [1.0]


def test_grid_oracle_dimension_limit():
    prob = reduce_to_single_hop(*_parts(star_instance([1.0] * 4)))
    with pytest.raises(ValueError, match="free probabilities"):
        grid_search_sr_oracle(prob)


def test_grid_oracle_three_free_coarse():
    prob = reduce_to_single_hop(*_parts(star_instance([0.6, 0.9, 0.8], weights=[1, 2, 3])))
    x, val = grid_search_sr_oracle(prob, resolution=0.01)
    assert optimize_distribution(prob).objective <= val + 1e-9


def _parts(inst):
    return inst.topology, inst.flows, inst.action_space
