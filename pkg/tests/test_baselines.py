import numpy as np
import pytest

from mhaoi.policies import MaxWeightPolicy, RoundRobinPolicy, TablePolicy
from mhaoi.policies.baselines import (
    NotSingleHopError,
    max_weight_decide,
    round_robin_decide,
    single_hop_layout,
)
from mhaoi.simulator import Observation, SimulationConfig, run_simulation

from helpers import three_node_line, star_instance


def test_max_weight_examples():
    assert max_weight_decide([1, 1], [1, 1], [3, 2]) == 0
    assert max_weight_decide([1, 1], [1, 1], [2, 2]) == 0
    assert max_weight_decide([0.5, 1], [1, 1], [3, 2]) == 1


def test_round_robin_examples():
    assert round_robin_decide(0, 3) == 1
    assert round_robin_decide(4, 3) == 2


def test_round_robin_two_reliable_sources():
    res = run_simulation(star_instance([1.0, 1.0]), RoundRobinPolicy(), SimulationConfig(1000))
    assert res.total_cost == pytest.approx(3.0)
    assert res.summary.avg_age.tolist() == [1.5, 1.5]


def test_max_weight_policy_matches_function():
    inst = star_instance([0.6, 0.9, 0.75], weights=[0.5, 1.0, 2.0])
    pol = MaxWeightPolicy()
    pol.reset(inst, np.random.default_rng(0))
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = rng.integers(0, 10, 3)
        ages = [0, int(a[0]), 0, int(a[1]), 0, int(a[2])]
        assert pol.decide(Observation(0, ages)) == 1 + max_weight_decide([0.6, 0.9, 0.75], [0.5, 1.0, 2.0], a)


def test_layout_rejects_multi_hop():
    assert [m for m, _, _ in single_hop_layout(star_instance([1.0, 1.0]))] == [1, 2]
    with pytest.raises(NotSingleHopError):
        single_hop_layout(three_node_line())


def test_table_policy_indexing():
    inst = star_instance([1.0, 1.0])
    table = np.arange(9) % 3
    pol = TablePolicy(table, a_max=3)
    pol.reset(inst, None)
    # ages (2, 3) -> index (2-1)*3 + (3-1) = 5; ages clipped to [1, 3]
    assert pol.decide(Observation(0, [0, 2, 0, 3])) == 5 % 3
    assert pol.decide(Observation(0, [0, 0, 0, 9])) == 2 % 3
