import itertools

import numpy as np
import pytest

from mhaoi.ages import advance_ages
from mhaoi.policies.age_difference import (
    AgeDifferencePolicy,
    ad_decide,
    age_difference_weights,
    weighted_age_sum,
)
from mhaoi.network import NetworkInstance, build_action_space, unicast_flow, validate_topology
from mhaoi.simulator import Observation, SimulationConfig, run_simulation

from helpers import line_instance


def test_weight_examples():
    inst = line_instance([1.0, 1.0])
    ages = [0, 2, 5]
    assert age_difference_weights(inst, ages, [1, 1])[2] == [3]
    assert age_difference_weights(inst, [0, 6, 5], [1, 1])[2] == [0.0]
    assert age_difference_weights(inst, ages, [1, 0])[2] == [0]
    inst = line_instance([1.0, 0.5], weight=2.0)
    assert age_difference_weights(inst, ages)[2] == [2.0 * 0.5 * 3]
    # relay 2 is commissioned only and uses weight 1
    assert age_difference_weights(inst, ages)[1] == [1.0 * 1.0 * 2]


def test_decide_examples():
    assert ad_decide([[], [3], [1]]) == 1
    assert ad_decide([[], [0], [0]]) == 0
    assert ad_decide([[], [3], [2, 2]]) == 2


def _expected_next_cost(inst, ages, action, gammas, observed):
    """Brute-force E[C(t+1)] over all link outcomes of the action's edges."""
    comp = inst.compiled_actions[action]
    edges = sorted({e for _, _, e, _ in comp})
    total = 0.0
    for outcome in itertools.product([0, 1], repeat=len(edges)):
        links = [1] * len(gammas)
        p = 1.0
        for e, s in zip(edges, outcome):
            links[e] = s
            if observed is None:
                p *= gammas[e] if s else 1 - gammas[e]
            else:
                p *= 1.0 if s == observed[e] else 0.0
        if p:
            total += p * weighted_age_sum(inst, advance_ages(ages, comp, links, inst.source_pairs))
    return total


def test_myopic_identity_random_states():
    rng = np.random.default_rng(3)
    topo = validate_topology({"nodes": 6, "edges": [[1, 2, 0.9], [2, 3, 0.5], [3, 4, 0.8], [5, 2, 0.7], [3, 6, 0.6]]})
    flows = [unicast_flow([1, 2, 3, 4], weight=2.0), unicast_flow([5, 2, 3, 6], weight=0.5)]
    for interference in ("single_transmitter",
                         {"model": "explicit", "actions": [[[1, 2, 1], [3, 6, 5]], [[2, 3, 1]], [[5, 2, 5], [3, 4, 1]]]}):
        inst = NetworkInstance(topo, flows, build_action_space(topo, flows, interference))
        gammas = inst.topology.gammas.tolist()
        for _ in range(300):
            ages = [int(a) for a in rng.integers(0, 20, inst.n_pairs)]
            for p in inst.source_pairs:
                ages[p] = 0
            observed = None if rng.random() < 0.5 else (rng.random(len(gammas)) < 0.5).astype(int).tolist()
            choice = ad_decide(age_difference_weights(inst, ages, observed))
            costs = [_expected_next_cost(inst, ages, m, gammas, observed) for m in range(inst.n_actions)]
            assert costs[choice] == pytest.approx(min(costs), abs=1e-9)
            base = weighted_age_sum(inst, ages)
            w_sum = sum(inst.flow_by_id[k].weight(j) for k, j in inst.pairs if k != j)
            delta = sum(age_difference_weights(inst, ages, observed)[choice])
            assert costs[choice] == pytest.approx(base + w_sum - delta)


def test_policy_matches_functional_form():
    inst = line_instance([0.7, 0.9, 0.6])
    pol = AgeDifferencePolicy()
    pol.reset(inst, np.random.default_rng(0))
    rng = np.random.default_rng(1)
    for _ in range(200):
        ages = [0] + [int(a) for a in rng.integers(1, 30, 3)]
        assert pol.decide(Observation(0, ages)) == ad_decide(age_difference_weights(inst, ages))


def test_line_pipeline_is_linear_in_n():
    ages = []
    for n in (3, 5, 7):
        res = run_simulation(line_instance([1.0] * (n - 1)), AgeDifferencePolicy(), SimulationConfig(20_000))
        ages.append(res.summary.avg_age[0])
    slope = np.polyfit([3, 5, 7], ages, 1)[0]
    assert slope <= 2.0
