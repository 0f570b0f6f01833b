"""Age-difference scheduling.

Each (link, flow) carries the weight ``w_j^k * S_ij * [A_j^k - A_i^k]^+``, with
the realised channel ``S_ij`` replaced by ``gamma_ij`` when channel states are
not observed. The policy activates the action with the largest total weight.
Destinations use their flow weight; commissioned-only relays use 1.
"""

from __future__ import annotations

import numpy as np

from ..network import NetworkInstance
from ..simulator import Observation, Policy


def _receiver_weights(instance: NetworkInstance) -> dict:
    out = {}
    for k, node in instance.pairs:
        out[instance.pair_index[(k, node)]] = instance.flow_by_id[k].weight(node)
    return out


def age_difference_weights(instance: NetworkInstance, ages, link_states=None) -> list:
    """Per action, the list of its transmissions' weights.

    ``link_states`` (one entry per edge) are used when given; otherwise each
    link's reliability stands in for its state.
    """
    wt = _receiver_weights(instance)
    out = []
    for comp in instance.compiled_actions:
        row = []
        for s, r, e, g in comp:
            diff = ages[r] - ages[s]
            chan = g if link_states is None else link_states[e]
            row.append(wt[r] * chan * diff if diff > 0 else 0.0)
        out.append(row)
    return out


def ad_decide(weights) -> int:
    """Index of the action with the largest summed weight; lowest index on ties."""
    best, best_val = 0, None
    for m, row in enumerate(weights):
        v = sum(row)
        if best_val is None or v > best_val:
            best, best_val = m, v
    return best


def weighted_age_sum(instance: NetworkInstance, ages) -> float:
    """Sum of ``w_j^k A_j^k`` over commissioned and destination nodes of all flows."""
    wt = _receiver_weights(instance)
    return float(sum(wt[p] * ages[p] for p in wt if p not in set(instance.source_pairs)))


class AgeDifferencePolicy(Policy):
    name = "age_difference"

    def reset(self, instance, rng):
        super().reset(instance, rng)
        wt = _receiver_weights(instance)
        self._actions = [
            [(s, r, e, g, wt[r]) for s, r, e, g in comp] for comp in instance.compiled_actions
        ]

    def decide(self, obs: Observation) -> int:
        ages = obs.ages
        links = obs.link_states
        best, best_val = 0, 0.0
        for m, comp in enumerate(self._actions):
            v = 0.0
            for s, r, e, g, w in comp:
                diff = ages[r] - ages[s]
                if diff > 0:
                    v += w * diff * (g if links is None else links[e])
            if v > best_val:
                best, best_val = m, v
        return best
