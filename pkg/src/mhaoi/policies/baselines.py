"""Comparison policies for single-hop (star) instances, plus trivial helpers."""

from __future__ import annotations

from ..network import NetworkInstance
from ..simulator import Observation, Policy


class NotSingleHopError(ValueError):
    pass


def single_hop_layout(instance: NetworkInstance) -> list:
    """``(action index, dest position, gamma)`` per non-idle single-transmission action.

    Raises unless every non-idle action is one transmission from a source
    straight to one of its destinations.
    """
    layout = []
    pos = {p: n for n, p in enumerate(instance.dest_pairs)}
    for m, (comp, action) in enumerate(zip(instance.compiled_actions, instance.action_space)):
        if m == 0 and not comp:
            continue
        if len(comp) != 1 or not instance.is_single_hop():
            raise NotSingleHopError(f"action {m} is not a single source-to-destination transmission")
        s, r, e, g = comp[0]
        layout.append((m, pos[r], g))
    return layout


def max_weight_decide(gammas, weights, ages) -> int:
    """Position maximising ``gamma_i w_i A_i (A_i + 2)``; lowest position on ties."""
    best, best_val = 0, None
    for i, (g, w, a) in enumerate(zip(gammas, weights, ages)):
        v = g * w * a * (a + 2)
        if best_val is None or v > best_val:
            best, best_val = i, v
    return best


def round_robin_decide(t: int, count: int) -> int:
    """1-based source served in slot ``t``."""
    return t % count + 1


class MaxWeightPolicy(Policy):
    name = "max_weight"

    def reset(self, instance, rng):
        super().reset(instance, rng)
        self._layout = single_hop_layout(instance)
        w = instance.dest_weights
        self._items = [(m, instance.dest_pairs[d], g * w[d]) for m, d, g in self._layout]

    def decide(self, obs: Observation) -> int:
        ages = obs.ages
        best, best_val = self._items[0][0], -1.0
        for m, p, gw in self._items:
            a = ages[p]
            v = gw * a * (a + 2)
            if v > best_val:
                best, best_val = m, v
        return best


class RoundRobinPolicy(Policy):
    name = "round_robin"

    def reset(self, instance, rng):
        super().reset(instance, rng)
        self._order = [m for m in range(instance.n_actions) if instance.compiled_actions[m]]

    def decide(self, obs: Observation) -> int:
        return self._order[round_robin_decide(obs.t, len(self._order)) - 1]


class FixedActionPolicy(Policy):
    """Always the same action."""

    name = "fixed_action"

    def __init__(self, action: int):
        self.action = action

    def decide(self, obs):
        return self.action


class TablePolicy(Policy):
    """Lookup of an action by the destination ages, clipped to ``[1, a_max]``."""

    name = "dp_optimal"

    def __init__(self, table, a_max: int):
        self.table = table
        self.a_max = a_max

    def reset(self, instance, rng):
        super().reset(instance, rng)
        self._dest = instance.dest_pairs
        self._strides = [self.a_max ** (len(self._dest) - 1 - n) for n in range(len(self._dest))]

    def decide(self, obs):
        idx = 0
        a_max = self.a_max
        for p, s in zip(self._dest, self._strides):
            a = obs.ages[p]
            a = 1 if a < 1 else (a_max if a > a_max else a)
            idx += (a - 1) * s
        return int(self.table[idx])
