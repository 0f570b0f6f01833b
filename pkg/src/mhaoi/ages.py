"""Age state, the per-slot age update and time-average metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .network import NetworkInstance


@dataclass
class AgeState:
    """Ages ``A_j^k`` for every tracked pair of ``instance`` plus the slot count."""

    ages: list
    t: int = 0

    @classmethod
    def initial(cls, instance: NetworkInstance) -> "AgeState":
        return cls([0] * instance.n_pairs, 0)

    def get(self, instance: NetworkInstance, k: int, j: int) -> int:
        return self.ages[instance.pair_index[(k, j)]]


def advance_ages(ages: Sequence[int], transmissions, link_states, source_pairs) -> list:
    """One slot of the age law on flat lists; the hot path of the simulator.

    ``transmissions`` are compiled ``(sender_pair, receiver_pair, edge, gamma)``
    tuples. A receiver takes the minimum over itself and all successful senders.
    """
    new = [a + 1 for a in ages]
    for s, r, e, _ in transmissions:
        if link_states[e]:
            cand = ages[s] + 1
            if cand < new[r]:
                new[r] = cand
    for p in source_pairs:
        new[p] = 0
    return new


def evolve_ages(instance: NetworkInstance, state: AgeState, action: int, link_states) -> AgeState:
    """Apply action index ``action`` under realised ``link_states`` (one per edge)."""
    if not 0 <= action < instance.n_actions:
        raise IndexError(f"action index {action} outside 0..{instance.n_actions - 1}")
    if len(link_states) != len(instance.topology.edges):
        raise ValueError("link_states must hold one entry per edge")
    new = advance_ages(state.ages, instance.compiled_actions[action], link_states,
                       instance.source_pairs)
    return AgeState(new, state.t + 1)


def evaluate_cost(instance: NetworkInstance, state: AgeState) -> np.ndarray:
    """Effective costs ``B_j^k = g_j^k(A_j^k)`` for the destination pairs."""
    ages = state.ages
    return np.array([g(ages[p]) for g, p in zip(instance.dest_costs, instance.dest_pairs)])


@dataclass
class AgeSummary:
    pairs: list
    avg_age: np.ndarray
    avg_cost: np.ndarray
    weights: np.ndarray
    slots: int

    @property
    def weighted_age(self) -> float:
        """Weighted-sum average age at the destinations."""
        return float(np.dot(self.weights, self.avg_age))

    @property
    def total_cost(self) -> float:
        """Sum of average effective costs at the destinations."""
        return float(np.sum(self.avg_cost))


@dataclass
class MetricsAccumulator:
    """Running per-destination sums of age and cost over slots after burn-in."""

    instance: NetworkInstance
    horizon: int
    burn_in: int = 0
    _age: list = field(init=False)
    _cost: list = field(init=False)
    _count: int = field(init=False, default=0)
    _seen: int = field(init=False, default=0)

    def __post_init__(self):
        if self.horizon <= self.burn_in:
            raise ValueError("horizon must exceed burn-in")
        n = len(self.instance.dest_pairs)
        self._age = [0] * n
        self._cost = [0.0] * n

    def add(self, ages: Sequence[int]) -> None:
        self._seen += 1
        if self._seen <= self.burn_in:
            return
        self._count += 1
        sa, sc = self._age, self._cost
        for idx, (p, g) in enumerate(zip(self.instance.dest_pairs, self.instance.dest_costs)):
            a = ages[p]
            sa[idx] += a
            sc[idx] += g(a)

    def finalize(self) -> AgeSummary:
        if self._count == 0:
            raise ValueError("no slots recorded after burn-in")
        n = self._count
        return AgeSummary(
            pairs=list(self.instance.dest_keys),
            avg_age=np.array(self._age, dtype=float) / n,
            avg_cost=np.array(self._cost, dtype=float) / n,
            weights=self.instance.dest_weights.copy(),
            slots=n,
        )


def accumulate_and_finalize(instance: NetworkInstance, states: Iterable, burn_in: int = 0,
                            horizon: int | None = None) -> AgeSummary:
    """Average a sequence of age vectors (or :class:`AgeState`) after ``burn_in``."""
    states = list(states)
    horizon = len(states) if horizon is None else horizon
    acc = MetricsAccumulator(instance, horizon, burn_in)
    for s in states:
        acc.add(s.ages if isinstance(s, AgeState) else s)
    return acc.finalize()
