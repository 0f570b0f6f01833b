"""Slotted simulation loop and seeded replications.

Per slot: observe -> decide -> apply link states -> evolve ages -> policy
end-of-slot hook -> user hooks -> accumulate metrics. Link states for a slot
are drawn from a dedicated channel stream in blocks; policies only see them
when ``observable_channels`` is set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .ages import AgeSummary, MetricsAccumulator, advance_ages
from .network import NetworkInstance, sample_link_states

_MASK64 = (1 << 64) - 1
_BLOCK = 4096


def splitmix64(x: int) -> int:
    """The SplitMix64 finaliser (Steele, Lea & Flood) on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def replication_seed(base_seed: int, replication: int) -> int:
    """Seed of replication ``r``: ``splitmix64(splitmix64(base) ^ r)``."""
    return splitmix64(splitmix64(base_seed & _MASK64) ^ (replication & _MASK64))


def rng_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (channel, policy) generators derived from one seed."""
    ch, pol = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(ch), np.random.default_rng(pol)


class InvalidActionError(RuntimeError):
    pass


@dataclass
class Observation:
    t: int
    ages: list
    link_states: list | None = None


class Policy:
    """Scheduling policy interface.

    ``decide`` returns an index into the instance's action space. Subclasses
    that keep state across slots (debt queues, targets) update it in
    ``end_of_slot``.
    """

    name = "policy"

    def reset(self, instance: NetworkInstance, rng: np.random.Generator) -> None:
        self.instance = instance
        self.rng = rng

    def decide(self, obs: Observation) -> int:
        raise NotImplementedError

    def end_of_slot(self, obs: Observation, action: int, new_ages: list, link_states) -> None:
        pass

    def diagnostics(self) -> dict:
        return {}

    def debts(self) -> list | None:
        """Destination debt queues, for policies that keep them."""
        return None


@dataclass(frozen=True)
class SimulationConfig:
    horizon: int = 100_000
    burn_in: int | None = None
    replications: int = 1
    seed: int = 0
    observable_channels: bool = False
    record_trajectory: bool = False

    def __post_init__(self):
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.horizon // 10)
        if not self.horizon > self.burn_in >= 0:
            raise ValueError("need horizon > burn_in >= 0")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")


@dataclass
class SimulationResult:
    summary: AgeSummary
    seed: int
    diagnostics: dict = field(default_factory=dict)
    trajectory: list | None = None
    wall_clock: float = 0.0

    @property
    def total_cost(self) -> float:
        return self.summary.total_cost

    @property
    def weighted_age(self) -> float:
        return self.summary.weighted_age


SlotHook = Callable[[int, list, int, Sequence, list], None]


def run_simulation(instance: NetworkInstance, policy: Policy, config: SimulationConfig | None = None,
                   seed: int | None = None, hooks: Sequence[SlotHook] = ()) -> SimulationResult:
    """Simulate ``policy`` for ``config.horizon`` slots; bit-reproducible per seed.

    ``hooks`` are called as ``hook(t, ages_before, action, link_states, ages_after)``.
    Trajectory rows (when recorded) are ``(slot, k, j, age, cost, debt)``.
    """
    config = config or SimulationConfig()
    seed = config.seed if seed is None else seed
    chan_rng, pol_rng = rng_streams(seed)
    policy.reset(instance, pol_rng)
    start = time.perf_counter()

    acc = MetricsAccumulator(instance, config.horizon, config.burn_in)
    topo = instance.topology
    actions = instance.compiled_actions
    n_actions = len(actions)
    sources = instance.source_pairs
    observable = config.observable_channels
    trajectory = [] if config.record_trajectory else None
    ages = [0] * instance.n_pairs
    block: list = []

    for t in range(config.horizon):
        pos = t % _BLOCK
        if pos == 0:
            block = sample_link_states(topo, chan_rng, min(_BLOCK, config.horizon - t)).tolist()
        links = block[pos]
        obs = Observation(t, ages, links if observable else None)
        a = policy.decide(obs)
        if not (type(a) is int or isinstance(a, (int, np.integer))) or not 0 <= a < n_actions:
            raise InvalidActionError(f"policy {policy.name} returned invalid action {a!r} at slot {t}")
        new = advance_ages(ages, actions[a], links, sources)
        policy.end_of_slot(obs, a, new, links)
        for hook in hooks:
            hook(t, ages, a, links, new)
        acc.add(new)
        if trajectory is not None:
            debts = policy.debts()
            for idx, (p, g) in enumerate(zip(instance.dest_pairs, instance.dest_costs)):
                k, j = instance.dest_keys[idx]
                trajectory.append((t + 1, k, j, new[p], g(new[p]),
                                   None if debts is None else debts[idx]))
        ages = new

    return SimulationResult(
        summary=acc.finalize(),
        seed=seed,
        diagnostics=policy.diagnostics(),
        trajectory=trajectory,
        wall_clock=time.perf_counter() - start,
    )


def confidence_interval(values, level: float = 0.95) -> tuple[float, float] | None:
    """Student-t interval for the mean; None for a single value."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return None
    m = values.mean()
    se = values.std(ddof=1) / np.sqrt(values.size)
    if se == 0:
        return (float(m), float(m))
    h = stats.t.ppf(0.5 + level / 2, values.size - 1) * se
    return (float(m - h), float(m + h))


@dataclass
class ReplicationResult:
    results: list

    @property
    def total_costs(self) -> np.ndarray:
        return np.array([r.total_cost for r in self.results])

    @property
    def weighted_ages(self) -> np.ndarray:
        return np.array([r.weighted_age for r in self.results])

    @property
    def mean_cost(self) -> float:
        return float(self.total_costs.mean())

    @property
    def mean_weighted_age(self) -> float:
        return float(self.weighted_ages.mean())

    @property
    def cost_ci(self):
        return confidence_interval(self.total_costs)

    @property
    def weighted_age_ci(self):
        return confidence_interval(self.weighted_ages)

    @property
    def pair_costs(self) -> np.ndarray:
        """Per-destination average costs, averaged over replications."""
        return np.mean([r.summary.avg_cost for r in self.results], axis=0)

    @property
    def pair_ages(self) -> np.ndarray:
        return np.mean([r.summary.avg_age for r in self.results], axis=0)


def run_replications(instance: NetworkInstance, policy: Policy | Callable[[], Policy],
                     config: SimulationConfig, hooks_factory: Callable[[], Sequence[SlotHook]] | None = None
                     ) -> ReplicationResult:
    """Run ``config.replications`` independent replications sequentially.

    ``policy`` may be a policy object (reset before each run) or a zero-argument
    factory. Replication ``r`` uses ``replication_seed(config.seed, r)``.
    """
    results = []
    for r in range(config.replications):
        pol = policy() if callable(policy) and not isinstance(policy, Policy) else policy
        hooks = hooks_factory() if hooks_factory else ()
        results.append(run_simulation(instance, pol, config, replication_seed(config.seed, r), hooks))
    return ReplicationResult(results)
