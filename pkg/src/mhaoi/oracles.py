"""Ground-truth oracles for small instances.

``value_iteration_oracle`` solves the average-cost scheduling MDP of a
single-hop instance exactly on ages capped at ``a_max``. ``grid_search_sr_oracle``
scans the probability simplex on a regular grid to check the stationary
randomized optimiser.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .network import NetworkInstance
from .policies.baselines import TablePolicy, single_hop_layout
from .policies.stationary import SingleHopProblem
from .simulator import SimulationConfig, run_simulation


class BudgetError(ValueError):
    pass


@dataclass
class DPResult:
    optimal_cost: float
    bounds: tuple
    pair_costs: np.ndarray
    simulated_cost: float
    policy: TablePolicy
    a_max: int
    iterations: int
    converged: bool
    wall_clock: float

    def targets(self, instance: NetworkInstance) -> dict:
        """Targets record consumable by the fixed-target age-debt policy."""
        return {
            "pairs": [list(p) for p in instance.dest_keys],
            "alpha": [float(a) for a in self.pair_costs],
            "optimal_cost": self.optimal_cost,
            "simulated_cost": self.simulated_cost,
            "a_max": self.a_max,
        }


def relative_value_iteration(stage_cost, transitions, tol: float = 1e-6, tau: float = 0.5,
                             max_iter: int = 100_000):
    """Average-cost RVI with the aperiodicity transform ``h <- h + tau (T h - h)``.

    ``transitions`` holds, per action, a list of ``(probability, next-state
    index array)`` branches. Stops when the bounds ``min (Th - h) <= gain <=
    max (Th - h)`` are within ``tol`` relative. Returns ``(gain, (lo, hi),
    greedy action per state, iterations, converged)``.
    """
    h = np.zeros(stage_cost.size)
    lo = hi = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        best = None
        for branches in transitions:
            q = sum(p * h[nxt] for p, nxt in branches)
            best = q if best is None else np.minimum(best, q)
        d = stage_cost + best - h
        lo, hi = float(d.min()), float(d.max())
        h += tau * d
        h -= h[0]
        if hi - lo < tol * max(abs(hi), 1e-12):
            converged = True
            break
    qs = np.stack([sum(p * h[nxt] for p, nxt in branches) for branches in transitions])
    greedy = np.argmin(qs, axis=0)
    return 0.5 * (lo + hi), (lo, hi), greedy, it, converged


def value_iteration_oracle(instance: NetworkInstance, a_max: int = 30, tol: float = 1e-6,
                           tau: float = 0.5, budget: int = 10**7, simulate_slots: int = 10**6,
                           seed: int = 0, max_iter: int = 100_000) -> DPResult:
    """Optimal average cost and policy of a single-hop instance.

    The state is the vector of destination ages in ``[1, a_max]``; an age at the
    cap stays there until refreshed. Per-pair optimal costs come from
    simulating the extracted table policy.
    """
    if a_max < 2:
        raise ValueError("a_max must be at least 2")
    layout = single_hop_layout(instance)
    n = len(instance.dest_pairs)
    if a_max ** n > budget:
        raise BudgetError(f"{a_max}^{n} = {a_max ** n} states exceeds the budget {budget}")
    start = time.perf_counter()
    shape = (a_max,) * n
    grid = np.indices(shape).reshape(n, -1)
    stage = np.zeros(grid.shape[1])
    for d, c in enumerate(instance.dest_costs):
        tab = np.array([c(a) for a in range(1, a_max + 1)], dtype=float)
        stage += tab[grid[d]]
    older = np.minimum(grid + 1, a_max - 1)
    stay = np.ravel_multi_index(tuple(older), shape)

    transitions = [[(1.0, stay)] for _ in range(instance.n_actions)]
    for m, d, g in layout:
        fresh = older.copy()
        fresh[d] = 0
        branches = [(g, np.ravel_multi_index(tuple(fresh), shape))]
        if g < 1:
            branches.append((1.0 - g, stay))
        transitions[m] = branches
    del grid, older

    gain, bounds, greedy, it, converged = relative_value_iteration(stage, transitions, tol, tau, max_iter)
    policy = TablePolicy(greedy.astype(np.int64), a_max)
    sim = run_simulation(instance, policy, SimulationConfig(simulate_slots, burn_in=min(1000, simulate_slots // 10)),
                         seed=seed)
    return DPResult(
        optimal_cost=gain,
        bounds=bounds,
        pair_costs=sim.summary.avg_cost,
        simulated_cost=sim.total_cost,
        policy=policy,
        a_max=a_max,
        iterations=it,
        converged=converged,
        wall_clock=time.perf_counter() - start,
    )


def simplex_grid(n: int, steps: int) -> np.ndarray:
    """All points of the ``n``-simplex with coordinates in multiples of ``1/steps``."""
    return _compositions(n, steps) / steps


def _compositions(n: int, total: int) -> np.ndarray:
    if n == 1:
        return np.array([[total]])
    ks = np.arange(total + 1)
    if n == 2:
        return np.stack([ks, total - ks], axis=1)
    return np.vstack([_prepend(k, _compositions(n - 1, total - k)) for k in ks])


def _prepend(k: int, rest: np.ndarray) -> np.ndarray:
    return np.column_stack([np.full(len(rest), k), rest])


def grid_search_sr_oracle(problem: SingleHopProblem, resolution: float = 1e-3, max_free: int = 3):
    """Best grid point of the simplex for ``sum w / (gamma (M x))``.

    Returns ``(x, objective)``. Points with a zero frequency score infinity.
    The grid is scanned in slices of fixed first coordinate to bound memory.
    """
    n = problem.n_actions
    if n - 1 > max_free:
        raise ValueError(f"{n - 1} free probabilities exceed the grid-search limit of {max_free}")
    steps = int(round(1.0 / resolution))
    c = problem.weights / problem.gammas
    if n <= 2:
        slices = [_compositions(n, steps)]
    else:
        slices = (_prepend(k, _compositions(n - 1, steps - k)) for k in range(steps + 1))
    best_x, best_val = None, np.inf
    for X in slices:
        X = X / steps
        F = X @ problem.incidence.T
        ok = np.all(F > 0, axis=1)
        vals = np.full(len(X), np.inf)
        vals[ok] = np.sum(c / F[ok], axis=1)
        i = int(np.argmin(vals))
        if best_x is None or vals[i] < best_val:
            best_x, best_val = X[i].copy(), float(vals[i])
    return best_x, best_val
