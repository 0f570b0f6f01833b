"""Stationary randomized (SR) scheduling for unicast flows on fixed paths.

An SR policy draws action ``m`` with probability ``x_m`` independently every
slot. For a flow routed over a fixed path its average destination age is
``sum_e 1 / (gamma_e f_e)``, where ``f = M x`` are the per-(edge, flow)
activation frequencies. The multi-flow objective therefore has the single-hop
form ``sum_h w_h / (gamma_h (M x)_h)``, one term per (flow, path edge), which is
convex on the simplex and optimised here by projected gradient descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..network import ActionSpace, Flow, NetworkInstance, NetworkTopology
from ..simulator import Observation, Policy

INFINITE_AGE = math.inf
FREQ_FLOOR = 1e-9


class InfeasibleError(ValueError):
    pass


def frequencies_from_distribution(x, action_space: ActionSpace) -> dict:
    """``f_ij^k = sum of x_m over actions containing (i -> j, k)``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (len(action_space),):
        raise ValueError(f"x has {x.size} entries for {len(action_space)} actions")
    f: dict = {}
    for xm, action in zip(x, action_space):
        for tx in action:
            f[tx] = f.get(tx, 0.0) + float(xm)
    return f


def closed_form_flow_age(freqs, gammas) -> float:
    """Average age at the end of a path with per-hop frequencies and reliabilities."""
    total = 0.0
    for f, g in zip(freqs, gammas):
        if f <= 0:
            return INFINITE_AGE
        total += 1.0 / (g * f)
    return total


def _path_terms(topology: NetworkTopology, flows):
    """(label, weight, gamma) per (flow, path edge)."""
    terms = []
    for flow in flows:
        if flow.path is None or flow.kind != "unicast":
            raise ValueError(f"flow {flow.source} needs a fixed unicast path")
        (dest,) = flow.destinations
        w = flow.weights[dest]
        for i, j in flow.path:
            terms.append(((i, j, flow.source), w, topology.gamma(i, j)))
    return terms


def weighted_objective(topology: NetworkTopology, flows, frequencies: dict) -> float:
    """``sum_k sum_{e in p^k} w^k / (gamma_e f_e^k)`` for given frequencies."""
    total = 0.0
    for (i, j, k), w, g in _path_terms(topology, flows):
        f = frequencies.get((i, j, k), 0.0)
        if f <= 0:
            return INFINITE_AGE
        total += w / (g * f)
    return total


@dataclass
class SingleHopProblem:
    """``min_x sum_h w_h / (gamma_h (M x)_h)`` over the probability simplex.

    Row ``h`` of ``incidence`` marks the actions that serve term ``h``.
    """

    weights: np.ndarray
    gammas: np.ndarray
    incidence: np.ndarray
    labels: list

    @property
    def n_actions(self) -> int:
        return self.incidence.shape[1]

    def frequencies(self, x) -> np.ndarray:
        return self.incidence @ np.asarray(x, dtype=float)

    def objective(self, x) -> float:
        f = self.frequencies(x)
        if np.any(f <= 0):
            return INFINITE_AGE
        return float(np.sum(self.weights / (self.gammas * f)))

    def _smooth(self, x):
        f = np.maximum(self.incidence @ x, FREQ_FLOOR)
        c = self.weights / self.gammas
        val = float(np.sum(c / f))
        grad = -(self.incidence.T @ (c / f**2))
        return val, grad


def reduce_to_single_hop(topology: NetworkTopology, flows, action_space: ActionSpace) -> SingleHopProblem:
    """One virtual source-destination term per (flow, path edge).

    Each term keeps the flow's weight and the edge's reliability, and its
    virtual link is active exactly in the actions that carry that flow on that
    edge, so the objective agrees with the multi-hop one for every ``x``.
    """
    terms = _path_terms(topology, flows)
    index = {label: h for h, (label, _, _) in enumerate(terms)}
    M = np.zeros((len(terms), len(action_space)))
    for m, action in enumerate(action_space):
        for tx in action:
            h = index.get(tuple(tx))
            if h is not None:
                M[h, m] = 1.0
    return SingleHopProblem(
        weights=np.array([w for _, w, _ in terms], dtype=float),
        gammas=np.array([g for _, _, g in terms], dtype=float),
        incidence=M,
        labels=[label for label, _, _ in terms],
    )


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


@dataclass
class OptimizationResult:
    x: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool


def kkt_residual(problem: SingleHopProblem, x) -> float:
    """Relative spread of the gradient over the support of ``x``.

    At a simplex optimum every action with ``x_m > 0`` has the minimal partial
    derivative; the residual is ``max over support - min overall`` scaled by
    ``|min|``.
    """
    _, g = problem._smooth(np.asarray(x, dtype=float))
    support = x > 1e-9
    return float((g[support].max() - g.min()) / max(abs(g.min()), 1e-300))


def optimize_distribution(problem: SingleHopProblem, tol: float = 1e-9, max_iter: int = 20_000,
                          x0=None) -> OptimizationResult:
    """Projected gradient descent with backtracking on the simplex."""
    if np.any(problem.incidence.sum(axis=1) == 0):
        bad = [problem.labels[h] for h in np.nonzero(problem.incidence.sum(axis=1) == 0)[0]]
        raise InfeasibleError(f"no action ever serves {bad}")
    n = problem.n_actions
    if x0 is None:
        useful = problem.incidence.sum(axis=0) > 0
        x = useful / useful.sum()
    else:
        x = project_simplex(x0)
    val, grad = problem._smooth(x)
    step = 1.0 / max(np.abs(grad).max(), 1.0)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        while True:
            y = project_simplex(x - step * grad)
            d = y - x
            new_val, new_grad = problem._smooth(y)
            if new_val <= val + grad @ d + (d @ d) / (2 * step) + 1e-15 * abs(val):
                break
            step *= 0.5
            if step < 1e-300:
                break
        rel = (val - new_val) / max(abs(val), 1e-300)
        x, val, grad = y, new_val, new_grad
        step *= 2.0
        if np.sqrt(d @ d) < tol and rel < tol:
            converged = True
            break
    x = np.where(x < 1e-15, 0.0, x)
    x /= x.sum()
    return OptimizationResult(x, problem.objective(x), kkt_residual(problem, x), it, converged)


def optimal_distribution(instance: NetworkInstance, **kw) -> OptimizationResult:
    problem = reduce_to_single_hop(instance.topology, instance.flows, instance.action_space)
    return optimize_distribution(problem, **kw)


def sr_decide(x, rng: np.random.Generator) -> int:
    """Draw one action index with probabilities ``x``."""
    return int(rng.choice(len(x), p=x))


class StationaryRandomizedPolicy(Policy):
    """i.i.d. action draws from ``x``; optimised over the instance when ``x`` is None."""

    name = "stationary_randomized"
    _BLOCK = 4096

    def __init__(self, x=None):
        self.x = None if x is None else np.asarray(x, dtype=float)

    def reset(self, instance, rng):
        super().reset(instance, rng)
        if self.x is None:
            self.x = optimal_distribution(instance).x
        if self.x.shape != (instance.n_actions,) or abs(self.x.sum() - 1) > 1e-9 or np.any(self.x < 0):
            raise ValueError("x must be a distribution over the instance's actions")
        self._draws: list = []
        self._pos = 0

    def decide(self, obs: Observation) -> int:
        if self._pos >= len(self._draws):
            self._draws = self.rng.choice(len(self.x), size=self._BLOCK, p=self.x).tolist()
            self._pos = 0
        a = self._draws[self._pos]
        self._pos += 1
        return a

    def diagnostics(self):
        return {"x": self.x.tolist()}
