"""Age-debt scheduling: virtual debt queues stabilised by one-slot drift minimisation.

Each destination pair ``(k, j)`` owns a debt queue
``Q <- [Q + g(A_j(t+1)) - alpha]^+`` that grows whenever its effective age
exceeds the target ``alpha``. On multi-hop unicast/multicast flows every
forwarding node ``i`` of ``{k} ∪ C_k`` that is not a destination also keeps a
queue per destination ``j``. While ``i`` forwards flow ``k`` on the link set
``L`` it is charged the optimistic future cost ``g(min(A_i, A_j) + h^L_ij)``,
and otherwise the destination's realised cost. The policy picks the action
minimising the exact expected change of the sum of squared queues, with the
expectation taken over the Bernoulli link outcomes.

Targets are fixed, adapted per epoch by gradient steps, or switched per slot
between 1 and ``alpha_max`` (flow control).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..network import NetworkInstance, constrained_min_hops
from ..simulator import Observation, Policy
from .baselines import single_hop_layout


def update_destination_debt(q: float, b_next: float, alpha: float) -> float:
    v = q + b_next - alpha
    return v if v > 0 else 0.0


def update_intermediate_debt(q: float, forwarding: bool, a_i: int, a_j: int, hops: float,
                             cost, b_next: float, alpha: float) -> float:
    """Forwarding: charge ``g(min(A_i, A_j) + h)``; otherwise the destination's ``B(t+1)``."""
    c = cost(min(a_i, a_j) + hops) if forwarding else b_next
    v = q + c - alpha
    return v if v > 0 else 0.0


def flow_control_targets(debts, V: float, alpha_max: float) -> np.ndarray:
    """``alpha_max`` where the debt exceeds ``V``, else 1."""
    return np.where(np.asarray(debts, dtype=float) > V, float(alpha_max), 1.0)


def gradient_descent_step(alpha, end_debts, W: int, eta: float, epsilon: float, floor=None) -> np.ndarray:
    """One epoch of target adaptation.

    If any queue ended the epoch above ``epsilon * W``, raise those targets by
    ``eta`` and keep the rest; otherwise lower every target by ``eta``.
    """
    alpha = np.asarray(alpha, dtype=float)
    unstable = np.asarray(end_debts, dtype=float) > epsilon * W
    if unstable.any():
        out = alpha + eta * unstable
    else:
        out = alpha - eta
    if floor is not None:
        out = np.maximum(out, floor)
    return out


def single_hop_bound_decide(gammas, debts, ages, costs) -> int:
    """Position maximising ``gamma_i Q_i (g_i(A_i + 1) - g_i(1))``; lowest on ties."""
    best, best_val = 0, None
    for i, (g, q, a, c) in enumerate(zip(gammas, debts, ages, costs)):
        v = g * q * (c(a + 1) - c(1))
        if best_val is None or v > best_val:
            best, best_val = i, v
    return best


def _sq(v):
    return v * v if v > 0 else 0.0


class DebtQueues:
    """Destination and intermediate debt queues for one instance.

    ``q_dest[d]`` follows ``instance.dest_keys``; ``inter`` lists the
    intermediate queues as ``(k, i, j)`` with values in ``q_inter``.
    """

    def __init__(self, instance: NetworkInstance, intermediate: bool = True):
        self.instance = instance
        topo = instance.topology
        self.costs = instance.dest_costs
        self.dest_pairs = instance.dest_pairs
        n_dest = len(self.dest_pairs)
        d_of = {key: d for d, key in enumerate(instance.dest_keys)}

        self.inter: list = []
        self._inter_d: list = []
        self._inter_pair: list = []
        if intermediate:
            for f in instance.flows:
                if f.kind == "broadcast" or not (f.commissioned - f.destinations):
                    continue
                for i in sorted(f.forwarders - f.destinations):
                    for j in sorted(f.destinations):
                        self.inter.append((f.source, i, j))
                        self._inter_d.append(d_of[(f.source, j)])
                        self._inter_pair.append(instance.pair_index[(f.source, i)])
        self._inter_of_d = [[] for _ in range(n_dest)]
        for q, d in enumerate(self._inter_d):
            self._inter_of_d[d].append(q)
        inter_at = {}
        for q, (k, i, j) in enumerate(self.inter):
            inter_at.setdefault((k, i), []).append(q)

        # per action: deliveries into destination pairs and forwarding groups
        dest_pos = {p: d for d, p in enumerate(self.dest_pairs)}
        self.deliveries = []
        self.forwarding = []
        self._hop_cache: dict = {}
        for action, comp in zip(instance.action_space, instance.compiled_actions):
            deliv: dict = {}
            groups: dict = {}
            for (i, j, k), (s, r, e, g) in zip(action, comp):
                if r in dest_pos:
                    deliv.setdefault(dest_pos[r], []).append((s, g))
                groups.setdefault((k, i), []).append((i, j))
            self.deliveries.append(tuple((d, self.dest_pairs[d], tuple(v)) for d, v in deliv.items()))
            fwd = []
            for (k, i), L in groups.items():
                for q in inter_at.get((k, i), ()):
                    j = self.inter[q][2]
                    key = (k, i, j, frozenset(L))
                    if key not in self._hop_cache:
                        self._hop_cache[key] = constrained_min_hops(
                            topo, instance.flow_by_id[k], i, j, L)
                    fwd.append((q, self._hop_cache[key]))
            self.forwarding.append(tuple(fwd))

        self.q_dest = [0.0] * n_dest
        self.q_inter = [0.0] * len(self.inter)

    def reset(self):
        self.q_dest = [0.0] * len(self.q_dest)
        self.q_inter = [0.0] * len(self.q_inter)

    def lyapunov(self) -> float:
        return sum(q * q for q in self.q_dest) + sum(q * q for q in self.q_inter)

    def next_age_distribution(self, ages, action: int, d: int) -> list:
        """``[(prob, next age)]`` of destination pair ``d`` under ``action``."""
        a_j = ages[self.dest_pairs[d]]
        for dd, p, senders in self.deliveries[action]:
            if dd == d:
                return self._dist(ages, a_j, senders)
        return [(1.0, a_j + 1)]

    @staticmethod
    def _dist(ages, a_j, senders):
        useful = sorted((ages[s] + 1, g) for s, g in senders if ages[s] < a_j)
        out = []
        rest = 1.0
        for a, g in useful:
            out.append((rest * g, a))
            rest *= 1.0 - g
        if rest > 0:
            out.append((rest, a_j + 1))
        return out

    def action_deltas(self, ages, alpha) -> tuple[list, float]:
        """Expected ``sum of next squared queues`` per action, minus the idle baseline.

        Returns ``(deltas, baseline)`` where ``baseline`` is the expected sum of
        squared next queues when nothing is delivered and nobody forwards.
        """
        costs = self.costs
        q_dest, q_inter = self.q_dest, self.q_inter
        inter_d, inter_pair, inter_of_d = self._inter_d, self._inter_pair, self._inter_of_d
        dest_pairs = self.dest_pairs

        b0 = [costs[d](ages[p] + 1) for d, p in enumerate(dest_pairs)]
        base_dest = [_sq(q_dest[d] + b0[d] - alpha[d]) for d in range(len(q_dest))]
        base_inter = [_sq(q_inter[q] + b0[inter_d[q]] - alpha[inter_d[q]]) for q in range(len(q_inter))]
        baseline = sum(base_dest) + sum(base_inter)

        deltas = []
        for deliv, fwd in zip(self.deliveries, self.forwarding):
            delta = 0.0
            recv = None
            for d, p, senders in deliv:
                a_j = ages[p]
                if len(senders) == 1:
                    s, g = senders[0]
                    if ages[s] >= a_j:
                        continue
                    dist = ((g, ages[s] + 1), (1.0 - g, a_j + 1))
                else:
                    dist = self._dist(ages, a_j, senders)
                    if len(dist) == 1:
                        continue
                c = costs[d]
                al = alpha[d]
                cs = [(pr, c(a)) for pr, a in dist]
                qd = q_dest[d]
                delta += sum(pr * _sq(qd + ca - al) for pr, ca in cs) - base_dest[d]
                for q in inter_of_d[d]:
                    qq = q_inter[q]
                    delta += sum(pr * _sq(qq + ca - al) for pr, ca in cs) - base_inter[q]
                if fwd:
                    if recv is None:
                        recv = {}
                    recv[d] = cs
            for q, h in fwd:
                d = inter_d[q]
                qq = q_inter[q]
                al = alpha[d]
                val = _sq(qq + costs[d](min(ages[inter_pair[q]], ages[dest_pairs[d]]) + h) - al)
                if recv is not None and d in recv:
                    delta += val - sum(pr * _sq(qq + ca - al) for pr, ca in recv[d])
                else:
                    delta += val - base_inter[q]
            deltas.append(delta)
        return deltas, baseline

    def expected_drift(self, ages, action: int, alpha) -> float:
        """``E[L(t+1) - L(t)]`` for one action."""
        deltas, baseline = self.action_deltas(ages, alpha)
        return baseline + deltas[action] - self.lyapunov()

    def update(self, ages_before, action: int, ages_after, alpha) -> None:
        costs = self.costs
        b = [costs[d](ages_after[p]) for d, p in enumerate(self.dest_pairs)]
        for d in range(len(b)):
            self.q_dest[d] = update_destination_debt(self.q_dest[d], b[d], alpha[d])
        forwarding = dict(self.forwarding[action])
        for q in range(len(self.q_inter)):
            d = self._inter_d[q]
            if q in forwarding:
                a_i = ages_before[self._inter_pair[q]]
                a_j = ages_before[self.dest_pairs[d]]
                self.q_inter[q] = update_intermediate_debt(
                    self.q_inter[q], True, a_i, a_j, forwarding[q], costs[d], b[d], alpha[d])
            else:
                self.q_inter[q] = update_destination_debt(self.q_inter[q], b[d], alpha[d])


def _argmin(values, tie_break: str, scale: float) -> int:
    lo = min(values)
    tol = 1e-12 * (abs(scale) + abs(lo) + 1.0)
    ties = [m for m, v in enumerate(values) if v <= lo + tol]
    return ties[0] if tie_break == "first" else ties[-1]


def default_alpha_max(instance: NetworkInstance) -> float:
    """Largest per-pair cost of an age ``|A| * hops / gamma_min`` (round-robin-like service)."""
    n_active = max(1, sum(1 for c in instance.compiled_actions if c))
    gmin = float(instance.topology.gammas.min())
    out = 1.0
    for (k, j), c in zip(instance.dest_keys, instance.dest_costs):
        h = constrained_min_hops(instance.topology, instance.flow_by_id[k], k, j, None)
        out = max(out, c(int(math.ceil(n_active * h / gmin))))
    return out


@dataclass
class DebtParams:
    """Target-selection settings; ``None`` entries get instance-dependent defaults."""

    mode: str = "fixed"
    alpha: object = None
    V: float | None = None
    alpha_max: float | None = None
    W: int = 2000
    E: int = 50
    eta: float = 0.5
    epsilon: float = 0.01
    alpha_init: object = None

    def __post_init__(self):
        if self.mode not in ("fixed", "flow_control", "gradient_descent"):
            raise ValueError(f"unknown age-debt mode {self.mode!r}")
        if self.mode == "fixed" and self.alpha is None:
            raise ValueError("fixed-target age debt needs alpha")
        if self.W < 1 or self.E < 1 or self.eta < 0 or self.epsilon <= 0:
            raise ValueError("need W, E >= 1, eta >= 0, epsilon > 0")
        if self.V is not None and self.V <= 0:
            raise ValueError("V must be positive")
        if self.alpha_max is not None and self.alpha_max < 1:
            raise ValueError("alpha_max must be >= 1")


class AgeDebtPolicy(Policy):
    """Drift-minimising age-debt policy.

    ``rule="bound"`` swaps the exact drift for the single-hop upper-bound
    index. ``tie_break="last"`` prefers the highest action index among ties,
    which is only meant for diagnostics.
    """

    name = "age_debt"

    def __init__(self, params: DebtParams | None = None, intermediate: bool = True,
                 rule: str = "exact", tie_break: str = "first", **kw):
        self.params = params or DebtParams(**kw)
        self.intermediate = intermediate
        if rule not in ("exact", "bound"):
            raise ValueError(f"unknown rule {rule!r}")
        if tie_break not in ("first", "last"):
            raise ValueError(f"unknown tie_break {tie_break!r}")
        self.rule = rule
        self.tie_break = tie_break

    def reset(self, instance, rng):
        super().reset(instance, rng)
        p = self.params
        n = len(instance.dest_pairs)
        self.queues = DebtQueues(instance, self.intermediate)
        self.V = p.V if p.V is not None else 50.0 * n
        self.alpha_max = p.alpha_max if p.alpha_max is not None else default_alpha_max(instance)
        if p.mode == "fixed":
            alpha = np.broadcast_to(np.asarray(p.alpha, dtype=float), (n,))
        elif p.mode == "flow_control":
            alpha = np.ones(n) if p.alpha_init is None else np.broadcast_to(
                np.asarray(p.alpha_init, dtype=float), (n,))
        else:
            alpha = (self._round_robin_costs(instance) if p.alpha_init is None
                     else np.broadcast_to(np.asarray(p.alpha_init, dtype=float), (n,)))
        self.alpha = [float(a) for a in alpha]
        self._floor = np.array([c(1) for c in instance.dest_costs])
        self.alpha_history = [list(self.alpha)] if p.mode == "gradient_descent" else []
        self.epoch_debts: list = []
        self._slot = 0
        if self.rule == "bound":
            layout = single_hop_layout(instance)
            self._bound = [(m, instance.dest_pairs[d], d, g) for m, d, g in layout]

    def _round_robin_costs(self, instance):
        from ..simulator import SimulationConfig, run_simulation
        from .baselines import RoundRobinPolicy

        horizon = max(self.params.W, 1000)
        res = run_simulation(instance, RoundRobinPolicy(), SimulationConfig(horizon, burn_in=0), seed=0)
        return res.summary.avg_cost

    def decide(self, obs: Observation) -> int:
        if self.rule == "bound":
            return self._decide_bound(obs.ages)
        deltas, baseline = self.queues.action_deltas(obs.ages, self.alpha)
        return _argmin(deltas, self.tie_break, baseline)

    def _decide_bound(self, ages):
        q = self.queues.q_dest
        costs = self.queues.costs
        best, best_val = self._bound[0][0], None
        for m, p, d, g in self._bound:
            c = costs[d]
            v = g * q[d] * (c(ages[p] + 1) - c(1))
            if best_val is None or v > best_val:
                best, best_val = m, v
        return best

    def expected_drift(self, ages, action: int) -> float:
        return self.queues.expected_drift(ages, action, self.alpha)

    def end_of_slot(self, obs, action, new_ages, link_states):
        self.queues.update(obs.ages, action, new_ages, self.alpha)
        self._slot += 1
        p = self.params
        if p.mode == "flow_control":
            self.alpha = flow_control_targets(self.queues.q_dest, self.V, self.alpha_max).tolist()
        elif p.mode == "gradient_descent" and self._slot % p.W == 0 and self._slot // p.W <= p.E:
            end = list(self.queues.q_dest)
            self.epoch_debts.append(end)
            self.alpha = gradient_descent_step(self.alpha, end, p.W, p.eta, p.epsilon,
                                               self._floor).tolist()
            self.alpha_history.append(list(self.alpha))
            self.queues.reset()

    def debts(self):
        return list(self.queues.q_dest)

    def diagnostics(self):
        out = {
            "final_debts": list(self.queues.q_dest),
            "final_intermediate_debts": list(self.queues.q_inter),
            "alpha": list(self.alpha),
        }
        if self.alpha_history:
            out["alpha_history"] = self.alpha_history
            out["epoch_debts"] = self.epoch_debts
        return out


def gradient_descent_targets(instance: NetworkInstance, W: int = 2000, E: int = 50, eta: float = 0.5,
                             epsilon: float = 0.01, alpha_init=None, seed: int = 0, **policy_kw) -> dict:
    """Run the epoch-wise target search for ``W * E`` slots.

    Returns the target schedule (one vector per epoch boundary) and the
    destination debts at the end of each epoch.
    """
    from ..simulator import SimulationConfig, run_simulation

    params = DebtParams(mode="gradient_descent", W=W, E=E, eta=eta, epsilon=epsilon, alpha_init=alpha_init)
    pol = AgeDebtPolicy(params, **policy_kw)
    res = run_simulation(instance, pol, SimulationConfig(W * E, burn_in=0), seed=seed)
    return {"alpha": pol.alpha_history, "epoch_debts": pol.epoch_debts, "result": res}


class DebtTracker:
    """Slot hook following destination debt queues for fixed targets under any policy."""

    def __init__(self, instance: NetworkInstance, alpha):
        self.instance = instance
        self.alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (len(instance.dest_pairs),)).tolist()
        self.q = [0.0] * len(self.alpha)

    def __call__(self, t, before, action, links, after):
        inst = self.instance
        for d, (p, c) in enumerate(zip(inst.dest_pairs, inst.dest_costs)):
            self.q[d] = update_destination_debt(self.q[d], c(after[p]), self.alpha[d])
