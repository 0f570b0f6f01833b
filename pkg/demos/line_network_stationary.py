"""
Stationary randomized scheduling on a line network
==================================================

A single flow travels 1 -> 2 -> ... -> N, one link active per slot. A
stationary randomized policy picks each action independently with fixed
probabilities; the destination's average age then has a closed form, the sum
of 1/(gamma * f) over the hops.
"""

import numpy as np

from mhaoi import (
    NetworkInstance,
    SimulationConfig,
    build_action_space,
    run_simulation,
    unicast_flow,
    validate_topology,
)
from mhaoi.policies import StationaryRandomizedPolicy
from mhaoi.policies.stationary import closed_form_flow_age, frequencies_from_distribution, optimal_distribution

# A four-node line with unreliable links.
gammas = [0.9, 0.7, 0.8]
topo = validate_topology({"nodes": 4, "edges": [[1, 2, 0.9], [2, 3, 0.7], [3, 4, 0.8]]})
flows = [unicast_flow([1, 2, 3, 4])]
actions = build_action_space(topo, flows, "single_transmitter")
inst = NetworkInstance(topo, flows, actions)
print("actions:", list(actions))

# Uniform over the three link activations (never idle).
x = np.array([0.0, 1 / 3, 1 / 3, 1 / 3])
f = frequencies_from_distribution(x, actions)
predicted = closed_form_flow_age([f[(i, j, 1)] for i, j in flows[0].path], gammas)
sim = run_simulation(inst, StationaryRandomizedPolicy(x), SimulationConfig(200_000, seed=1))
print(f"uniform x: closed form {predicted:.3f}, simulated {sim.summary.avg_age[0]:.3f}")

# The optimal distribution puts more mass on the weaker links.
opt = optimal_distribution(inst)
print("optimal x:", np.round(opt.x, 4), f"objective {opt.objective:.3f}")
sim = run_simulation(inst, StationaryRandomizedPolicy(opt.x), SimulationConfig(200_000, seed=1))
print(f"optimal x simulated: {sim.summary.avg_age[0]:.3f}")

# With reliable links the optimum is uniform and the age is (N-1)^2.
for n in range(3, 8):
    topo = validate_topology({"nodes": n, "edges": [[i, i + 1] for i in range(1, n)]})
    flows = [unicast_flow(list(range(1, n + 1)))]
    inst = NetworkInstance(topo, flows, build_action_space(topo, flows, "single_transmitter"))
    print(f"N={n}: optimal SR age {optimal_distribution(inst).objective:.3f}, (N-1)^2 = {(n - 1) ** 2}")
