"""
Age-difference scheduling beats the best stationary policy on a line
===================================================================

The age-difference policy activates the link whose receiver would gain the
most age reduction. On a reliable line its cost grows linearly in N, while
the best stationary randomized policy grows quadratically.
"""

import numpy as np

from mhaoi import NetworkInstance, SimulationConfig, build_action_space, run_simulation, unicast_flow, validate_topology
from mhaoi.policies import AgeDifferencePolicy
from mhaoi.policies.stationary import optimal_distribution


def line(n):
    topo = validate_topology({"nodes": n, "edges": [[i, i + 1] for i in range(1, n)]})
    flows = [unicast_flow(list(range(1, n + 1)))]
    return NetworkInstance(topo, flows, build_action_space(topo, flows, "single_transmitter"))


Ns = list(range(3, 11))
ad, sr = [], []
for n in Ns:
    inst = line(n)
    ad.append(run_simulation(inst, AgeDifferencePolicy(), SimulationConfig(10_000)).total_cost)
    sr.append(optimal_distribution(inst).objective)
    print(f"N={n:2d}  age-difference {ad[-1]:7.3f}   optimal SR {sr[-1]:7.3f}")

slope = np.polyfit(Ns, ad, 1)[0]
print(f"least-squares slope of the age-difference cost: {slope:.3f} per node")
