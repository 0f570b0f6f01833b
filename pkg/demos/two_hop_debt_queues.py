"""
Why age-debt needs intermediate queues
======================================

On the line 1 -> 2 -> 3 with a single flow to node 3, destination debt queues
alone never value the first hop: activating 1 -> 2 does not change node 3's
age this slot. With ties broken toward the second hop, the policy starves the
relay and the destination's age grows without bound. Adding a debt queue at
the source, charged with the age node 3 could reach through the forwarded
packet, restores the alternating schedule with average age 2.5.
"""

from mhaoi import NetworkInstance, SimulationConfig, build_action_space, run_simulation, unicast_flow, validate_topology
from mhaoi.policies import AgeDebtPolicy

topo = validate_topology({"nodes": 3, "edges": [[1, 2], [2, 3]]})
flows = [unicast_flow([1, 2, 3], fixed_path=False)]
inst = NetworkInstance(topo, flows, build_action_space(topo, flows, "single_transmitter"))
T = 5000

for alpha in (1.0, 3.0, 10.0):
    pol = AgeDebtPolicy(alpha=alpha, intermediate=False, tie_break="last")
    res = run_simulation(inst, pol, SimulationConfig(T, burn_in=0))
    print(f"destination queues only, alpha={alpha:4}: Q(T)/T = {pol.queues.q_dest[0] / T:9.1f}, "
          f"average age {res.summary.avg_age[0]:9.1f}")

pol = AgeDebtPolicy(alpha=2.5)
res = run_simulation(inst, pol, SimulationConfig(T))
print("intermediate queues:", pol.queues.inter)
print(f"with intermediate queues, alpha=2.5: average age {res.summary.avg_age[0]:.3f}")
