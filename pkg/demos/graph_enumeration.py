"""
Connected topologies up to isomorphism
======================================

The all-to-all broadcast experiments run over every connected graph with 5 or
6 nodes. Each graph is listed once, in a stable order (by edge count, then by
canonical code).
"""

from collections import Counter

from mhaoi import SimulationConfig, run_simulation
from mhaoi.experiments import enumerate_connected_graphs, generate_scenario
from mhaoi.policies import AgeDebtPolicy

for n in range(1, 7):
    print(f"n={n}: {len(enumerate_connected_graphs(n))} connected graphs")

graphs = enumerate_connected_graphs(5)
print("edge-count histogram for n=5:", dict(sorted(Counter(len(g) for g in graphs).items())))
print("sparsest:", graphs[0])
print("densest: ", graphs[-1])

# Every node broadcasts its own flow; compare the tree-like and complete graphs.
for idx in (0, len(graphs) - 1):
    inst = generate_scenario("all_to_all_graph", {"N": 5, "index": idx}).instance()
    res = run_simulation(inst, AgeDebtPolicy(mode="flow_control"), SimulationConfig(5000))
    print(f"graph {idx:2d} ({len(graphs[idx])} edges): weighted age {res.weighted_age:.2f}")
