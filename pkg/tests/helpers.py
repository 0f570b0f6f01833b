"""Small instance builders shared by the tests."""

from mhaoi.costs import Linear
from mhaoi.network import (
    NetworkInstance,
    build_action_space,
    unicast_flow,
    validate_topology,
)


def line_instance(gammas, interference="single_transmitter", fixed_path=True, weight=1.0):
    n = len(gammas) + 1
    topo = validate_topology({"nodes": n, "edges": [[i, i + 1, g] for i, g in zip(range(1, n), gammas)]})
    flows = [unicast_flow(list(range(1, n + 1)), weight=weight, fixed_path=fixed_path)]
    return NetworkInstance(topo, flows, build_action_space(topo, flows, interference))


def star_instance(gammas, weights=None, costs=None):
    """Sources 1..n send to centre n+1, one transmitter per slot."""
    n = len(gammas)
    centre = n + 1
    weights = weights or [1.0] * n
    topo = validate_topology({"nodes": centre, "edges": [[i + 1, centre, g] for i, g in enumerate(gammas)]})
    flows = []
    for i in range(n):
        cost = costs[i] if costs is not None else Linear(weights[i])
        flows.append(unicast_flow([i + 1, centre], weight=weights[i], cost=cost))
    return NetworkInstance(topo, flows, build_action_space(topo, flows, "single_transmitter"))


def three_node_line():
    """Three-node line, unicast 1 -> 3, actions (idle, 1->2, 2->3)."""
    return line_instance([1.0, 1.0], fixed_path=False)
