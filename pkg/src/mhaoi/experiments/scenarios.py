"""Named scenario generators and explicit-instance assembly.

A scenario resolves to an explicit topology, flow list and interference model.
``resolved`` holds every parameter needed to rebuild it exactly, including
randomly drawn reliabilities, so echoing it back reproduces the instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..costs import mixed_cost_functions
from ..network import (
    NetworkInstance,
    build_action_space,
    broadcast_flow,
    flow_from_dict,
    unicast_flow,
    validate_topology,
)
from .graphs import enumerate_connected_graphs

SCENARIOS = ("broadcast_star", "functions_star", "unicast_line_oddeven", "unicast_line_single",
             "all_to_all_graph")


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    id: str
    topology: object
    flows: list
    interference: object
    resolved: dict = field(default_factory=dict)

    def instance(self) -> NetworkInstance:
        actions = build_action_space(self.topology, self.flows, self.interference)
        return NetworkInstance(self.topology, self.flows, actions, name=self.id)


def _gammas(params: dict, count: int, default=None) -> list[float]:
    if "gammas" in params:
        g = [float(x) for x in params["gammas"]]
        if len(g) != count:
            raise ScenarioError(f"expected {count} gammas, got {len(g)}")
        return g
    if "gamma" in params or default is not None:
        return [float(params.get("gamma", default))] * count
    lo, hi = params.get("gamma_range", (0.6, 1.0))
    rng = np.random.default_rng(int(params.get("seed", 0)))
    return [float(x) for x in rng.uniform(lo, hi, count)]


def _star(N: int, gammas):
    return validate_topology({"nodes": N, "edges": [[i, N, g] for i, g in zip(range(1, N), gammas)]})


def broadcast_star(params: dict) -> Scenario:
    """Sources ``1..N-1`` each send to the centre ``N``; weights ``i/N``, random reliabilities."""
    N = int(params["N"])
    if N < 2:
        raise ScenarioError("broadcast_star needs N >= 2")
    gammas = _gammas(params, N - 1)
    topo = _star(N, gammas)
    flows = [unicast_flow([i, N], weight=i / N) for i in range(1, N)]
    resolved = {"N": N, "gammas": gammas}
    return Scenario(params.get("id", f"broadcast_star_N{N}"), topo, flows, "single_transmitter", resolved)


def functions_star(params: dict) -> Scenario:
    """Star with costs cycling through ``15A, e^A, A^2, A^3``."""
    N = int(params["N"])
    if N < 2:
        raise ScenarioError("functions_star needs N >= 2")
    gammas = _gammas(params, N - 1, default=1.0)
    cap = float(params.get("cap", 1e9))
    base = mixed_cost_functions(cap)
    topo = _star(N, gammas)
    flows = [unicast_flow([i, N], cost=base[(i - 1) % 4]) for i in range(1, N)]
    resolved = {"N": N, "gammas": gammas, "cap": cap}
    return Scenario(params.get("id", f"functions_star_N{N}"), topo, flows, "single_transmitter", resolved)


def _line(params: dict, interference: str, name: str) -> Scenario:
    N = int(params["N"])
    if N < 2:
        raise ScenarioError(f"{name} needs N >= 2")
    gammas = _gammas(params, N - 1, default=1.0)
    topo = validate_topology({"nodes": N, "edges": [[i, i + 1, g] for i, g in zip(range(1, N), gammas)]})
    fixed = bool(params.get("fixed_path", True))
    flows = [unicast_flow(list(range(1, N + 1)), fixed_path=fixed)]
    resolved = {"N": N, "gammas": gammas, "fixed_path": fixed}
    return Scenario(params.get("id", f"{name}_N{N}"), topo, flows, interference, resolved)


def unicast_line_single(params: dict) -> Scenario:
    return _line(params, "single_transmitter", "unicast_line_single")


def unicast_line_oddeven(params: dict) -> Scenario:
    return _line(params, "line_odd_even", "unicast_line_oddeven")


def all_to_all_graph(params: dict) -> Scenario:
    """Every node broadcasts its own flow over a given or enumerated topology."""
    if "edges" in params:
        N = int(params["N"])
        edges = [tuple(e[:2]) for e in params["edges"]]
        default_id = f"graph_N{N}"
    else:
        N = int(params["N"])
        idx = int(params["index"])
        graphs = enumerate_connected_graphs(N)
        if not 0 <= idx < len(graphs):
            raise ScenarioError(f"graph index {idx} out of range for N={N} ({len(graphs)} graphs)")
        edges = graphs[idx]
        default_id = f"graph_N{N}_{idx:03d}"
    gammas = _gammas(params, len(edges), default=1.0)
    topo = validate_topology({"nodes": N, "edges": [[u, v, g] for (u, v), g in zip(edges, gammas)]})
    if not topo.is_connected():
        raise ScenarioError("all_to_all_graph needs a connected topology")
    node_w = {int(k): float(w) for k, w in params.get("node_weights", {}).items()}
    flows = []
    for k in range(1, N + 1):
        w = {j: node_w.get(j, 1.0) for j in range(1, N + 1) if j != k}
        flows.append(broadcast_flow(k, N, weights=w))
    interference = {"model": "single_transmitter", "node_broadcast": bool(params.get("node_broadcast", False))}
    resolved = {"N": N, "edges": [list(e) for e in edges], "gammas": gammas,
                "node_weights": {str(k): w for k, w in node_w.items()},
                "node_broadcast": interference["node_broadcast"]}
    return Scenario(params.get("id", default_id), topo, flows, interference, resolved)


GENERATORS = {
    "broadcast_star": broadcast_star,
    "functions_star": functions_star,
    "unicast_line_oddeven": unicast_line_oddeven,
    "unicast_line_single": unicast_line_single,
    "all_to_all_graph": all_to_all_graph,
}


def generate_scenario(name: str, params: dict | None = None) -> Scenario:
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise ScenarioError(f"unknown scenario {name!r}; available: {', '.join(SCENARIOS)}") from None
    scen = gen(dict(params or {}))
    scen.resolved = {"generator": name, "params": scen.resolved, "id": scen.id}
    return scen


def explicit_scenario(entry: dict) -> Scenario:
    """Scenario from an explicit ``topology``/``flows``/``interference`` entry."""
    flows = [flow_from_dict(f) for f in entry["flows"]]
    topo = validate_topology(entry["topology"], flows)
    sid = entry.get("id", "explicit")
    resolved = {"id": sid, "topology": topo.to_dict(), "flows": [f.to_dict() for f in flows],
                "interference": entry.get("interference", "single_transmitter")}
    return Scenario(sid, topo, flows, resolved["interference"], resolved)


def expand_scenarios(entries) -> list[Scenario]:
    """Resolve config entries; an ``all_to_all_graph`` entry without ``index`` or
    ``edges`` expands to every connected graph for each listed ``N``."""
    out = []
    for entry in entries:
        if "generator" not in entry:
            out.append(explicit_scenario(entry))
            continue
        params = dict(entry.get("params", {}))
        if "id" in entry:
            params["id"] = entry["id"]
        if entry["generator"] == "all_to_all_graph" and "index" not in params and "edges" not in params:
            sizes = params.pop("N")
            sizes = sizes if isinstance(sizes, list) else [sizes]
            params.pop("id", None)
            for N in sizes:
                for idx in range(len(enumerate_connected_graphs(int(N)))):
                    out.append(generate_scenario("all_to_all_graph", {**params, "N": N, "index": idx}))
            continue
        out.append(generate_scenario(entry["generator"], params))
    return out
