"""Topology, flows, interference-free action spaces and link-state sampling.

Node ids are 1-based. An action is a tuple of :class:`Transmission` records;
index 0 of every :class:`ActionSpace` is the idle action.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .costs import CostFunction, Linear


class TopologyError(ValueError):
    pass


class FlowError(ValueError):
    pass


class ActionSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    gamma: float = 1.0


class NetworkTopology:
    """Undirected graph on nodes ``1..node_count`` with per-edge reliability."""

    def __init__(self, node_count: int, edges: Sequence[Edge]):
        self.node_count = node_count
        self.edges = tuple(edges)
        self._index: dict[tuple[int, int], int] = {}
        self._adj: dict[int, list[int]] = {n: [] for n in self.nodes}
        for idx, e in enumerate(self.edges):
            self._index[(e.u, e.v)] = idx
            self._index[(e.v, e.u)] = idx
            self._adj[e.u].append(e.v)
            self._adj[e.v].append(e.u)
        for n in self._adj:
            self._adj[n].sort()
        self.gammas = np.array([e.gamma for e in self.edges], dtype=float)

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self._index

    def edge_index(self, i: int, j: int) -> int:
        try:
            return self._index[(i, j)]
        except KeyError:
            raise TopologyError(f"no edge between {i} and {j}") from None

    def gamma(self, i: int, j: int) -> float:
        return self.edges[self.edge_index(i, j)].gamma

    def neighbors(self, i: int) -> list[int]:
        return self._adj[i]

    def is_connected(self, nodes: Iterable[int] | None = None) -> bool:
        keep = set(self.nodes if nodes is None else nodes)
        if not keep:
            return True
        start = min(keep)
        seen = {start}
        todo = [start]
        while todo:
            n = todo.pop()
            for m in self._adj[n]:
                if m in keep and m not in seen:
                    seen.add(m)
                    todo.append(m)
        return seen == keep

    def to_dict(self) -> dict:
        return {
            "nodes": self.node_count,
            "edges": [{"u": e.u, "v": e.v, "gamma": e.gamma} for e in self.edges],
        }

    def __eq__(self, other):
        return isinstance(other, NetworkTopology) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"NetworkTopology(node_count={self.node_count}, edges={len(self.edges)})"


def validate_topology(raw, flows: Sequence["Flow"] | None = None) -> NetworkTopology:
    """Build a :class:`NetworkTopology` from a dict (or pass one through).

    Edges may be given as ``{"u", "v", "gamma"}`` mappings or ``[u, v(, gamma)]``
    lists. Orientation is normalised to ``u < v``. When ``flows`` is given, each
    flow is checked against the topology as well.
    """
    if isinstance(raw, NetworkTopology):
        topo = raw
    else:
        try:
            n = int(raw["nodes"])
            raw_edges = raw.get("edges", [])
        except (KeyError, TypeError) as exc:
            raise TopologyError(f"malformed topology: {exc}") from None
        if n < 1:
            raise TopologyError("node count must be positive")
        edges = []
        seen = set()
        for pos, item in enumerate(raw_edges):
            if isinstance(item, Mapping):
                u, v, g = item.get("u"), item.get("v"), item.get("gamma", 1.0)
            else:
                u, v, *rest = item
                g = rest[0] if rest else 1.0
            u, v, g = int(u), int(v), float(g)
            if u == v:
                raise TopologyError(f"edge {pos} ({u},{v}) is a self-loop")
            if not (1 <= u <= n and 1 <= v <= n):
                raise TopologyError(f"edge {pos} ({u},{v}) references a node outside 1..{n}")
            if not (0.0 < g <= 1.0):
                raise TopologyError(f"edge {pos} ({u},{v}) has gamma={g} outside (0, 1]")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise TopologyError(f"edge {pos} ({u},{v}) duplicates an earlier edge")
            seen.add(key)
            edges.append(Edge(key[0], key[1], g))
        topo = NetworkTopology(n, edges)
    for flow in flows or ():
        flow.validate(topo)
    return topo


class Transmission(NamedTuple):
    """Flow ``flow``'s update sent from ``sender`` to ``receiver`` in one slot."""

    sender: int
    receiver: int
    flow: int


@dataclass(frozen=True)
class Flow:
    """Source ``k``, commissioned relays ``C_k`` and destinations ``D_k``.

    ``weights`` default to 1 and ``costs`` default to ``Linear(weight)``, so the
    generalised cost objective reduces to the weighted-age one when no cost is
    given. ``path`` is an optional fixed route (list of directed hops).
    """

    source: int
    destinations: frozenset
    commissioned: frozenset = frozenset()
    kind: str = "unicast"
    weights: Mapping[int, float] = field(default_factory=dict)
    costs: Mapping[int, CostFunction] = field(default_factory=dict)
    path: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "destinations", frozenset(self.destinations))
        object.__setattr__(self, "commissioned", frozenset(self.commissioned))
        w = {j: float(self.weights.get(j, 1.0)) for j in sorted(self.destinations)}
        object.__setattr__(self, "weights", w)
        c = {j: self.costs.get(j) or Linear(w[j]) for j in sorted(self.destinations)}
        object.__setattr__(self, "costs", c)
        if self.path is not None:
            object.__setattr__(self, "path", tuple((int(a), int(b)) for a, b in self.path))

    @property
    def id(self) -> int:
        return self.source

    @property
    def nodes(self) -> frozenset:
        """``{k} ∪ C_k ∪ D_k``."""
        return frozenset({self.source}) | self.commissioned | self.destinations

    @property
    def forwarders(self) -> frozenset:
        return frozenset({self.source}) | self.commissioned

    @property
    def receivers(self) -> frozenset:
        return self.commissioned | self.destinations

    def weight(self, node: int) -> float:
        """Destination weight, or 1 for a commissioned-only node."""
        return self.weights.get(node, 1.0)

    def validate(self, topo: NetworkTopology) -> None:
        k = self.source
        if not 1 <= k <= topo.node_count:
            raise FlowError(f"flow {k}: source outside the topology")
        if not self.destinations:
            raise FlowError(f"flow {k}: empty destination set")
        if k in self.destinations:
            raise FlowError(f"flow {k}: source listed as a destination")
        if k in self.commissioned:
            raise FlowError(f"flow {k}: source listed as commissioned")
        for n in self.nodes:
            if not 1 <= n <= topo.node_count:
                raise FlowError(f"flow {k}: node {n} outside the topology")
        everyone = frozenset(topo.nodes) - {k}
        if self.kind not in ("unicast", "multicast", "broadcast"):
            raise FlowError(f"flow {k}: unknown kind {self.kind!r}")
        # a single destination that happens to be the only other node is still unicast
        if (self.kind == "broadcast") != (self.destinations == everyone) and not (
                self.kind == "unicast" and len(self.destinations) == 1):
            raise FlowError(f"flow {k}: broadcast iff destinations are all other nodes")
        if self.kind == "unicast" and len(self.destinations) != 1:
            raise FlowError(f"flow {k}: unicast flow needs exactly one destination")
        for j, w in self.weights.items():
            if not w > 0:
                raise FlowError(f"flow {k}: weight for destination {j} must be positive")
        for j in self.destinations:
            if not self.costs[j].check_monotone():
                raise FlowError(f"flow {k}: cost for destination {j} is not monotone")
            if min_hops(topo, self, k, j) == math.inf:
                raise FlowError(f"flow {k}: destination {j} unreachable through commissioned nodes")
        if self.path is not None:
            self._validate_path(topo)

    def _validate_path(self, topo: NetworkTopology) -> None:
        k = self.source
        if self.kind != "unicast":
            raise FlowError(f"flow {k}: fixed paths are only supported for unicast flows")
        (dest,) = self.destinations
        node = k
        visited = {k}
        for a, b in self.path:
            if a != node or not topo.has_edge(a, b):
                raise FlowError(f"flow {k}: path hop ({a},{b}) is not a connected edge")
            if b in visited:
                raise FlowError(f"flow {k}: path revisits node {b}")
            if b != dest and b not in self.commissioned:
                raise FlowError(f"flow {k}: path relay {b} is not commissioned")
            visited.add(b)
            node = b
        if node != dest:
            raise FlowError(f"flow {k}: path does not end at destination {dest}")

    def to_dict(self) -> dict:
        d = {
            "source": self.source,
            "destinations": sorted(self.destinations),
            "commissioned": sorted(self.commissioned),
            "kind": self.kind,
            "weights": {str(j): w for j, w in self.weights.items()},
            "costs": {str(j): c.to_dict() for j, c in self.costs.items()},
        }
        if self.path is not None:
            d["path"] = [list(h) for h in self.path]
        return d


def unicast_flow(path_nodes: Sequence[int], weight: float = 1.0,
                 cost: CostFunction | None = None, fixed_path: bool = True) -> Flow:
    """Unicast flow along ``path_nodes`` (source first, destination last)."""
    k, dest = path_nodes[0], path_nodes[-1]
    hops = tuple(zip(path_nodes[:-1], path_nodes[1:]))
    return Flow(
        source=k,
        destinations=frozenset({dest}),
        commissioned=frozenset(path_nodes[1:-1]),
        kind="unicast",
        weights={dest: weight},
        costs={dest: cost} if cost is not None else {},
        path=hops if fixed_path else None,
    )


def broadcast_flow(source: int, node_count: int, weights: Mapping[int, float] | None = None,
                   costs: Mapping[int, CostFunction] | None = None) -> Flow:
    others = frozenset(n for n in range(1, node_count + 1) if n != source)
    return Flow(source=source, destinations=others, commissioned=others, kind="broadcast",
                weights=dict(weights or {}), costs=dict(costs or {}))


def flow_from_dict(d: Mapping) -> Flow:
    from .costs import cost_from_dict

    dests = frozenset(int(j) for j in d["destinations"])
    kind = d.get("kind")
    if kind is None:
        kind = "unicast" if len(dests) == 1 else "multicast"
    return Flow(
        source=int(d["source"]),
        destinations=dests,
        commissioned=frozenset(int(j) for j in d.get("commissioned", ())),
        kind=kind,
        weights={int(j): float(w) for j, w in d.get("weights", {}).items()},
        costs={int(j): cost_from_dict(c) for j, c in d.get("costs", {}).items()},
        path=tuple(tuple(h) for h in d["path"]) if d.get("path") else None,
    )


# --------------------------------------------------------------------------
# action spaces


def candidate_transmissions(topo: NetworkTopology, flow: Flow) -> list[Transmission]:
    """Role-valid transmissions of ``flow``; restricted to its path when fixed."""
    k = flow.source
    if flow.path is not None:
        return [Transmission(a, b, k) for a, b in flow.path]
    out = []
    receivers = flow.receivers
    for i in sorted(flow.forwarders):
        for j in topo.neighbors(i):
            if j in receivers:
                out.append(Transmission(i, j, k))
    return out


@dataclass(frozen=True)
class ActionSpace:
    actions: tuple
    provenance: str = "generated"

    def __len__(self):
        return len(self.actions)

    def __getitem__(self, idx):
        return self.actions[idx]

    def __iter__(self):
        return iter(self.actions)

    def index(self, action) -> int:
        key = tuple(sorted(action))
        for m, a in enumerate(self.actions):
            if a == key:
                return m
        raise KeyError(action)


def _check_action(topo: NetworkTopology, flows: Mapping[int, Flow], action) -> None:
    used = set()
    for tx in action:
        i, j, k = tx
        if k not in flows:
            raise ActionSpaceError(f"transmission {tx} references unknown flow {k}")
        if not topo.has_edge(i, j):
            raise ActionSpaceError(f"transmission {tx} uses a missing edge")
        f = flows[k]
        if i not in f.forwarders:
            raise ActionSpaceError(f"transmission {tx}: sender {i} cannot forward flow {k}")
        if j not in f.receivers:
            raise ActionSpaceError(f"transmission {tx}: receiver {j} is not in C_k ∪ D_k")
        e = topo.edge_index(i, j)
        if e in used:
            raise ActionSpaceError(f"action {sorted(action)} uses edge ({i},{j}) twice")
        used.add(e)


def build_action_space(topo: NetworkTopology, flows: Sequence[Flow], interference) -> ActionSpace:
    """Enumerate the interference-free actions.

    ``interference`` is ``"single_transmitter"``, ``"line_odd_even"`` or a dict
    with ``model`` set to one of those or ``"explicit"`` (with ``actions``: a list
    of lists of ``{"from", "to", "flow"}`` or ``[i, j, k]`` items). For
    ``single_transmitter`` the option ``node_broadcast`` makes each action a node
    sending one flow on all of its valid adjacent edges at once.
    """
    if isinstance(interference, str):
        interference = {"model": interference}
    model = interference.get("model")
    by_id = {f.source: f for f in flows}
    if len(by_id) != len(flows):
        raise ActionSpaceError("flow ids (source nodes) must be unique")

    if model == "explicit":
        actions = []
        for raw in interference.get("actions", []):
            act = []
            for tx in raw:
                if isinstance(tx, Mapping):
                    act.append(Transmission(int(tx["from"]), int(tx["to"]), int(tx["flow"])))
                else:
                    act.append(Transmission(*map(int, tx)))
            actions.append(tuple(sorted(act)))
        provenance = "explicit"
    elif model == "single_transmitter":
        actions = []
        per_node: dict[int, list[Transmission]] = {}
        for f in sorted(flows, key=lambda f: f.source):
            for tx in candidate_transmissions(topo, f):
                per_node.setdefault(tx.sender, []).append(tx)
        for i in sorted(per_node):
            txs = sorted(per_node[i], key=lambda t: (t.flow, t.receiver))
            if interference.get("node_broadcast"):
                for _, group in itertools.groupby(txs, key=lambda t: t.flow):
                    actions.append(tuple(group))
            else:
                actions.extend((tx,) for tx in txs)
        provenance = "generated"
    elif model == "line_odd_even":
        for e in topo.edges:
            if e.v != e.u + 1:
                raise ActionSpaceError("line_odd_even needs a line topology 1-2-...-N")
        if len(topo.edges) != topo.node_count - 1:
            raise ActionSpaceError("line_odd_even needs a line topology 1-2-...-N")
        cands = set()
        for f in flows:
            cands.update(candidate_transmissions(topo, f))
        actions = []
        for parity in (1, 0):
            options = []
            for i in range(1, topo.node_count):
                if i % 2 != parity:
                    continue
                opts = sorted(tx for tx in cands if tx.sender == i and tx.receiver == i + 1)
                if opts:
                    options.append(opts)
            if options:
                actions.extend(tuple(sorted(c)) for c in itertools.product(*options))
        provenance = "generated"
    else:
        raise ActionSpaceError(f"unknown interference model {model!r}")

    out = [()]
    for a in actions:
        _check_action(topo, by_id, a)
        if a and a not in out:
            out.append(a)
    return ActionSpace(tuple(out), provenance)


# --------------------------------------------------------------------------
# link states and hop counts


def sample_link_states(topo: NetworkTopology, rng: np.random.Generator, slots: int | None = None):
    """Bernoulli(gamma) success indicators per edge; shape ``(slots, E)`` if ``slots``."""
    n = 1 if slots is None else slots
    states = rng.random((n, len(topo.edges))) < topo.gammas
    return states[0] if slots is None else states


def min_hops(topo: NetworkTopology, flow: Flow, i: int, j: int) -> float:
    """BFS hop count from ``i`` to ``j`` relaying only through flow forwarders."""
    return constrained_min_hops(topo, flow, i, j, None)


def constrained_min_hops(topo: NetworkTopology, flow: Flow, i: int, j: int, first_hops) -> float:
    """Fewest hops from ``i`` to ``j`` when the first hop must use an edge in ``first_hops``.

    ``first_hops`` is an iterable of edges ``(i, x)`` adjacent to ``i`` (or None
    for any). Intermediate nodes must be able to forward the flow
    (``{k} ∪ C_k``); the final node may be any node of the flow. Returns
    ``math.inf`` when unreachable.
    """
    if i == j:
        return 0
    allowed = flow.nodes
    relays = flow.forwarders
    if first_hops is None:
        starts = [x for x in topo.neighbors(i) if x in allowed]
    else:
        starts = []
        for a, b in first_hops:
            x = b if a == i else a
            if (a == i or b == i) and topo.has_edge(a, b) and x in allowed:
                starts.append(x)
    dist = {i: 0}
    q = deque()
    for x in starts:
        if x not in dist:
            dist[x] = 1
            q.append(x)
    while q:
        n = q.popleft()
        if n == j:
            return dist[n]
        if n not in relays:
            continue
        for m in topo.neighbors(n):
            if m in allowed and m not in dist:
                dist[m] = dist[n] + 1
                q.append(m)
    return math.inf


# --------------------------------------------------------------------------
# compiled instance


class NetworkInstance:
    """A topology, its flows and action space, compiled to flat index tables.

    Ages are tracked per *pair* ``(k, node)`` for every node in ``{k} ∪ C_k ∪ D_k``.
    ``dest_pairs`` lists the pair indices of ``(k, j)``, ``j ∈ D_k``, ordered by
    flow then destination; all per-destination arrays follow that order.
    """

    def __init__(self, topology: NetworkTopology, flows: Sequence[Flow], action_space: ActionSpace,
                 name: str = ""):
        self.topology = validate_topology(topology, flows)
        self.flows = tuple(sorted(flows, key=lambda f: f.source))
        self.flow_by_id = {f.source: f for f in self.flows}
        self.action_space = action_space
        self.name = name

        self.pairs: list[tuple[int, int]] = []
        for f in self.flows:
            self.pairs.append((f.source, f.source))
            self.pairs.extend((f.source, n) for n in sorted(f.receivers))
        self.pair_index = {p: i for i, p in enumerate(self.pairs)}
        self.source_pairs = [self.pair_index[(f.source, f.source)] for f in self.flows]

        self.dest_keys = [(f.source, j) for f in self.flows for j in sorted(f.destinations)]
        self.dest_pairs = [self.pair_index[p] for p in self.dest_keys]
        self.dest_weights = np.array([self.flow_by_id[k].weights[j] for k, j in self.dest_keys])
        self.dest_costs = [self.flow_by_id[k].costs[j] for k, j in self.dest_keys]

        gam = topology.gammas
        self.compiled_actions = []
        for m, action in enumerate(action_space):
            _check_action(self.topology, self.flow_by_id, action)
            comp = []
            for i, j, k in action:
                e = self.topology.edge_index(i, j)
                comp.append((self.pair_index[(k, i)], self.pair_index[(k, j)], e, float(gam[e])))
            self.compiled_actions.append(tuple(comp))

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @property
    def n_actions(self) -> int:
        return len(self.action_space)

    def ages_dict(self, ages) -> dict:
        return {p: ages[i] for i, p in enumerate(self.pairs)}

    def is_single_hop(self) -> bool:
        """Every non-idle action sends sources' updates directly to destinations."""
        for comp, action in zip(self.compiled_actions, self.action_space):
            for i, j, k in action:
                if i != k or j not in self.flow_by_id[k].destinations:
                    return False
        return True

    def __repr__(self):
        return (f"NetworkInstance({self.name!r}, nodes={self.topology.node_count}, "
                f"flows={len(self.flows)}, actions={self.n_actions})")
