"""Shortest expected-delay routing over a network of signalized intersections.

An edge ``u -> v`` costs the mean waiting time at ``v`` (its arrival node)
plus the travel time ``length / speed``.  In ``aware`` mode the waiting time
uses each node's real communication probability; ``baseline`` mode forces it
to zero.  Unstable intersections cost ``inf`` and are never routed through.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Sequence

from .analytics import IntersectionSpec, SpecError, waiting_time

__all__ = [
    "Mode",
    "NodeSpec",
    "EdgeSpec",
    "TransportNetwork",
    "RouteResult",
    "ModeComparison",
    "UnknownNode",
    "node_waiting_time",
    "edge_weight",
    "shortest_delay_route",
    "compare_modes",
]

NodeId = Hashable


class UnknownNode(KeyError):
    pass


class Mode(str, Enum):
    AWARE = "aware"
    BASELINE = "baseline"

    @classmethod
    def parse(cls, value) -> "Mode":
        try:
            return cls(value) if not isinstance(value, Mode) else value
        except ValueError:
            raise SpecError(f"unknown routing mode {value!r}") from None


@dataclass(frozen=True)
class NodeSpec:
    id: NodeId
    intersection: IntersectionSpec | None = None


@dataclass(frozen=True)
class EdgeSpec:
    source: NodeId
    target: NodeId
    length: float = 0.0
    speed: float | None = None

    def __post_init__(self):
        if not (self.length >= 0 and math.isfinite(self.length)):
            raise SpecError(f"edge {self.source}->{self.target}: length must be finite and >= 0")
        if self.speed is not None and not (self.speed > 0 and math.isfinite(self.speed)):
            raise SpecError(f"edge {self.source}->{self.target}: speed must be positive")


def node_waiting_time(node: NodeSpec, mode: Mode | str = Mode.AWARE) -> float:
    """Mean waiting time charged for entering ``node``; ``inf`` if unstable."""
    mode = Mode.parse(mode)
    if node.intersection is None:
        return 0.0
    spec = node.intersection
    if mode is Mode.BASELINE:
        spec = spec.with_comm(0.0)
    return waiting_time(spec).W


class TransportNetwork:
    """Immutable directed road graph.  Node waiting times are computed once."""

    def __init__(self, nodes: Iterable[NodeSpec], edges: Iterable[EdgeSpec], speed: float = 1.0):
        self.nodes: tuple[NodeSpec, ...] = tuple(nodes)
        self.edges: tuple[EdgeSpec, ...] = tuple(edges)
        self.speed = float(speed)
        if not (self.speed > 0 and math.isfinite(self.speed)):
            raise SpecError("network speed must be positive")
        self._by_id: dict[NodeId, NodeSpec] = {}
        for n in self.nodes:
            if n.id in self._by_id:
                raise SpecError(f"duplicate node id {n.id!r}")
            self._by_id[n.id] = n
        kinds = {type(n.id) for n in self.nodes}
        if len(kinds) > 1:
            raise SpecError("node ids must all share one type so paths can be ordered")
        self._out: dict[NodeId, list[EdgeSpec]] = {n.id: [] for n in self.nodes}
        seen = set()
        for e in self.edges:
            for end in (e.source, e.target):
                if end not in self._by_id:
                    raise SpecError(f"edge {e.source!r}->{e.target!r} references unknown node {end!r}")
            if (e.source, e.target) in seen:
                raise SpecError(f"duplicate edge {e.source!r}->{e.target!r}")
            seen.add((e.source, e.target))
            self._out[e.source].append(e)
        self._wait = {
            mode: {n.id: node_waiting_time(n, mode) for n in self.nodes} for mode in Mode
        }

    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def M(self) -> int:
        return len(self.edges)

    def node(self, node_id: NodeId) -> NodeSpec:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def out_edges(self, node_id: NodeId) -> Sequence[EdgeSpec]:
        return self._out[node_id]

    def edge(self, source: NodeId, target: NodeId) -> EdgeSpec:
        for e in self._out.get(source, ()):
            if e.target == target:
                return e
        raise KeyError((source, target))

    def waiting(self, node_id: NodeId, mode: Mode | str) -> float:
        return self._wait[Mode.parse(mode)][node_id]

    def travel_time(self, e: EdgeSpec) -> float:
        return e.length / (e.speed if e.speed is not None else self.speed)

    def with_node(self, node: NodeSpec) -> "TransportNetwork":
        """Copy with one node replaced (used by parameter sweeps)."""
        nodes = [node if n.id == node.id else n for n in self.nodes]
        return TransportNetwork(nodes, self.edges, self.speed)

    def __eq__(self, other):
        if not isinstance(other, TransportNetwork):
            return NotImplemented
        return (self.nodes, self.edges, self.speed) == (other.nodes, other.edges, other.speed)

    def __hash__(self):
        return hash((self.nodes, self.edges, self.speed))

    def __repr__(self):
        return f"TransportNetwork(N={self.N}, M={self.M}, speed={self.speed})"


def edge_weight(net: TransportNetwork, e: EdgeSpec, mode: Mode | str = Mode.AWARE) -> float:
    return net.waiting(e.target, mode) + net.travel_time(e)


@dataclass(frozen=True)
class RouteResult:
    source: NodeId
    target: NodeId
    mode: Mode
    path: tuple[NodeId, ...]
    total_delay: float
    # (from, to, waiting at arrival node, travel time) per traversed edge
    breakdown: tuple[tuple[NodeId, NodeId, float, float], ...] = field(default=())

    @property
    def reachable(self) -> bool:
        return bool(self.path)


def _check(net: TransportNetwork, *ids):
    for i in ids:
        net.node(i)


def route_cost(net: TransportNetwork, path: Sequence[NodeId], mode: Mode | str) -> float:
    """Total weight of ``path`` summed left to right."""
    cost = 0.0
    for u, v in zip(path, path[1:]):
        cost = cost + edge_weight(net, net.edge(u, v), mode)
    return cost


def _breakdown(net, path, mode):
    return tuple((u, v, net.waiting(v, mode), net.travel_time(net.edge(u, v)))
                 for u, v in zip(path, path[1:]))


def shortest_delay_route(net: TransportNetwork, src: NodeId, dst: NodeId,
                         mode: Mode | str = Mode.AWARE) -> RouteResult:
    """Dijkstra over (cost, path) labels.

    Ordering labels by cost and then by the node-id sequence makes ties
    resolve to the lexicographically smallest path; extending a label never
    decreases it, so the first label popped for a node is final.
    """
    mode = Mode.parse(mode)
    _check(net, src, dst)
    heap: list[tuple[float, tuple]] = [(0.0, (src,))]
    best: dict[NodeId, tuple[float, tuple]] = {src: (0.0, (src,))}
    done: set = set()
    while heap:
        cost, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done.add(u)
        if u == dst:
            return RouteResult(src, dst, mode, path, cost, _breakdown(net, path, mode))
        for e in net.out_edges(u):
            v = e.target
            if v in done:
                continue
            w = edge_weight(net, e, mode)
            if math.isinf(w):
                continue
            label = (cost + w, path + (v,))
            if v not in best or label < best[v]:
                best[v] = label
                heapq.heappush(heap, label)
    return RouteResult(src, dst, mode, (), math.inf, ())


@dataclass(frozen=True)
class ModeComparison:
    aware: RouteResult
    baseline: RouteResult
    baseline_true_delay: float   # baseline path re-costed with aware weights

    @property
    def gap(self) -> float | None:
        """Excess delay of the baseline choice; ``None`` when either route is unreachable."""
        if not (self.aware.reachable and self.baseline.reachable):
            return None
        return self.baseline_true_delay - self.aware.total_delay


def compare_modes(net: TransportNetwork, src: NodeId, dst: NodeId) -> ModeComparison:
    aware = shortest_delay_route(net, src, dst, Mode.AWARE)
    base = shortest_delay_route(net, src, dst, Mode.BASELINE)
    true = route_cost(net, base.path, Mode.AWARE) if base.reachable else math.inf
    return ModeComparison(aware, base, true)
