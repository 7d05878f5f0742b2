import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from holblock import IntersectionSpec, SpecError
from holblock.routing import (
    EdgeSpec,
    Mode,
    NodeSpec,
    TransportNetwork,
    UnknownNode,
    compare_modes,
    edge_weight,
    node_waiting_time,
    route_cost,
    shortest_delay_route,
)

from conftest import model1

THRESHOLD = 15 / 41.6  # p_t at which the node-2 waiting time reaches 22.5


def diamond(p_t2=0.7):
    n2 = IntersectionSpec.build("I", (0.4 / 3,) * 3, (1 / 3,) * 3, p_t2)
    n3 = IntersectionSpec.build("I", (0.1,) * 3, (1 / 3,) * 3, 0.0)
    nodes = [NodeSpec(1), NodeSpec(2, n2), NodeSpec(3, n3), NodeSpec(4)]
    edges = [EdgeSpec(1, 2), EdgeSpec(1, 3), EdgeSpec(2, 4), EdgeSpec(3, 4)]
    return TransportNetwork(nodes, edges)


def brute_force(net, src, dst, mode):
    best = (math.inf, ())

    def walk(path, cost):
        nonlocal best
        u = path[-1]
        if u == dst:
            best = min(best, (cost, path))
            return
        for e in net.out_edges(u):
            if e.target in path:
                continue
            w = edge_weight(net, e, mode)
            if math.isinf(w):
                continue
            walk(path + (e.target,), cost + w)

    walk((src,), 0.0)
    return best


def random_network(rnd, n_nodes):
    nodes = []
    for i in range(n_nodes):
        kind = rnd.random()
        if kind < 0.25:
            nodes.append(NodeSpec(i))
            continue
        if kind < 0.7:
            spec = IntersectionSpec.build(
                "I", tuple(rnd.choice((0.0, 0.05, 0.1, 0.15)) for _ in range(3)),
                (1 / 3,) * 3, rnd.choice((0.0, 0.25, 0.5, 1.0)))
        else:
            spec = IntersectionSpec.build(
                "II", tuple(rnd.choice((0.05, 0.1, 0.2)) for _ in range(2)),
                (0.5, 0.5), rnd.choice((0.0, 0.5, 1.0)))
        nodes.append(NodeSpec(i, spec))
    edges = []
    for u in range(n_nodes):
        for v in range(n_nodes):
            if u != v and rnd.random() < 0.35:
                # small integer lengths make exact ties common
                edges.append(EdgeSpec(u, v, length=float(rnd.randint(0, 3))))
    return TransportNetwork(nodes, edges, speed=rnd.choice((1.0, 2.0)))


class TestNodeWaiting:
    def test_examples(self):
        heavy = NodeSpec(3, model1())
        assert node_waiting_time(heavy, "aware") == pytest.approx(22.5, rel=1e-9)
        assert node_waiting_time(heavy, "baseline") == pytest.approx(22.5, rel=1e-9)
        n2 = diamond().node(2)
        assert node_waiting_time(n2, Mode.AWARE) == pytest.approx(26 / 9, rel=1e-9)
        assert math.isinf(node_waiting_time(n2, Mode.BASELINE))
        assert node_waiting_time(NodeSpec("sink")) == 0.0

    def test_edge_weight(self):
        net = TransportNetwork([NodeSpec("a"), NodeSpec("b")], [EdgeSpec("a", "b", 10, speed=2)])
        assert edge_weight(net, net.edge("a", "b")) == 5.0
        net = TransportNetwork([NodeSpec("a"), NodeSpec("b", model1())], [EdgeSpec("a", "b")])
        assert edge_weight(net, net.edge("a", "b")) == pytest.approx(22.5)
        net = TransportNetwork([NodeSpec("a"), NodeSpec("b", model1(rates=(0.2,) * 3))],
                               [EdgeSpec("a", "b")])
        assert math.isinf(edge_weight(net, net.edge("a", "b")))


class TestNetwork:
    def test_sizes(self):
        net = diamond()
        assert (net.N, net.M) == (4, 4)

    @pytest.mark.parametrize("nodes, edges", [
        ([NodeSpec(1), NodeSpec(1)], []),
        ([NodeSpec(1)], [EdgeSpec(1, 2)]),
        ([NodeSpec(1), NodeSpec(2)], [EdgeSpec(1, 2), EdgeSpec(1, 2)]),
        ([NodeSpec(1), NodeSpec("b")], []),
    ])
    def test_invalid(self, nodes, edges):
        with pytest.raises(SpecError):
            TransportNetwork(nodes, edges)

    def test_bad_edge_values(self):
        with pytest.raises(SpecError):
            EdgeSpec(1, 2, length=-1)
        with pytest.raises(SpecError):
            EdgeSpec(1, 2, speed=0)

    def test_unknown_node(self):
        with pytest.raises(UnknownNode):
            shortest_delay_route(diamond(), 1, 99)

    def test_weights_nonnegative(self):
        rnd = random.Random(3)
        for _ in range(20):
            net = random_network(rnd, 6)
            for e in net.edges:
                for mode in Mode:
                    assert edge_weight(net, e, mode) >= 0


class TestRoutes:
    def test_diamond(self):
        net = diamond()
        aware = shortest_delay_route(net, 1, 4, "aware")
        base = shortest_delay_route(net, 1, 4, "baseline")
        assert aware.path == (1, 2, 4) and aware.total_delay == pytest.approx(26 / 9, rel=1e-9)
        assert base.path == (1, 3, 4) and base.total_delay == pytest.approx(22.5, rel=1e-9)
        assert aware.breakdown[0][:2] == (1, 2)
        assert sum(w + t for _, _, w, t in aware.breakdown) == pytest.approx(aware.total_delay)

    def test_compare_diamond(self):
        cmp = compare_modes(diamond(), 1, 4)
        assert cmp.baseline_true_delay == pytest.approx(22.5)
        assert cmp.gap == pytest.approx(22.5 - 26 / 9, rel=1e-9)

    def test_same_endpoint(self):
        r = shortest_delay_route(diamond(), 2, 2)
        assert r.path == (2,) and r.total_delay == 0.0 and r.reachable

    def test_unstable_head_unreachable(self):
        net = TransportNetwork([NodeSpec(1), NodeSpec(2, model1(rates=(0.2,) * 3))], [EdgeSpec(1, 2)])
        r = shortest_delay_route(net, 1, 2)
        assert not r.reachable and math.isinf(r.total_delay)
        cmp = compare_modes(net, 1, 2)
        assert cmp.gap is None

    def test_no_edges_unreachable(self):
        r = shortest_delay_route(diamond(), 4, 1)
        assert r.path == () and not r.reachable

    def test_lexicographic_tie(self):
        nodes = [NodeSpec(i) for i in range(1, 5)]
        edges = [EdgeSpec(1, 3), EdgeSpec(1, 2), EdgeSpec(3, 4), EdgeSpec(2, 4)]
        assert shortest_delay_route(TransportNetwork(nodes, edges), 1, 4).path == (1, 2, 4)

    def test_string_ids(self):
        nodes = [NodeSpec("src"), NodeSpec("mid", model1(p_t=1.0)), NodeSpec("dst")]
        edges = [EdgeSpec("src", "mid", 4.0), EdgeSpec("mid", "dst", 2.0)]
        r = shortest_delay_route(TransportNetwork(nodes, edges), "src", "dst")
        assert r.path == ("src", "mid", "dst")
        assert r.total_delay == pytest.approx(6 + 0.3 / 1.4)

    def test_mode_coincidence(self):
        rnd = random.Random(11)
        for _ in range(30):
            net = random_network(rnd, 6)
            zero = TransportNetwork(
                [n if n.intersection is None else NodeSpec(n.id, n.intersection.with_comm(0.0))
                 for n in net.nodes], net.edges, net.speed)
            cmp = compare_modes(zero, 0, 5)
            assert cmp.aware.path == cmp.baseline.path
            assert cmp.aware.total_delay == cmp.baseline.total_delay
            if cmp.gap is not None:
                assert cmp.gap == 0.0

    def test_dominance(self):
        rnd = random.Random(5)
        for _ in range(100):
            net = random_network(rnd, 7)
            cmp = compare_modes(net, 0, 6)
            if cmp.aware.reachable:
                assert cmp.aware.total_delay <= cmp.baseline_true_delay
            else:
                assert math.isinf(cmp.baseline_true_delay)


@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_matches_brute_force(seed, n):
    rnd = random.Random(seed)
    net = random_network(rnd, n)
    src, dst = rnd.randrange(n), rnd.randrange(n)
    for mode in Mode:
        got = shortest_delay_route(net, src, dst, mode)
        cost, path = brute_force(net, src, dst, mode)
        assert got.path == path
        assert got.total_delay == cost
        if path:
            assert route_cost(net, path, mode) == cost


def test_crossover():
    grid = [k / 1000 for k in range(1001)]
    results = [compare_modes(diamond(p), 1, 4) for p in grid]
    delays = [r.aware.total_delay for r in results]
    assert all(a >= b for a, b in zip(delays, delays[1:]))
    paths = [r.aware.path for r in results]
    switches = [i for i in range(1, len(paths)) if paths[i] != paths[i - 1]]
    assert len(switches) == 1
    k = switches[0]
    assert paths[0] == (1, 3, 4) and paths[-1] == (1, 2, 4)
    assert grid[k - 1] <= THRESHOLD <= grid[k]
    assert all(r.aware.total_delay <= r.baseline_true_delay for r in results)


def test_threshold_value():
    assert THRESHOLD == pytest.approx(0.360577, abs=1e-6)
    w = node_waiting_time(diamond(THRESHOLD).node(2), "aware")
    assert w == pytest.approx(22.5, rel=1e-9)
