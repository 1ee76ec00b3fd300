from pysltc.functions.network import *
from pysltc.classes.network import RoadNetwork, Route, Screenline
from pysltc.classes.demand import NodeTour
from pysltc.errors import UnreachableDestination, NetworkValidationError
from pysltc.functions.tools import substream
import networkx as nx
import pytest


def test_shortest_path(diamond):
    assert shortest_path(diamond, 1, 4) == ([1, 2], 4.0)
    assert shortest_path(diamond, 4, 1) == ([6, 5], 4.0)
    assert shortest_path(diamond, 1, 3) == ([3], 3.0)
    assert shortest_path(diamond, 2, 2) == ([], 0.0)
    with pytest.raises(NetworkValidationError):
        shortest_path(diamond, 1, 99)


def test_shortest_path_equal_cost_tie():
    # both paths cost 4, lower link id sequence wins
    nodes = {1: (0, 0, 1), 2: (1, 1, 1), 3: (1, -1, 1), 4: (2, 0, 1)}
    links = [(1, 1, 3, 10, 2.0), (2, 3, 4, 10, 2.0), (3, 1, 2, 10, 2.0), (4, 2, 4, 10, 2.0)]
    net = RoadNetwork(nodes, links)
    assert shortest_path(net, 1, 4) == ([1, 2], 4.0)


def test_unreachable():
    nodes = {1: (0, 0, 1), 2: (1, 0, 1)}
    net = RoadNetwork(nodes, [(1, 1, 2, 10, 1.0)])
    assert shortest_path(net, 1, 2) == ([1], 1.0)
    with pytest.raises(UnreachableDestination):
        shortest_path(net, 2, 1)
    with pytest.raises(UnreachableDestination):
        travel_time_skim(net, "node")
    with pytest.raises(NetworkValidationError):
        net.validate()


def test_shortest_path_against_enumeration():
    rng = substream(11, 0)
    for trial in range(5):
        n = 7
        nodes = {i: (float(i), 0.0, 1) for i in range(1, n + 1)}
        links, link_id = [], 1
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                if a != b and rng.random() < 0.4:
                    links.append((link_id, a, b, 100.0, float(rng.integers(1, 20))))
                    link_id += 1
        net = RoadNetwork(nodes, links)
        g = nx.DiGraph()
        for l in net.links.values():
            g.add_edge(l.from_node, l.to_node, time=l.time)
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                if a == b or a not in g or b not in g:
                    continue
                paths = list(nx.all_simple_paths(g, a, b))
                if not paths:
                    with pytest.raises(UnreachableDestination):
                        shortest_path(net, a, b)
                    continue
                best = min(sum(g[p[i]][p[i + 1]]["time"] for i in range(len(p) - 1)) for p in paths)
                assert shortest_path(net, a, b)[1] == pytest.approx(best)


def test_skims(line3, diamond):
    skim = travel_time_skim(line3)
    assert skim.ids == [1, 2, 3]
    assert skim[(1, 3)] == 12.0
    assert skim[(3, 1)] == 12.0
    assert skim[(2, 2)] == 0.0
    assert distance_skim(line3, "zone")[(1, 3)] == 2.0
    assert distance_skim(line3)[(1, 2)] == 1.0

    node = travel_time_skim(diamond, "node")
    assert len(node) == 4
    for a in node.ids:
        for b in node.ids:
            for c in node.ids:
                assert node[(a, c)] <= node[(a, b)] + node[(b, c)] + 1e-9
    sub = travel_time_skim(diamond, "node", [4, 1])
    assert sub.ids == [1, 4]
    assert sub[(1, 4)] == 4.0
    with pytest.raises(ValueError):
        travel_time_skim(diamond, "link")


def test_crossings():
    screenlines = [Screenline("A", [1, 2], 10), Screenline("B", [3], 5)]
    route = Route([[1, 7, 3], [8, 1]])
    assert crossings(route, screenlines) == ["A", "B", "A"]
    assert crossings(Route([[7, 8]]), screenlines) == []
    assert crossings(route, screenline_owner(screenlines)) == ["A", "B", "A"]


def test_route_tour(diamond):
    tour = NodeTour(1, 10, 1, [(4, [5]), (3, [6])], 100)
    route = route_tour(diamond, tour)
    assert route.legs == [[1, 2], [8], [7]]
    assert route.validate(diamond, tour.node_sequence())
    # crossings of the whole route equal crossings of its legs in sequence
    screenlines = [Screenline("S", [2, 7], 1)]
    per_leg = [s for leg in route.legs for s in crossings(Route([leg]), screenlines)]
    assert crossings(route, screenlines) == per_leg == ["S", "S"]
    with pytest.raises(NetworkValidationError):
        Route([[2]]).validate(diamond, [1, 4])
