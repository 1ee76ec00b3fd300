import heapq
import numpy as np
from pysltc.errors import UnreachableDestination, NetworkValidationError
from pysltc.classes.network import Route, Skim


def shortest_path_tree(net, origin):
    """
    Minimum travel time paths from origin to every reachable node.

    Among equal-cost paths the lexicographically smallest link id sequence wins.
    Trees are cached on the network object.

    :param net: RoadNetwork.
    :param origin: origin node id.
    :return: dict node id -> (travel time s, length m, tuple of link ids).
    """
    tree = net._trees.get(origin)
    if tree is not None:
        return tree
    if origin not in net.nodes:
        raise NetworkValidationError("unknown node %s" % origin)
    tree = dict()
    best = {origin: (0.0, ())}
    heap = [(0.0, (), origin, 0.0)]
    while heap:
        cost, path, node, length = heapq.heappop(heap)
        if node in tree:
            continue
        tree[node] = (cost, length, path)
        for link in net.out_links[node]:
            head = link.to_node
            if head in tree:
                continue
            label = (cost + link.time, path + (link.id,))
            current = best.get(head)
            if current is None or label < current:
                best[head] = label
                heapq.heappush(heap, (label[0], label[1], head, length + link.length))
    net._trees[origin] = tree
    return tree


def shortest_path(net, origin, dest):
    """
    Minimum travel time route leg between two nodes.

    :param net: RoadNetwork.
    :param origin: origin node id.
    :param dest: destination node id.
    :return: tuple (list of link ids, travel time s).
    """
    if dest not in net.nodes:
        raise NetworkValidationError("unknown node %s" % dest)
    tree = shortest_path_tree(net, origin)
    try:
        cost, _, path = tree[dest]
    except KeyError:
        raise UnreachableDestination("node %s unreachable from node %s" % (dest, origin))
    return list(path), cost


def _skim(net, ids, nodes, column):
    values = np.zeros((len(ids), len(ids)))
    for i, a in enumerate(nodes):
        tree = shortest_path_tree(net, a)
        for j, b in enumerate(nodes):
            try:
                values[i, j] = tree[b][column]
            except KeyError:
                raise UnreachableDestination("node %s unreachable from node %s" % (b, a))
    return Skim(ids, values)


def travel_time_skim(net, level="zone", nodes=None):
    """
    Travel time matrix in seconds.

    :param net: RoadNetwork.
    :param level: (optional) "zone" (zone representative nodes) or "node", by default "zone".
    :param nodes: (optional) node subset for the node level, by default all nodes.
    :return: Skim.
    """
    if level == "zone":
        ids = net.zone_ids
        return _skim(net, ids, [net.representative(z) for z in ids], 0)
    if level == "node":
        ids = sorted(net.nodes) if nodes is None else sorted(set(nodes))
        return _skim(net, ids, ids, 0)
    raise ValueError("unsupported skim level %s" % level)


def distance_skim(net, level="node", nodes=None):
    """
    Network distance in kilometers along minimum travel time paths.
    """
    if level == "zone":
        ids = net.zone_ids
        s = _skim(net, ids, [net.representative(z) for z in ids], 1)
    elif level == "node":
        ids = sorted(net.nodes) if nodes is None else sorted(set(nodes))
        s = _skim(net, ids, ids, 1)
    else:
        raise ValueError("unsupported skim level %s" % level)
    s.values = s.values / 1000.0
    return s


def screenline_owner(screenlines):
    """
    :param screenlines: list of Screenline or ready dict link id -> screenline id.
    :return: dict link id -> screenline id.
    """
    if isinstance(screenlines, dict):
        return screenlines
    return {l: s.id for s in screenlines for l in s.links}


def crossings(route, screenlines):
    """
    Screenlines crossed by a route, in travel order with multiplicity.

    :param route: Route.
    :param screenlines: list of Screenline or dict link id -> screenline id.
    :return: list of screenline ids.
    """
    owner = screenline_owner(screenlines)
    return [owner[l] for l in route.links if l in owner]


def route_tour(net, tour):
    """
    Route of a node tour: one shortest path leg per consecutive stop pair.
    """
    stops = tour.node_sequence()
    return Route([shortest_path(net, stops[i], stops[i + 1])[0] for i in range(len(stops) - 1)])
