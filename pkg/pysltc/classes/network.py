import networkx as nx
import numpy as np
from pysltc.errors import NetworkValidationError
from pysltc.functions.tools import read_table, write_table


class Link():
    __slots__ = ("id", "from_node", "to_node", "length", "time")

    def __init__(self, link_id, from_node, to_node, length, time):
        self.id = int(link_id)
        self.from_node = int(from_node)
        self.to_node = int(to_node)
        self.length = float(length)
        self.time = float(time)

    def __repr__(self):
        return "Link(%s: %s->%s)" % (self.id, self.from_node, self.to_node)


class RoadNetwork():
    """
    Directed road graph.

    :param nodes: dict node id -> (x, y, zone id), coordinates in meters.
    :param links: iterable of (link id, from node, to node, length m, travel time s).
    :param zones: (optional) dict zone id -> zone area in square meters. Zones without
                  explicit area get the bounding box area of their nodes (at least 1 km²).
    """
    def __init__(self, nodes, links, zones=None):
        self.nodes = {int(n): (float(v[0]), float(v[1]), int(v[2])) for n, v in nodes.items()}
        self.links = dict()
        for l in links:
            link = l if isinstance(l, Link) else Link(*l)
            if link.id in self.links:
                raise NetworkValidationError("duplicate link id %s" % link.id)
            self.links[link.id] = link
        self.zone_nodes = dict()
        for node_id in sorted(self.nodes):
            self.zone_nodes.setdefault(self.nodes[node_id][2], []).append(node_id)
        self.zones = dict()
        for zone_id, members in self.zone_nodes.items():
            if zones is not None and zone_id in zones:
                self.zones[zone_id] = float(zones[zone_id])
            else:
                xs = [self.nodes[n][0] for n in members]
                ys = [self.nodes[n][1] for n in members]
                self.zones[zone_id] = max((max(xs) - min(xs)) * (max(ys) - min(ys)), 1e6)
        self.out_links = {n: [] for n in self.nodes}
        self.graph = nx.MultiDiGraph()
        self.graph.add_nodes_from(sorted(self.nodes))
        for link_id in sorted(self.links):
            link = self.links[link_id]
            if link.from_node not in self.nodes or link.to_node not in self.nodes:
                raise NetworkValidationError("link %s references unknown node" % link_id)
            if not link.time > 0:
                raise NetworkValidationError("link %s travel time should be > 0" % link_id)
            if not link.length > 0:
                raise NetworkValidationError("link %s length should be > 0" % link_id)
            self.out_links[link.from_node].append(link)
            self.graph.add_edge(link.from_node, link.to_node, key=link_id,
                                time=link.time, length=link.length)
        self._trees = dict()

    @property
    def zone_ids(self):
        return sorted(self.zone_nodes)

    def zone_of(self, node_id):
        return self.nodes[node_id][2]

    def representative(self, zone_id):
        """
        Zone representative node, the lowest node id in the zone.
        """
        return self.zone_nodes[zone_id][0]

    def validate(self, used_nodes=None):
        """
        Check strong connectivity over the node subset used by establishments.

        :param used_nodes: (optional) node ids, by default all nodes.
        """
        used = sorted(set(self.nodes) if used_nodes is None else set(used_nodes))
        for n in used:
            if n not in self.nodes:
                raise NetworkValidationError("unknown node %s" % n)
        if not used:
            return True
        component = set()
        for c in nx.strongly_connected_components(self.graph):
            if used[0] in c:
                component = c
                break
        missing = [n for n in used if n not in component]
        if missing:
            raise NetworkValidationError("network is not strongly connected over nodes %s" %
                                         missing[:10])
        return True

    @classmethod
    def from_csv(cls, nodes_path, links_path, zones_path=None):
        nodes = read_table(nodes_path, ("node_id", "x", "y", "zone_id"),
                           {"node_id": "int", "x": "float", "y": "float", "zone_id": "int"})
        links = read_table(links_path, ("link_id", "from_node", "to_node", "length_m", "travel_time_s"),
                           {"link_id": "int", "from_node": "int", "to_node": "int",
                            "length_m": "float", "travel_time_s": "float"})
        zones = None
        if zones_path is not None:
            z = read_table(zones_path, ("zone_id", "area_m2"), {"zone_id": "int", "area_m2": "float"})
            zones = dict(zip(z["zone_id"], z["area_m2"]))
        return cls({r.node_id: (r.x, r.y, r.zone_id) for r in nodes.itertuples()},
                   [(r.link_id, r.from_node, r.to_node, r.length_m, r.travel_time_s)
                    for r in links.itertuples()],
                   zones)

    def to_csv(self, nodes_path, links_path, zones_path):
        write_table(nodes_path, [(n,) + self.nodes[n] for n in sorted(self.nodes)],
                    ("node_id", "x", "y", "zone_id"))
        write_table(links_path, [(l.id, l.from_node, l.to_node, l.length, l.time)
                                 for l in (self.links[i] for i in sorted(self.links))],
                    ("link_id", "from_node", "to_node", "length_m", "travel_time_s"))
        write_table(zones_path, [(z, self.zones[z]) for z in self.zone_ids], ("zone_id", "area_m2"))


class Screenline():
    """
    Directional screenline: a set of directed links with an observed daily count.

    :param screenline_id: screenline id.
    :param links: non-empty iterable of link ids.
    :param observed_count: observed vehicles per day (>= 0).
    """
    def __init__(self, screenline_id, links, observed_count=0.0):
        self.id = screenline_id
        self.links = frozenset(int(l) for l in links)
        if not self.links:
            raise NetworkValidationError("screenline %s has no links" % screenline_id)
        self.observed_count = float(observed_count)
        if self.observed_count < 0:
            raise NetworkValidationError("screenline %s observed count should be >= 0" %
                                         screenline_id)

    def __repr__(self):
        return "Screenline(%s, %s links, %s)" % (self.id, len(self.links), self.observed_count)


def validate_screenlines(screenlines, network):
    """
    Check member links exist and member sets are pairwise disjoint.

    :return: dict link id -> screenline id.
    """
    owner = dict()
    ids = set()
    for s in screenlines:
        if s.id in ids:
            raise NetworkValidationError("duplicate screenline id %s" % s.id)
        ids.add(s.id)
        for l in sorted(s.links):
            if l not in network.links:
                raise NetworkValidationError("screenline %s references unknown link %s" % (s.id, l))
            if l in owner:
                raise NetworkValidationError("link %s belongs to screenlines %s and %s" %
                                             (l, owner[l], s.id))
            owner[l] = s.id
    return owner


def load_screenlines(path):
    frame = read_table(path, ("screenline_id", "link_id", "observed_count"),
                       {"screenline_id": "str", "link_id": "int", "observed_count": "float"})
    members, counts, order = dict(), dict(), []
    for r in frame.itertuples():
        if r.screenline_id not in members:
            order.append(r.screenline_id)
            members[r.screenline_id] = []
            counts[r.screenline_id] = r.observed_count
        members[r.screenline_id].append(r.link_id)
    return [Screenline(s, members[s], counts[s]) for s in order]


def save_screenlines(path, screenlines):
    write_table(path, [(s.id, l, s.observed_count) for s in screenlines for l in sorted(s.links)],
                ("screenline_id", "link_id", "observed_count"))


class Route():
    """
    Link sequence of a tour: one leg (list of link ids) per consecutive stop pair.
    """
    def __init__(self, legs):
        self.legs = [list(leg) for leg in legs]

    @property
    def links(self):
        return [l for leg in self.legs for l in leg]

    def validate(self, network, stops):
        """
        Check legs are head-to-tail connected and touch the stop nodes.

        :param stops: node sequence the legs connect (len(stops) == len(legs) + 1).
        """
        if len(stops) != len(self.legs) + 1:
            raise NetworkValidationError("route leg count does not match stops")
        for i, leg in enumerate(self.legs):
            node = stops[i]
            for l in leg:
                link = network.links[l]
                if link.from_node != node:
                    raise NetworkValidationError("route leg %s is not connected at link %s" % (i, l))
                node = link.to_node
            if node != stops[i + 1]:
                raise NetworkValidationError("route leg %s does not reach node %s" % (i, stops[i + 1]))
        return True

    def __eq__(self, other):
        return isinstance(other, Route) and self.legs == other.legs

    def __repr__(self):
        return "Route(%s)" % self.legs


class Skim():
    """
    Square origin-destination matrix.

    :param ids: row/column ids (zone or node ids).
    :param values: numpy array len(ids) x len(ids).
    """
    def __init__(self, ids, values):
        self.ids = list(ids)
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.values = np.asarray(values, dtype=float)

    def __getitem__(self, key):
        return self.values[self.index[key[0]], self.index[key[1]]]

    def __len__(self):
        return len(self.ids)
