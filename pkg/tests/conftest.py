import pytest

from pysltc.classes.network import RoadNetwork, Screenline, Route
from pysltc.classes.demand import NodeTour
from pysltc.classes.scenario import ScenarioConfig, synth


@pytest.fixture
def diamond():
    # top path 1->2->4 costs 2 + 2, bottom path 1->3->4 costs 3 + 2
    nodes = {1: (0.0, 0.0, 1), 2: (500.0, 500.0, 1), 3: (500.0, -500.0, 2), 4: (1000.0, 0.0, 2)}
    links = [(1, 1, 2, 700.0, 2.0), (2, 2, 4, 700.0, 2.0), (3, 1, 3, 700.0, 3.0), (4, 3, 4, 700.0, 2.0),
             (5, 2, 1, 700.0, 2.0), (6, 4, 2, 700.0, 2.0), (7, 3, 1, 700.0, 3.0), (8, 4, 3, 700.0, 2.0)]
    return RoadNetwork(nodes, links)


@pytest.fixture
def line3():
    # three zones on a line, 1 <-> 2 <-> 3
    nodes = {1: (0.0, 0.0, 1), 2: (1000.0, 0.0, 2), 3: (2000.0, 0.0, 3)}
    links = [(1, 1, 2, 1000.0, 5.0), (2, 2, 3, 1000.0, 7.0), (3, 2, 1, 1000.0, 5.0), (4, 3, 2, 1000.0, 7.0)]
    return RoadNetwork(nodes, links)


@pytest.fixture
def fig2():
    """
    Five tours over screenlines A-D: two cross A then B, two cross B then D, one crosses C then D.
    """
    screenlines = [Screenline("A", [1], 2), Screenline("B", [2], 4), Screenline("C", [3], 1),
                   Screenline("D", [4], 3)]
    tours = [NodeTour(i, 100, 1, [(i + 1, [i])], 1000) for i in range(1, 6)]
    routes = {1: Route([[10, 1], [2, 11]]),
              2: Route([[1, 12, 2], []]),
              3: Route([[2], [4]]),
              4: Route([[13, 2, 4], [14]]),
              5: Route([[3], [4]])}
    return screenlines, tours, routes


SMALL_SCENARIO = {"grid_cols": 6, "grid_rows": 4, "zone_block": 2,
                  "screenline_cuts": [[2, 4], [2]], "commodities": ["food"],
                  "establishments_per_group": 40, "seed": 3}


@pytest.fixture(scope="module")
def small_scenario():
    return synth(ScenarioConfig(**SMALL_SCENARIO))


@pytest.fixture(scope="session")
def default_scenario():
    return synth(ScenarioConfig())
