import os
import json
import math
import logging
from pysltc.constants import *
from pysltc.errors import InvalidConfig, MissingInput
from pysltc.classes.network import RoadNetwork, Screenline, load_screenlines, save_screenlines
from pysltc.classes.demand import (Establishment, load_establishments, save_establishments,
                                   GenerationParams, SupplierChoiceParams, ShipmentSizeParams,
                                   DemandParams)
from pysltc.functions.tools import substream, round_half_away, epg_label

log = logging.getLogger("pysltc")

# function -> (production block, consumption block) of the synthetic ground truth
TRUE_GENERATION = {
    OFFICE: ((2000.0, 5.0, 100.0, 0.0), (5000.0, 10.0, 300.0, 0.0, 0.0)),
    RETAIL: ((5000.0, 10.0, 200.0, 0.0), (20000.0, 60.0, 1000.0, 0.01, 0.0)),
    LOGISTICS_FACILITY: ((30000.0, 30.0, 1000.0, 0.0), (15000.0, 15.0, 500.0, 0.0, 0.05)),
    FACTORY: ((20000.0, 40.0, 1500.0, 0.0), (10000.0, 20.0, 800.0, 0.0, 0.1)),
}
TRUE_SUPPLIER_CONST = {FACTORY: 0.5, LOGISTICS_FACILITY: 0.3, OFFICE: -0.5, RETAIL: -0.8}
TRUE_SUPPLIER = (-1.5, 0.6, 0.0)
TRUE_SIGMA = (0.5, 0.5, 0.3)
TRUE_SHIPMENT_SIZE = (-0.72, 0.5, 0.1, -0.05)

# function -> (median floor area m², median employment)
ESTABLISHMENT_SIZE = {OFFICE: (400.0, 25.0), RETAIL: (300.0, 10.0),
                      LOGISTICS_FACILITY: (2000.0, 20.0), FACTORY: (1000.0, 30.0)}
MIN_CARRIERS = 3


class ScenarioConfig():
    """
    Synthetic scenario settings.

    :param grid_cols: node columns of the grid network (>= 2).
    :param grid_rows: node rows (>= 2).
    :param node_spacing_m: distance between neighbouring nodes in meters.
    :param zone_block: nodes per zone side.
    :param screenline_cuts: [x cuts, y cuts]; a cut c separates node column (row) c - 1 from c
                            and yields one screenline per direction.
    :param commodities: commodity names, one establishment group per commodity and function.
    :param establishments_per_group: establishments generated per group.
    :param carrier_share: probability a logistics facility is a carrier.
    :param perturbation: relative perturbation of the initial parameters, in [0, 1).
    :param count_noise: relative standard deviation of the observed count noise.
    :param vehicle_capacity: vehicle capacity in kg.
    :param mean_contract_size: mean contract size in kg/year.
    :param seed: master seed.
    """
    DEFAULTS = {"grid_cols": 10, "grid_rows": 8, "node_spacing_m": 500.0, "zone_block": 2,
                "screenline_cuts": [[3, 5, 7], [2, 4, 6]], "commodities": ["food", "goods"],
                "establishments_per_group": 60, "carrier_share": 0.5, "perturbation": 0.3,
                "count_noise": 0.05, "vehicle_capacity": 300.0, "mean_contract_size": 30000.0,
                "seed": 1}

    def __init__(self, **kwargs):
        unknown = sorted(set(kwargs) - set(self.DEFAULTS))
        if unknown:
            raise InvalidConfig("unknown scenario fields %s" % unknown)
        for key, value in self.DEFAULTS.items():
            setattr(self, key, kwargs.get(key, value))
        self.validate()

    def validate(self):
        try:
            self.grid_cols, self.grid_rows = int(self.grid_cols), int(self.grid_rows)
            self.zone_block, self.seed = int(self.zone_block), int(self.seed)
            self.establishments_per_group = int(self.establishments_per_group)
            for key in ("node_spacing_m", "carrier_share", "perturbation", "count_noise",
                        "vehicle_capacity", "mean_contract_size"):
                setattr(self, key, float(getattr(self, key)))
            x_cuts, y_cuts = self.screenline_cuts
            self.screenline_cuts = [sorted(int(c) for c in x_cuts), sorted(int(c) for c in y_cuts)]
            self.commodities = [str(c) for c in self.commodities]
        except (TypeError, ValueError):
            raise InvalidConfig("invalid scenario field types")
        if self.grid_cols < 2 or self.grid_rows < 2:
            raise InvalidConfig("grid_cols and grid_rows should be >= 2")
        if self.zone_block < 1 or len(self.zone_ids()) < 2:
            raise InvalidConfig("zone_block should give >= 2 zones")
        x_cuts, y_cuts = self.screenline_cuts
        if any(not 0 < c < self.grid_cols for c in x_cuts) or \
                any(not 0 < c < self.grid_rows for c in y_cuts):
            raise InvalidConfig("screenline_cuts out of grid")
        if len(set(x_cuts)) + len(set(y_cuts)) < 1:
            raise InvalidConfig("screenline_cuts should give >= 2 screenlines")
        if not self.commodities or len(set(self.commodities)) != len(self.commodities) or \
                any(GROUP_SEPARATOR in c or not c for c in self.commodities):
            raise InvalidConfig("commodities should be distinct non-empty names without '%s'" %
                                GROUP_SEPARATOR)
        if self.establishments_per_group < 1:
            raise InvalidConfig("establishments_per_group should be >= 1")
        if not 0 <= self.carrier_share <= 1:
            raise InvalidConfig("carrier_share should be in [0, 1]")
        if not 0 <= self.perturbation < 1:
            raise InvalidConfig("perturbation should be in [0, 1)")
        if not self.count_noise >= 0:
            raise InvalidConfig("count_noise should be >= 0")
        for key in ("node_spacing_m", "vehicle_capacity", "mean_contract_size"):
            if not getattr(self, key) > 0:
                raise InvalidConfig("%s should be > 0" % key)
        if self.seed < 0:
            raise InvalidConfig("seed should be >= 0")

    def zone_ids(self):
        cols = -(-self.grid_cols // self.zone_block)
        rows = -(-self.grid_rows // self.zone_block)
        return list(range(1, cols * rows + 1))

    def to_dict(self):
        return {key: getattr(self, key) for key in self.DEFAULTS}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidConfig("scenario section should be an object")
        return cls(**data)


class Scenario():
    """
    Study area inputs: network, screenlines with observed counts, establishments and the
    initial demand parameters. Synthetic scenarios also carry ground-truth parameters.

    :param network: RoadNetwork.
    :param screenlines: list of Screenline.
    :param establishments: list of Establishment.
    :param initial: DemandParams to calibrate.
    :param truth: (optional) ground-truth DemandParams.
    :param config: (optional) ScenarioConfig the scenario was generated from.
    """
    PARAMS_DIR = "params"

    def __init__(self, network, screenlines, establishments, initial, truth=None, config=None):
        self.network = network
        self.screenlines = list(screenlines)
        self.establishments = list(establishments)
        self.initial = initial
        self.truth = truth
        self.config = config

    @property
    def observed_counts(self):
        return [s.observed_count for s in self.screenlines]

    def save(self, directory):
        os.makedirs(directory, exist_ok=True)
        self.network.to_csv(os.path.join(directory, "nodes.csv"), os.path.join(directory, "links.csv"),
                            os.path.join(directory, "zones.csv"))
        save_screenlines(os.path.join(directory, "screenlines.csv"), self.screenlines)
        save_establishments(os.path.join(directory, "establishments.csv"), self.establishments)
        self.initial.save(os.path.join(directory, self.PARAMS_DIR, "initial"))
        if self.truth is not None:
            self.truth.save(os.path.join(directory, self.PARAMS_DIR, "true"))
        if self.config is not None:
            with open(os.path.join(directory, "scenario.json"), "w") as f:
                json.dump(self.config.to_dict(), f, indent=2, sort_keys=True)
                f.write("\n")
        return directory

    @classmethod
    def load(cls, directory, draws=DEFAULT_DRAWS):
        if not os.path.isdir(directory):
            raise MissingInput("scenario directory %s not found" % directory)
        zones = os.path.join(directory, "zones.csv")
        network = RoadNetwork.from_csv(os.path.join(directory, "nodes.csv"),
                                       os.path.join(directory, "links.csv"),
                                       zones if os.path.exists(zones) else None)
        screenlines = load_screenlines(os.path.join(directory, "screenlines.csv"))
        establishments = load_establishments(os.path.join(directory, "establishments.csv"), network)
        initial = DemandParams.load(os.path.join(directory, cls.PARAMS_DIR, "initial"), draws=draws)
        truth, config = None, None
        if os.path.isdir(os.path.join(directory, cls.PARAMS_DIR, "true")):
            truth = DemandParams.load(os.path.join(directory, cls.PARAMS_DIR, "true"), draws=draws)
        if os.path.exists(os.path.join(directory, "scenario.json")):
            with open(os.path.join(directory, "scenario.json")) as f:
                config = ScenarioConfig.from_dict(json.load(f))
        return cls(network, screenlines, establishments, initial, truth, config)


# Synthetic scenario generator

def grid_network(config):
    """
    Jittered grid with bidirectional links between neighbouring nodes.

    :return: tuple (RoadNetwork, dict node id -> (column, row)).
    """
    rng = substream(config.seed, STREAM_SYNTH, 0)
    zone_cols = -(-config.grid_cols // config.zone_block)
    spacing = config.node_spacing_m
    nodes, position = dict(), dict()
    for r in range(config.grid_rows):
        for c in range(config.grid_cols):
            node = r * config.grid_cols + c + 1
            jitter = rng.uniform(-0.1, 0.1, size=2) * spacing
            zone = (r // config.zone_block) * zone_cols + c // config.zone_block + 1
            nodes[node] = (round(c * spacing + jitter[0], 1), round(r * spacing + jitter[1], 1), zone)
            position[node] = (c, r)
    links = []
    for r in range(config.grid_rows):
        for c in range(config.grid_cols):
            a = r * config.grid_cols + c + 1
            for b in ([a + 1] if c + 1 < config.grid_cols else []) + \
                     ([a + config.grid_cols] if r + 1 < config.grid_rows else []):
                length = round(math.hypot(nodes[a][0] - nodes[b][0], nodes[a][1] - nodes[b][1]), 1)
                for u, v in ((a, b), (b, a)):
                    speed = rng.uniform(8.0, 14.0)
                    links.append((len(links) + 1, u, v, length, round(length / speed, 2)))
    area = (config.zone_block * spacing) ** 2
    return RoadNetwork(nodes, links, {z: area for z in config.zone_ids()}), position


def grid_screenlines(network, position, config):
    """
    Directional full cuts of the grid: "E<c>"/"W<c>" for column cuts, "N<r>"/"S<r>" for row cuts.
    """
    x_cuts, y_cuts = config.screenline_cuts
    members = dict()
    for link_id in sorted(network.links):
        link = network.links[link_id]
        (ca, ra), (cb, rb) = position[link.from_node], position[link.to_node]
        if ra == rb and max(ca, cb) in x_cuts:
            key = ("E" if cb > ca else "W") + str(max(ca, cb))
        elif ca == cb and max(ra, rb) in y_cuts:
            key = ("N" if rb > ra else "S") + str(max(ra, rb))
        else:
            continue
        members.setdefault(key, []).append(link_id)
    order = ["%s%s" % (d, c) for c in x_cuts for d in "EW"] + \
            ["%s%s" % (d, r) for r in y_cuts for d in "NS"]
    return [Screenline(s, members[s]) for s in order]


def synthetic_establishments(network, config):
    rng = substream(config.seed, STREAM_SYNTH, 1)
    nodes = sorted(network.nodes)
    establishments, logistics = [], []
    for commodity in config.commodities:
        for function in FUNCTION_TYPES:
            floor, employment = ESTABLISHMENT_SIZE[function]
            for _ in range(config.establishments_per_group):
                node = nodes[int(rng.integers(len(nodes)))]
                area = round(float(floor * math.exp(0.5 * rng.standard_normal())), 1)
                emp = max(1.0, float(round_half_away(employment * math.exp(0.4 * rng.standard_normal()))))
                carrier = function == LOGISTICS_FACILITY and rng.random() < config.carrier_share
                e = Establishment(len(establishments) + 1, node, network.zone_of(node), max(area, 10.0),
                                  emp, commodity + GROUP_SEPARATOR + function, function, carrier)
                establishments.append(e)
                if function == LOGISTICS_FACILITY:
                    logistics.append(e)
    for e in logistics:
        if sum(x.is_carrier for x in logistics) >= MIN_CARRIERS:
            break
        e.is_carrier = True
    return establishments


def true_params(config, draws=DEFAULT_DRAWS):
    prod, cons, supplier, size = dict(), dict(), dict(), dict()
    for commodity in config.commodities:
        for function in FUNCTION_TYPES:
            group = commodity + GROUP_SEPARATOR + function
            prod[group], cons[group] = TRUE_GENERATION[function]
            size[group] = TRUE_SHIPMENT_SIZE
            for supplier_function in FUNCTION_TYPES:
                supplier[epg_label(commodity, function, supplier_function)] = \
                    TRUE_SUPPLIER + (TRUE_SUPPLIER_CONST[supplier_function],) + TRUE_SIGMA
    return DemandParams(GenerationParams(prod, cons), SupplierChoiceParams(supplier, draws),
                        ShipmentSizeParams(size))


def perturb_params(params, perturbation, seed):
    """
    Multiply every coefficient by an independent uniform factor in [1 - p, 1 + p].
    """
    def scale(values, block, key):
        rng = substream(seed, STREAM_PERTURBATION, block, key)
        return [v * (1.0 + perturbation * rng.uniform(-1.0, 1.0)) for v in values]

    generation, supplier, size = params.generation, params.supplier, params.shipment_size
    return DemandParams(
        GenerationParams({g: scale(generation.prod[g], 0, i) for i, g in enumerate(sorted(generation.prod))},
                         {g: scale(generation.cons[g], 1, i) for i, g in enumerate(sorted(generation.cons))}),
        SupplierChoiceParams({k: scale(supplier[k], 2, i) for i, k in enumerate(supplier.epgs)},
                             supplier.draws),
        ShipmentSizeParams({g: scale(size[g], 3, i) for i, g in enumerate(size.groups)}))


def noisy_counts(counts, noise, seed):
    """
    Counts with seeded multiplicative normal noise, rounded half away from zero, clamped at 0.
    """
    result = []
    for k, value in enumerate(counts):
        rng = substream(seed, STREAM_COUNT_NOISE, k)
        result.append(max(0, int(round_half_away(value * (1.0 + noise * rng.standard_normal())))))
    return result


def synth(config, logger=None):
    """
    Generate a synthetic scenario whose observed counts come from simulating the ground-truth
    parameters.

    :param config: ScenarioConfig.
    :param logger: (optional) logger.
    :return: Scenario.
    """
    from pysltc.calibration.simulator import Simulator

    logger = logger if logger is not None else log
    network, position = grid_network(config)
    screenlines = grid_screenlines(network, position, config)
    establishments = synthetic_establishments(network, config)
    truth = true_params(config)
    initial = perturb_params(truth, config.perturbation, config.seed)
    simulator = Simulator(network, establishments, screenlines, config.vehicle_capacity,
                          config.mean_contract_size, logger=logger)
    run = simulator.simulate(truth, config.seed)
    observed = noisy_counts(run.counts, config.count_noise, config.seed)
    screenlines = [Screenline(s.id, s.links, c) for s, c in zip(screenlines, observed)]
    logger.info("Synthetic scenario: %s nodes, %s links, %s zones, %s establishments, "
                "%s screenlines, %s tours", len(network.nodes), len(network.links),
                len(network.zone_ids), len(establishments), len(screenlines), len(run.tours))
    return Scenario(network, screenlines, establishments, initial, truth, config)
