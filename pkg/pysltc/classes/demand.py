import os
import numpy as np
from pysltc.constants import *
from pysltc.errors import MissingGroupParams, InvalidConfig
from pysltc.functions.tools import commodity_of, read_table, write_table


class Establishment():
    """
    Establishment of the study area.

    :param establishment_id: integer id.
    :param node: location node id.
    :param zone: zone id of the location node.
    :param floor_area: floor area in m² (> 0).
    :param employment: employment size in persons (> 0).
    :param group: group label "<commodity>.<industry>".
    :param function: one of office, retail, logistics_facility, factory.
    :param is_carrier: carrier flag, carriers operate the goods vehicles.
    """
    __slots__ = ("id", "node", "zone", "floor_area", "employment", "group", "function",
                 "is_carrier", "commodity")

    def __init__(self, establishment_id, node, zone, floor_area, employment, group, function,
                 is_carrier=False):
        self.id = int(establishment_id)
        self.node = int(node)
        self.zone = int(zone)
        self.floor_area = float(floor_area)
        self.employment = float(employment)
        if not self.floor_area > 0 or not self.employment > 0:
            raise InvalidConfig("establishment %s floor area and employment should be > 0" % self.id)
        if function not in FUNCTION_TYPES:
            raise InvalidConfig("establishment %s unsupported function %s" % (self.id, function))
        self.group = str(group)
        self.function = function
        self.is_carrier = bool(is_carrier)
        self.commodity = commodity_of(self.group)

    def __repr__(self):
        return "Establishment(%s, %s, %s)" % (self.id, self.group, self.function)


def load_establishments(path, network):
    frame = read_table(path, ("id", "node_id", "floor_area_m2", "employment", "group", "function",
                              "is_carrier"),
                       {"id": "int", "node_id": "int", "floor_area_m2": "float",
                        "employment": "float", "group": "str", "function": "str",
                        "is_carrier": "bool"})
    result = []
    for r in frame.itertuples():
        if r.node_id not in network.nodes:
            raise InvalidConfig("establishment %s references unknown node %s" % (r.id, r.node_id))
        result.append(Establishment(r.id, r.node_id, network.zone_of(r.node_id), r.floor_area_m2,
                                    r.employment, r.group, r.function, r.is_carrier))
    return result


def save_establishments(path, establishments):
    write_table(path, [(e.id, e.node, e.floor_area, e.employment, e.group, e.function,
                        int(e.is_carrier)) for e in establishments],
                ("id", "node_id", "floor_area_m2", "employment", "group", "function", "is_carrier"))


class EstablishmentFlows():
    """
    Annual production and consumption (kg/year) per establishment id.
    """
    def __init__(self, production=None, consumption=None):
        self.production = dict(production or {})
        self.consumption = dict(consumption or {})


class GenerationParams():
    """
    Freight Generation model parameters per establishment group.

    :param prod: dict group -> (const, floor, emp, floor_emp).
    :param cons: dict group -> (const, floor, emp, floor_emp, prod).
    """
    def __init__(self, prod, cons):
        self.prod = {g: np.array(v, dtype=float) for g, v in prod.items()}
        self.cons = {g: np.array(v, dtype=float) for g, v in cons.items()}
        for g, v in self.prod.items():
            if v.shape != (len(GENERATION_PROD_TERMS),):
                raise InvalidConfig("group %s production block should have %s terms" %
                                    (g, len(GENERATION_PROD_TERMS)))
        for g, v in self.cons.items():
            if v.shape != (len(GENERATION_CONS_TERMS),):
                raise InvalidConfig("group %s consumption block should have %s terms" %
                                    (g, len(GENERATION_CONS_TERMS)))

    @property
    def groups(self):
        return sorted(set(self.prod) | set(self.cons))

    def production_params(self, group):
        try:
            return self.prod[group]
        except KeyError:
            raise MissingGroupParams("no production parameters for group %s" % group)

    def consumption_params(self, group):
        try:
            return self.cons[group]
        except KeyError:
            raise MissingGroupParams("no consumption parameters for group %s" % group)

    def copy(self):
        return GenerationParams(self.prod, self.cons)

    def to_csv(self, path):
        rows = []
        for g in self.groups:
            if g in self.prod:
                rows.append((g, "prod") + tuple(self.prod[g]) + (0.0,))
            if g in self.cons:
                rows.append((g, "cons") + tuple(self.cons[g]))
        return write_table(path, rows, ("group", "block") + GENERATION_CONS_TERMS)

    @classmethod
    def from_csv(cls, path):
        types = {t: "float" for t in GENERATION_CONS_TERMS}
        types.update({"group": "str", "block": "str"})
        frame = read_table(path, ("group", "block") + GENERATION_CONS_TERMS, types)
        prod, cons = dict(), dict()
        for r in frame.itertuples(index=False):
            r = r._asdict()
            if r["block"] == "prod":
                prod[r["group"]] = [r[t] for t in GENERATION_PROD_TERMS]
            elif r["block"] == "cons":
                cons[r["group"]] = [r[t] for t in GENERATION_CONS_TERMS]
            else:
                raise InvalidConfig("%s: unsupported block %s" % (path, r["block"]))
        return cls(prod, cons)


class SupplierChoiceParams():
    """
    Supplier Selection model parameters per establishment-pair group (epg).

    :param params: dict epg -> (time, prod, demand, const, sigma_or, sigma_lf, sigma_dws).
    :param draws: (optional) error component draws for simulated estimation, by default 100.
    """
    def __init__(self, params, draws=DEFAULT_DRAWS):
        self.params = {k: np.array(v, dtype=float) for k, v in params.items()}
        for k, v in self.params.items():
            if v.shape != (len(SUPPLIER_TERMS),):
                raise InvalidConfig("epg %s should have %s terms" % (k, len(SUPPLIER_TERMS)))
            if np.any(v[SUPPLIER_SIGMA_OFFSET:] < 0):
                raise InvalidConfig("epg %s sigma values should be >= 0" % k)
        self.draws = int(draws)

    @property
    def epgs(self):
        return sorted(self.params)

    def __getitem__(self, epg):
        try:
            return self.params[epg]
        except KeyError:
            raise MissingGroupParams("no supplier choice parameters for epg %s" % epg)

    def __contains__(self, epg):
        return epg in self.params

    def copy(self):
        return SupplierChoiceParams(self.params, self.draws)

    def to_csv(self, path):
        return write_table(path, [(k,) + tuple(self.params[k]) for k in self.epgs],
                           ("epg",) + SUPPLIER_TERMS)

    @classmethod
    def from_csv(cls, path, draws=DEFAULT_DRAWS):
        types = {t: "float" for t in SUPPLIER_TERMS}
        types["epg"] = "str"
        frame = read_table(path, ("epg",) + SUPPLIER_TERMS, types)
        return cls({r[0]: list(r[1:]) for r in frame.itertuples(index=False)}, draws)


class ShipmentSizeParams():
    """
    Shipment Size model parameters per receiver group: (const, size, dist, dense).
    """
    def __init__(self, params):
        self.params = {k: np.array(v, dtype=float) for k, v in params.items()}
        for k, v in self.params.items():
            if v.shape != (len(SHIPMENT_SIZE_TERMS),):
                raise InvalidConfig("group %s should have %s terms" % (k, len(SHIPMENT_SIZE_TERMS)))

    @property
    def groups(self):
        return sorted(self.params)

    def __getitem__(self, group):
        try:
            return self.params[group]
        except KeyError:
            raise MissingGroupParams("no shipment size parameters for group %s" % group)

    def copy(self):
        return ShipmentSizeParams(self.params)

    def to_csv(self, path):
        return write_table(path, [(k,) + tuple(self.params[k]) for k in self.groups],
                           ("group",) + SHIPMENT_SIZE_TERMS)

    @classmethod
    def from_csv(cls, path):
        types = {t: "float" for t in SHIPMENT_SIZE_TERMS}
        types["group"] = "str"
        frame = read_table(path, ("group",) + SHIPMENT_SIZE_TERMS, types)
        return cls({r[0]: list(r[1:]) for r in frame.itertuples(index=False)})


class DemandParams():
    """
    The three parameter blocks subject to calibration.
    """
    GENERATION_FILE = "generation_params%s.csv"
    SUPPLIER_FILE = "supplier_params%s.csv"
    SHIPMENT_SIZE_FILE = "shipment_size_params%s.csv"

    def __init__(self, generation, supplier, shipment_size):
        self.generation = generation
        self.supplier = supplier
        self.shipment_size = shipment_size

    def copy(self):
        return DemandParams(self.generation.copy(), self.supplier.copy(), self.shipment_size.copy())

    def save(self, directory, suffix=""):
        os.makedirs(directory, exist_ok=True)
        self.generation.to_csv(os.path.join(directory, self.GENERATION_FILE % suffix))
        self.supplier.to_csv(os.path.join(directory, self.SUPPLIER_FILE % suffix))
        self.shipment_size.to_csv(os.path.join(directory, self.SHIPMENT_SIZE_FILE % suffix))

    @classmethod
    def load(cls, directory, suffix="", draws=DEFAULT_DRAWS):
        return cls(GenerationParams.from_csv(os.path.join(directory, cls.GENERATION_FILE % suffix)),
                   SupplierChoiceParams.from_csv(os.path.join(directory, cls.SUPPLIER_FILE % suffix),
                                                 draws),
                   ShipmentSizeParams.from_csv(os.path.join(directory,
                                                            cls.SHIPMENT_SIZE_FILE % suffix)))


class Contract():
    """
    Annual supplier-receiver commodity agreement.

    :param contract_id: integer id.
    :param receiver: receiver establishment id.
    :param commodity: commodity type.
    :param size: contract size in kg/year (> 0).
    :param index: position of the contract among the receiver's contracts.
    :param supplier: (optional) supplier establishment id.
    :param epg: (optional) establishment-pair group of the receiver/supplier pair.
    """
    __slots__ = ("id", "receiver", "commodity", "size", "index", "supplier", "epg")

    def __init__(self, contract_id, receiver, commodity, size, index=0, supplier=None, epg=None):
        self.id = int(contract_id)
        self.receiver = int(receiver)
        self.commodity = commodity
        self.size = float(size)
        if not self.size > 0:
            raise ValueError("contract %s size should be > 0" % contract_id)
        self.index = int(index)
        self.supplier = supplier
        self.epg = epg

    def __repr__(self):
        return "Contract(%s: %s->%s, %s)" % (self.id, self.supplier, self.receiver, self.size)


class Shipment():
    """
    Shipment size and annual frequency of a contract. Shipment id equals contract id.
    """
    __slots__ = ("id", "contract", "size", "frequency", "daily_count")

    def __init__(self, contract, size, frequency, daily_count=0):
        self.id = contract.id
        self.contract = contract
        self.size = float(size)
        self.frequency = float(frequency)
        self.daily_count = int(daily_count)

    def __repr__(self):
        return "Shipment(%s, s=%s, f=%s)" % (self.id, self.size, self.frequency)


class NodeTour():
    """
    Goods vehicle tour as a sequence of nodes without routes.

    :param tour_id: integer id.
    :param carrier: carrier establishment id.
    :param depot: depot node id, tours start and end there.
    :param stops: list of (node id, list of served shipment ids).
    :param capacity: vehicle capacity in kg.
    """
    __slots__ = ("id", "carrier", "depot", "stops", "capacity")

    def __init__(self, tour_id, carrier, depot, stops, capacity):
        self.id = int(tour_id)
        self.carrier = carrier
        self.depot = depot
        self.stops = [(node, list(shipments)) for node, shipments in stops]
        self.capacity = float(capacity)

    def node_sequence(self):
        return [self.depot] + [node for node, _ in self.stops] + [self.depot]

    def shipment_ids(self):
        return [s for _, shipments in self.stops for s in shipments]

    def clone(self, tour_id):
        return NodeTour(tour_id, self.carrier, self.depot, self.stops, self.capacity)

    def __repr__(self):
        return "NodeTour(%s, %s)" % (self.id, self.node_sequence())
