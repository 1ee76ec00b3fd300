import math
import logging
import numpy as np
from scipy.special import softmax
from pysltc.constants import *
from pysltc.errors import (NonPositiveLogArgument, NoCandidateSupplier, NoCarrierAvailable,
                           ShipmentExceedsCapacity)
from pysltc.classes.demand import EstablishmentFlows, Contract, Shipment, NodeTour
from pysltc.functions.tools import substream, epg_label

log = logging.getLogger("pysltc")


# Freight Generation

def freight_generation(establishments, params):
    """
    Annual production and consumption of establishments.

    Consumption uses the establishment's own (clamped) production as regressor,
    negative outputs are clamped to 0.

    :param establishments: list of Establishment.
    :param params: GenerationParams.
    :return: EstablishmentFlows.
    """
    flows = EstablishmentFlows()
    for e in establishments:
        b = params.production_params(e.group)
        c = params.consumption_params(e.group)
        x = (1.0, e.floor_area, e.employment, e.floor_area * e.employment)
        production = max(0.0, float(np.dot(b, x)))
        consumption = max(0.0, float(np.dot(c, x + (production,))))
        flows.production[e.id] = production
        flows.consumption[e.id] = consumption
    return flows


def split_contracts(establishments, flows, mean_contract_size, start_id=1):
    """
    Translate annual consumption into equal-size contract-based demands.

    Receiver n gets ceil(y_cons / mean_contract_size) contracts of size y_cons / count.

    :return: list of Contract without suppliers.
    """
    if not mean_contract_size > 0:
        raise ValueError("mean contract size should be > 0")
    contracts = []
    contract_id = start_id
    for e in sorted(establishments, key=lambda e: e.id):
        consumption = flows.consumption.get(e.id, 0.0)
        if consumption <= 0:
            continue
        count = int(math.ceil(consumption / mean_contract_size))
        for j in range(count):
            contracts.append(Contract(contract_id, e.id, e.commodity, consumption / count, j))
            contract_id += 1
    return contracts


# Supplier Selection

def error_component_design(function):
    """
    Indicators of the (or, lf, dws) error components entering the utility of a supplier.
    """
    if function in (OFFICE, RETAIL):
        return np.array([1.0, 0.0, 1.0])
    if function == LOGISTICS_FACILITY:
        return np.array([0.0, 1.0, 1.0])
    return np.zeros(3)


def supplier_time(time_skim, supplier, receiver):
    if supplier.zone == receiver.zone:
        return max(time_skim[(supplier.zone, receiver.zone)], INTRA_ZONAL_TIME_FLOOR)
    return time_skim[(supplier.zone, receiver.zone)]


def supplier_utility(receiver, supplier, params, time_skim, flows, demand, draws):
    """
    Systematic plus error component utility of supplier for receiver.

    :param receiver: receiver Establishment.
    :param supplier: supplier Establishment.
    :param params: SupplierChoiceParams.
    :param time_skim: zone travel time Skim (seconds).
    :param flows: EstablishmentFlows (supplier production).
    :param demand: contract-based demand in kg.
    :param draws: (eta_or, eta_lf, eta_dws) standard normal draws.
    :return: float.
    """
    theta = params[epg_label(receiver.commodity, receiver.function, supplier.function)]
    x_time = supplier_time(time_skim, supplier, receiver)
    x_prod = flows.production.get(supplier.id, 0.0)
    if not (x_time > 0 and x_prod > 0 and demand > 0):
        raise NonPositiveLogArgument("non-positive log argument for receiver %s supplier %s" %
                                     (receiver.id, supplier.id))
    v = (theta[0] * math.log(x_time) + theta[1] * math.log(x_prod) + theta[2] * math.log(demand)
         + theta[3])
    m = float(np.dot(theta[SUPPLIER_SIGMA_OFFSET:] * error_component_design(supplier.function),
                     np.asarray(draws, dtype=float)))
    return v + m


def utility_terms(receiver, suppliers, params, time_skim, flows):
    """
    Per-alternative utility ingredients that do not depend on demand or draws.

    :return: tuple (theta n x 7, error component design n x 3, ln x_time, ln x_prod).
    """
    n = len(suppliers)
    theta = np.empty((n, len(SUPPLIER_TERMS)))
    design = np.empty((n, 3))
    x_time = np.empty(n)
    x_prod = np.empty(n)
    for i, s in enumerate(suppliers):
        theta[i] = params[epg_label(receiver.commodity, receiver.function, s.function)]
        design[i] = error_component_design(s.function)
        x_time[i] = supplier_time(time_skim, s, receiver)
        x_prod[i] = flows.production.get(s.id, 0.0)
    if np.any(x_time <= 0) or np.any(x_prod <= 0):
        raise NonPositiveLogArgument("non-positive log argument for receiver %s" % receiver.id)
    return theta, design, np.log(x_time), np.log(x_prod)


def utilities_from_terms(terms, demand, draws):
    theta, design, ln_time, ln_prod = terms
    if not demand > 0:
        raise NonPositiveLogArgument("contract-based demand should be > 0")
    draws = np.asarray(draws, dtype=float)
    return (theta[:, 0] * ln_time + theta[:, 1] * ln_prod + theta[:, 2] * math.log(demand)
            + theta[:, 3] + (theta[:, SUPPLIER_SIGMA_OFFSET:] * design * draws).sum(axis=1))


def supplier_utilities(receiver, suppliers, params, time_skim, flows, demand, draws):
    """
    Vectorized supplier_utility over alternatives sharing one error component draw.

    :return: numpy array, one utility per supplier.
    """
    return utilities_from_terms(utility_terms(receiver, suppliers, params, time_skim, flows),
                                demand, draws)


def supplier_choice_prob(receiver, alternatives, params, time_skim, flows, demand, draws):
    """
    Logit choice probabilities of suppliers conditional on one error component draw.

    :return: numpy array of probabilities (sums to 1).
    """
    if not alternatives:
        raise NoCandidateSupplier("no alternatives for receiver %s" % receiver.id)
    return softmax(supplier_utilities(receiver, alternatives, params, time_skim, flows, demand,
                                      draws))


def candidate_suppliers(receiver, suppliers, time_skim, cap=CANDIDATE_SUPPLIER_CAP):
    """
    Nearest suppliers of the receiver's commodity by travel time (ties by id), receiver excluded.

    :param suppliers: list of Establishment with positive production.
    """
    pool = [s for s in suppliers if s.commodity == receiver.commodity and s.id != receiver.id]
    pool.sort(key=lambda s: (supplier_time(time_skim, s, receiver), s.id))
    return pool[:cap]


def supplier_selection(establishments, contracts, flows, time_skim, params, seed,
                       candidate_cap=CANDIDATE_SUPPLIER_CAP, stream_key=()):
    """
    Match each contract-based demand with a supplier.

    Every contract draws one error component triple from its own random substream and samples
    a supplier from the logit probabilities over its candidate set.

    :param establishments: list of Establishment.
    :param contracts: list of Contract (receivers set).
    :param flows: EstablishmentFlows.
    :param time_skim: zone travel time Skim.
    :param params: SupplierChoiceParams.
    :param seed: master seed.
    :param candidate_cap: (optional) candidate set size cap, by default 200.
    :param stream_key: (optional) extra substream key components.
    :return: list of Contract with supplier and epg set.
    """
    by_id = {e.id: e for e in establishments}
    suppliers = [e for e in sorted(establishments, key=lambda e: e.id)
                 if flows.production.get(e.id, 0.0) > 0]
    cache = dict()
    for c in contracts:
        receiver = by_id[c.receiver]
        if receiver.id not in cache:
            candidates = candidate_suppliers(receiver, suppliers, time_skim, candidate_cap)
            if not candidates:
                raise NoCandidateSupplier("no candidate supplier for contract %s" % c.id)
            cache[receiver.id] = (candidates,
                                  utility_terms(receiver, candidates, params, time_skim, flows))
        candidates, terms = cache[receiver.id]
        rng = substream(seed, STREAM_SUPPLIER_SELECTION, *stream_key, c.receiver, c.index)
        draws = rng.standard_normal(3)
        p = softmax(utilities_from_terms(terms, c.size, draws))
        chosen = candidates[int(rng.choice(len(candidates), p=p))]
        c.supplier = chosen.id
        c.epg = epg_label(receiver.commodity, receiver.function, chosen.function)
    return contracts


# Shipment Size and frequency

def establishment_density(establishments, network):
    """
    Establishments per km² by zone.
    """
    counts = dict()
    for e in establishments:
        counts[e.zone] = counts.get(e.zone, 0) + 1
    return {z: counts.get(z, 0) / (network.zones[z] / 1e6) for z in network.zone_ids}


def shipment_regressors(contract, by_id, distance_skim, densities):
    """
    (ln x_dist, ln x_dense) of a contract, distance in km floored at 0.1.
    """
    supplier, receiver = by_id[contract.supplier], by_id[contract.receiver]
    x_dist = max(distance_skim[(supplier.node, receiver.node)], DISTANCE_FLOOR_KM)
    x_dense = densities.get(receiver.zone, 0.0)
    if not x_dense > 0:
        raise NonPositiveLogArgument("zone %s establishment density should be > 0" % receiver.zone)
    return math.log(x_dist), math.log(x_dense)


def shipment_size_frequency(contracts, by_id, distance_skim, densities, params, max_size=None):
    """
    Shipment size and annual frequency per contract.

    Size is capped at the contract size (so frequency >= 1) and at max_size when given.

    :param contracts: list of Contract with suppliers.
    :param by_id: dict establishment id -> Establishment.
    :param distance_skim: node distance Skim in km.
    :param densities: dict zone -> establishments per km².
    :param params: ShipmentSizeParams.
    :param max_size: (optional) upper bound of shipment size in kg.
    :return: list of Shipment.
    """
    shipments = []
    for c in contracts:
        b = params[by_id[c.receiver].group]
        ln_dist, ln_dense = shipment_regressors(c, by_id, distance_skim, densities)
        size = math.exp(b[0] + b[1] * math.log(c.size) + b[2] * ln_dist + b[3] * ln_dense)
        size = min(size, c.size)
        if max_size is not None:
            size = min(size, max_size)
        shipments.append(Shipment(c, size, c.size / size))
    return shipments


def daily_instances(shipments, seed, stream_key=()):
    """
    Realize the simulated day: floor(f/365) instances plus one more with the fractional
    probability, drawn from each contract's own substream.
    """
    for s in shipments:
        rate = s.frequency / DAYS_PER_YEAR
        base = int(math.floor(rate))
        rng = substream(seed, STREAM_DAILY_SHIPMENTS, *stream_key, s.contract.receiver,
                        s.contract.index)
        s.daily_count = base + int(rng.random() < rate - base)
    return shipments


# Tour formation

def assign_carriers(establishments, node_time_skim):
    """
    Designated carrier of every establishment: the nearest carrier by travel time from the
    carrier depot, ties by lowest id.

    :return: dict establishment id -> carrier Establishment.
    """
    carriers = sorted((e for e in establishments if e.is_carrier), key=lambda e: e.id)
    if not carriers:
        raise NoCarrierAvailable("no carrier establishment available")
    result = dict()
    for e in establishments:
        result[e.id] = min(carriers, key=lambda c: (node_time_skim[(c.node, e.node)], c.id))
    return result


def nearest_neighbor_tours(depot, instances, capacity, node_time_skim, carrier=None,
                           start_id=1):
    """
    Greedy nearest-neighbor tours of one carrier.

    :param instances: list of (shipment id, node, weight) in shipment id order.
    :return: list of NodeTour.
    """
    tours = []
    pending = list(instances)
    tour_id = start_id
    while pending:
        current, load, stops = depot, 0.0, []
        while True:
            best = None
            for _, node, weight in pending:
                if load + weight <= capacity:
                    key = (node_time_skim[(current, node)], node)
                    if best is None or key < best:
                        best = key
            if best is None:
                break
            node = best[1]
            served, rest = [], []
            for item in pending:
                if item[1] == node and load + item[2] <= capacity:
                    served.append(item[0])
                    load += item[2]
                else:
                    rest.append(item)
            pending = rest
            stops.append((node, served))
            current = node
        tours.append(NodeTour(tour_id, carrier, depot, stops, capacity))
        tour_id += 1
    return tours


def form_tours(shipments, establishments, network, capacity, seed, node_time_skim=None,
               carriers=None, stream_key=(), start_id=1):
    """
    Daily node tours of carriers.

    :param shipments: list of Shipment.
    :param establishments: list of Establishment.
    :param network: RoadNetwork.
    :param capacity: vehicle capacity in kg.
    :param seed: master seed.
    :param node_time_skim: (optional) node travel time Skim, computed when omitted.
    :param carriers: (optional) dict establishment id -> carrier Establishment.
    :return: list of NodeTour.
    """
    from pysltc.functions.network import travel_time_skim

    for s in shipments:
        if s.size > capacity:
            raise ShipmentExceedsCapacity("shipment %s size %s exceeds vehicle capacity %s" %
                                          (s.id, s.size, capacity))
    if node_time_skim is None:
        node_time_skim = travel_time_skim(network, "node")
    if carriers is None:
        carriers = assign_carriers(establishments, node_time_skim)
    by_id = {e.id: e for e in establishments}
    daily_instances(shipments, seed, stream_key)
    work = dict()
    for s in sorted(shipments, key=lambda s: s.id):
        if not s.daily_count:
            continue
        carrier = carriers[s.contract.supplier]
        node = by_id[s.contract.receiver].node
        work.setdefault(carrier.id, (carrier, []))[1].extend([(s.id, node, s.size)] * s.daily_count)
    tours = []
    for carrier_id in sorted(work):
        carrier, instances = work[carrier_id]
        tours.extend(nearest_neighbor_tours(carrier.node, instances, capacity, node_time_skim,
                                            carrier_id, start_id + len(tours)))
    return tours
