import logging
import time
from pysltc.constants import CANDIDATE_SUPPLIER_CAP
from pysltc.classes.network import validate_screenlines
from pysltc.functions.network import travel_time_skim, distance_skim, route_tour
from pysltc.functions.demand import (freight_generation, split_contracts, supplier_selection,
                                     establishment_density, shipment_size_frequency,
                                     assign_carriers, form_tours)
from pysltc.functions.slb import (extract_classes, assemble_matrix, class_counts,
                                  simulated_counts, repeated_crossing_tours)


class SimulationRun():
    """
    Outputs of one pass of the demand chain.
    """
    def __init__(self, flows, contracts, shipments, tours, routes, classes, unobservable, matrix):
        self.flows = flows
        self.contracts = contracts
        self.shipments = shipments
        self.tours = tours
        self.routes = routes
        self.classes = classes
        self.unobservable = unobservable
        self.matrix = matrix
        self.class_counts = class_counts(classes)
        self.counts = simulated_counts(matrix, self.class_counts)
        self.repeated_crossings = repeated_crossing_tours(classes)


class Simulator():
    """
    Freight demand chain: generation, contracts, supplier selection, shipment size and
    frequency, daily tours, routing and screenline aggregation.

    Skims, densities and carrier assignment do not depend on parameters and are computed
    once per simulator.

    :param network: RoadNetwork.
    :param establishments: list of Establishment.
    :param screenlines: list of Screenline, column order of the mapping matrix.
    :param vehicle_capacity: vehicle capacity in kg.
    :param mean_contract_size: mean contract size in kg/year.
    :param candidate_cap: (optional) supplier candidate set cap, by default 200.
    :param max_shipment_size: (optional) shipment size cap, by default the vehicle capacity.
    :param logger: (optional) logger, by default "pysltc".
    """
    def __init__(self, network, establishments, screenlines, vehicle_capacity, mean_contract_size,
                 candidate_cap=CANDIDATE_SUPPLIER_CAP, max_shipment_size=None, logger=None):
        self.log = logger if logger is not None else logging.getLogger("pysltc")
        self.network = network
        self.establishments = sorted(establishments, key=lambda e: e.id)
        self.by_id = {e.id: e for e in self.establishments}
        self.screenlines = list(screenlines)
        self.screenline_ids = [s.id for s in self.screenlines]
        self.owner = validate_screenlines(self.screenlines, network)
        self.vehicle_capacity = float(vehicle_capacity)
        self.mean_contract_size = float(mean_contract_size)
        self.candidate_cap = int(candidate_cap)
        self.max_shipment_size = self.vehicle_capacity if max_shipment_size is None \
            else float(max_shipment_size)

        nodes = sorted({e.node for e in self.establishments})
        network.validate(nodes)
        t = time.time()
        self.zone_time = travel_time_skim(network, "zone")
        self.node_time = travel_time_skim(network, "node", nodes)
        self.node_distance = distance_skim(network, "node", nodes)
        self.densities = establishment_density(self.establishments, network)
        self.carriers = assign_carriers(self.establishments, self.node_time)
        self.log.info("Simulator ready: %s zones, %s establishment nodes, %s screenlines [%s s]",
                      len(self.zone_time), len(nodes), len(self.screenlines),
                      round(time.time() - t, 2))

    @property
    def observed_counts(self):
        return [s.observed_count for s in self.screenlines]

    def simulate(self, params, seed, stream_key=()):
        """
        Run the demand chain once.

        :param params: DemandParams.
        :param seed: master seed.
        :param stream_key: (optional) extra substream key components.
        :return: SimulationRun.
        """
        t = time.time()
        flows = freight_generation(self.establishments, params.generation)
        contracts = split_contracts(self.establishments, flows, self.mean_contract_size)
        supplier_selection(self.establishments, contracts, flows, self.zone_time, params.supplier,
                           seed, self.candidate_cap, stream_key)
        shipments = shipment_size_frequency(contracts, self.by_id, self.node_distance,
                                            self.densities, params.shipment_size,
                                            self.max_shipment_size)
        tours = form_tours(shipments, self.establishments, self.network, self.vehicle_capacity, seed,
                           self.node_time, self.carriers, stream_key)
        routes = {tour.id: route_tour(self.network, tour) for tour in tours}
        classes, unobservable = extract_classes(tours, routes, self.owner)
        matrix = assemble_matrix(classes, self.screenline_ids)
        run = SimulationRun(flows, contracts, shipments, tours, routes, classes, unobservable, matrix)
        self.log.info("Simulated %s contracts, %s tours, %s SLB classes, %s unobservable tours "
                      "[%s s]", len(contracts), len(tours), len(classes), len(unobservable),
                      round(time.time() - t, 2))
        if run.repeated_crossings:
            self.log.debug("%s tours cross a screenline more than once", run.repeated_crossings)
        return run
