import time
import logging
import numpy as np
from pysltc.constants import *
from pysltc.errors import InvalidConfig
from pysltc.classes.demand import DemandParams
from pysltc.classes.estimate import EstimationReport, QuasiObservations
from pysltc.functions.adjust import gap_vector, ridge_solve, first_order_residual, round_and_repair, \
    apply_adjustment
from pysltc.functions.estimate import (quasi_shipments, contract_sizes_from_shipments,
                                       reestimate_generation, origin_distribution,
                                       reassign_suppliers, sample_choice_sets,
                                       reestimate_supplier_params, reestimate_shipment_size)
from pysltc.functions.metrics import metrics, loocv_lambda, adjustment_slack
from pysltc.calibration.simulator import Simulator
from pysltc.calibration.artifacts import ArtifactWriter


class CalibrationConfig():
    """
    Calibration loop settings.

    :param lambda_grid: candidate ridge penalties for cross-validation (> 0).
    :param fixed_lambda: (optional) penalty used instead of cross-validation.
    :param epsilon: (optional) threshold on |RMSE_k - RMSE_k-1| in vehicles/day, by default
                    0.5% of the mean observed count.
    :param max_iter: maximum number of iterations including the baseline (>= 1).
    :param seed: master seed.
    :param reselect_lambda: cross-validate the penalty at every adjustment instead of once.
    :param vehicle_capacity: (optional) vehicle capacity in kg, by default the scenario value.
    :param mean_contract_size: (optional) mean contract size in kg/year, by default the
                               scenario value.
    :param draws: error component draws per choice observation.
    :param choice_set_size: alternatives per estimation choice set.
    :param candidate_cap: supplier candidate set cap in simulation.
    :param min_obs_supplier: minimum choice observations per epg.
    :param min_obs_size: minimum observations per shipment size group.
    :param gtol: gradient infinity norm convergence threshold of the likelihood maximization.
    :param max_shipment_size: (optional) shipment size cap, by default the vehicle capacity.
    """
    DEFAULTS = {"lambda_grid": list(DEFAULT_LAMBDA_GRID), "fixed_lambda": None, "epsilon": None,
                "max_iter": DEFAULT_MAX_ITER, "seed": 1, "reselect_lambda": False,
                "vehicle_capacity": None, "mean_contract_size": None, "draws": DEFAULT_DRAWS,
                "choice_set_size": CHOICE_SET_SIZE, "candidate_cap": CANDIDATE_SUPPLIER_CAP,
                "min_obs_supplier": MIN_SUPPLIER_OBSERVATIONS,
                "min_obs_size": MIN_SHIPMENT_SIZE_OBSERVATIONS, "gtol": ESTIMATION_GTOL,
                "max_shipment_size": None}

    def __init__(self, **kwargs):
        unknown = sorted(set(kwargs) - set(self.DEFAULTS))
        if unknown:
            raise InvalidConfig("unknown calibration fields %s" % unknown)
        for key, value in self.DEFAULTS.items():
            setattr(self, key, kwargs[key] if kwargs.get(key) is not None else value)
        self.validate()

    def validate(self):
        try:
            self.lambda_grid = [float(v) for v in self.lambda_grid]
            self.max_iter, self.seed, self.draws = int(self.max_iter), int(self.seed), int(self.draws)
            self.choice_set_size, self.candidate_cap = int(self.choice_set_size), int(self.candidate_cap)
            self.min_obs_supplier, self.min_obs_size = int(self.min_obs_supplier), int(self.min_obs_size)
            self.gtol = float(self.gtol)
            self.reselect_lambda = bool(self.reselect_lambda)
            for key in ("fixed_lambda", "epsilon", "vehicle_capacity", "mean_contract_size",
                        "max_shipment_size"):
                if getattr(self, key) is not None:
                    setattr(self, key, float(getattr(self, key)))
        except (TypeError, ValueError):
            raise InvalidConfig("invalid calibration field types")
        if not self.lambda_grid or any(not v > 0 for v in self.lambda_grid):
            raise InvalidConfig("lambda_grid should be non-empty and strictly positive")
        if self.fixed_lambda is not None and not self.fixed_lambda > 0:
            raise InvalidConfig("fixed_lambda should be > 0")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise InvalidConfig("epsilon should be >= 0")
        if self.max_iter < 1:
            raise InvalidConfig("max_iter should be >= 1")
        if self.seed < 0:
            raise InvalidConfig("seed should be >= 0")
        if self.draws < 1 or self.choice_set_size < 2 or self.candidate_cap < 1:
            raise InvalidConfig("draws, choice_set_size and candidate_cap should be positive")
        if self.min_obs_supplier < 1 or self.min_obs_size < 1 or not self.gtol > 0:
            raise InvalidConfig("estimation thresholds should be positive")
        for key in ("vehicle_capacity", "mean_contract_size", "max_shipment_size"):
            if getattr(self, key) is not None and not getattr(self, key) > 0:
                raise InvalidConfig("%s should be > 0" % key)

    def to_dict(self):
        return {key: getattr(self, key) for key in self.DEFAULTS}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidConfig("calibration section should be an object")
        return cls(**data)


class IterationRecord():
    __slots__ = ("k", "rmse", "mae", "mae_ratio", "lam", "tours", "slb_classes",
                 "unobservable_tours", "repeated_crossings", "pinned_classes", "clones", "removals",
                 "slack", "slack_holds", "ridge_residual")

    def __init__(self, k, rmse, mae, mae_ratio, lam=None, **diagnostics):
        self.k, self.rmse, self.mae, self.mae_ratio, self.lam = k, rmse, mae, mae_ratio, lam
        for key in self.__slots__[5:]:
            setattr(self, key, diagnostics.get(key))

    def diagnostics(self):
        return tuple(getattr(self, key) for key in ("k",) + self.__slots__[5:])


class CalibrationState():
    """
    Calibration history: one record and one parameter snapshot per iteration.
    """
    def __init__(self):
        self.records = []
        self.params = []
        self.lam = None
        self.loocv_curve = []
        self.epsilon = None
        self.converged = False

    @property
    def k(self):
        return len(self.records)

    def append(self, record, params):
        self.records.append(record)
        self.params.append(params)

    @property
    def rmse(self):
        return [r.rmse for r in self.records]

    @property
    def mae_ratio(self):
        return [r.mae_ratio for r in self.records]

    @property
    def best(self):
        """
        Index of the iteration with the lowest MAE, the earliest one on ties.
        """
        return min(range(len(self.records)), key=lambda i: (self.records[i].mae, i))

    @property
    def best_params(self):
        return self.params[self.best]


class Calibrator():
    """
    Screenline-based tour calibration loop.

    Iteration 1 simulates the initial parameters. Every later iteration adjusts the SLB classes
    of the previous simulation toward the observed counts, derives quasi-observations from the
    Target Tours, re-estimates the three parameter blocks and simulates again. The loop stops
    when the RMSE change drops below epsilon or after max_iter iterations.

    :param scenario: Scenario.
    :param config: CalibrationConfig.
    :param out_dir: (optional) artifact directory, no artifacts when omitted.
    :param logger: (optional) logger, by default "pysltc".
    """
    def __init__(self, scenario, config, out_dir=None, logger=None):
        self.log = logger if logger is not None else logging.getLogger("pysltc")
        self.scenario = scenario
        self.config = config
        self.writer = ArtifactWriter(out_dir) if out_dir is not None else None
        scenario_config = scenario.config
        self.vehicle_capacity = config.vehicle_capacity or \
            (scenario_config.vehicle_capacity if scenario_config is not None else None)
        self.mean_contract_size = config.mean_contract_size or \
            (scenario_config.mean_contract_size if scenario_config is not None else None)
        if self.vehicle_capacity is None or self.mean_contract_size is None:
            raise InvalidConfig("vehicle_capacity and mean_contract_size are required")
        self.simulator = Simulator(scenario.network, scenario.establishments, scenario.screenlines,
                                   self.vehicle_capacity, self.mean_contract_size,
                                   config.candidate_cap, config.max_shipment_size, self.log)
        self.observed = np.array(scenario.observed_counts, dtype=float)

    def select_lambda(self, matrix, gap, k):
        if self.config.fixed_lambda is not None:
            return self.config.fixed_lambda
        lam, curve = loocv_lambda(matrix, gap, self.config.lambda_grid)
        self.log.info("Cross-validated penalty %s over %s values", lam, len(curve))
        self.state.loocv_curve = curve
        if self.writer is not None:
            self.writer.loocv_curve(curve)
            if self.config.reselect_lambda:
                self.writer.loocv_curve(curve, k)
        return lam

    def evaluate(self, k, run, lam=None, **diagnostics):
        rmse, mae, ratio = metrics(self.observed, run.counts)
        record = IterationRecord(k, rmse, mae, ratio, lam, **diagnostics)
        self.log.info("Iteration %s RMSE %s MAE %s MAE ratio %s", k, round(rmse, 4), round(mae, 4),
                      round(ratio, 4))
        if self.writer is not None:
            self.writer.scatter(k, self.simulator.screenline_ids, self.observed, run.counts)
        return record

    def adjust(self, k, run):
        """
        Tour-based demand adjustment of one simulation.

        :return: tuple (TargetTours, penalty, dict of diagnostics).
        """
        gap = gap_vector(self.observed, run.counts)
        matrix = run.matrix
        if self.state.lam is None or (self.config.reselect_lambda and
                                      self.config.fixed_lambda is None):
            self.state.lam = self.select_lambda(matrix, gap, k)
        lam = self.state.lam
        x_star = ridge_solve(matrix, gap, lam)
        residual = first_order_residual(matrix, gap, lam, x_star)
        scale = float(np.max(np.abs(matrix.matrix @ gap))) if len(run.classes) else 0.0
        if residual > RIDGE_RESIDUAL_TOLERANCE * (1 + scale):
            self.log.warning("Iteration %s ridge first-order residual %s", k, residual)
        adjustment = round_and_repair(matrix, gap, lam, x_star, run.class_counts)
        slack = adjustment_slack(matrix, gap, adjustment.x_star, adjustment.rounded)
        if not slack["holds"]:
            self.log.warning("Iteration %s objective after rounding %s exceeds bound %s", k,
                             slack["after"], slack["bound"])
        target = apply_adjustment(run.tours, run.classes, adjustment, self.config.seed, run.routes,
                                  stream_key=(k,))
        self.log.info("Iteration %s adjustment: %s clones, %s removals, %s pinned classes", k,
                      target.clone_count, len(target.removals), int(adjustment.pinned.sum()))
        if self.writer is not None:
            self.writer.slb_classes(k, run.classes)
            self.writer.mapping_matrix(k, matrix)
            self.writer.adjustment(k, run.classes, adjustment)
            self.writer.target_tours(k, target)
        diagnostics = {"tours": len(run.tours), "slb_classes": len(run.classes),
                       "unobservable_tours": len(run.unobservable),
                       "repeated_crossings": run.repeated_crossings,
                       "pinned_classes": int(adjustment.pinned.sum()),
                       "clones": target.clone_count, "removals": len(target.removals),
                       "slack": slack["slack"], "slack_holds": int(slack["holds"]),
                       "ridge_residual": residual}
        return target, lam, diagnostics

    def quasi_observations(self, k, run, target, params):
        sim = self.simulator
        f_hat = quasi_shipments(target, run.shipments)
        x_hat = contract_sizes_from_shipments(run.shipments, f_hat)
        distribution, empty = origin_distribution(run.contracts, f_hat, sim.by_id,
                                                  self.scenario.network.zone_ids)
        observed = [c for c in run.contracts if x_hat[c.id] > 0]
        suppliers, fallbacks = reassign_suppliers(observed, distribution, sim.establishments,
                                                  run.flows, sim.zone_time, params.supplier,
                                                  self.config.seed, (k,))
        choice_sets = sample_choice_sets(observed, suppliers, sim.establishments, run.flows,
                                         self.config.seed, self.config.choice_set_size, (k,))
        if empty:
            self.log.debug("Iteration %s destination zones without QO shipments: %s", k, empty)
        if self.writer is not None:
            self.writer.qo_shipments(k, run.shipments, f_hat, x_hat)
            self.writer.origin_distribution(k, distribution)
        return QuasiObservations(f_hat, x_hat, origins=distribution, empty_zones=empty,
                                 suppliers=suppliers, choice_sets=choice_sets)

    def reestimate(self, k, run, qo, params):
        """
        Re-estimate the three parameter blocks; blocks without enough data keep their values.

        :return: DemandParams.
        """
        sim = self.simulator
        report = EstimationReport()
        generation = reestimate_generation(sim.establishments, run.contracts, qo.x_hat,
                                           params.generation, report)
        contracts = {c.id: c for c in run.contracts}
        supplier = reestimate_supplier_params(qo.choice_sets, contracts, sim.by_id, run.flows,
                                              sim.zone_time, params.supplier, self.config.seed,
                                              self.config.draws, self.config.gtol,
                                              self.config.min_obs_supplier, report)
        shipment_size = reestimate_shipment_size(run.shipments, qo.x_hat, sim.by_id,
                                                 sim.node_distance, sim.densities,
                                                 params.shipment_size, self.config.min_obs_size,
                                                 report)
        flagged = report.flagged()
        if flagged:
            self.log.info("Iteration %s: %s of %s parameter groups kept previous values", k,
                          len(flagged), len(report.rows))
        if self.writer is not None:
            self.writer.estimation_report(k, report)
        return DemandParams(generation, supplier, shipment_size)

    def run(self):
        """
        Run the calibration loop.

        :return: CalibrationState, best_params holds the parameters of the lowest-MAE iteration.
        """
        config = self.config
        self.state = state = CalibrationState()
        state.epsilon = config.epsilon if config.epsilon is not None else \
            DEFAULT_EPSILON_SHARE * float(np.mean(self.observed))
        params = self.scenario.initial.copy()
        t = time.time()
        run = self.simulator.simulate(params, config.seed)
        state.append(self.evaluate(1, run), params)
        if self.writer is not None:
            self.writer.params(1, params)
            self.writer.demand(run, 1)
        for k in range(2, config.max_iter + 1):
            if not run.classes:
                self.log.warning("Iteration %s: no tour crosses a screenline, stop", k)
                break
            target, lam, diagnostics = self.adjust(k, run)
            qo = self.quasi_observations(k, run, target, params)
            params = self.reestimate(k, run, qo, params)
            run = self.simulator.simulate(params, config.seed)
            state.append(self.evaluate(k, run, lam, **diagnostics), params)
            if self.writer is not None:
                self.writer.params(k, params)
            change = abs(state.records[-1].rmse - state.records[-2].rmse)
            if change < state.epsilon:
                state.converged = True
                self.log.info("Converged at iteration %s: RMSE change %s below %s", k,
                              round(change, 6), state.epsilon)
                break
        if self.writer is not None:
            self.writer.convergence(state.records)
            self.writer.iterations(state.records)
            self.writer.best(state.records[state.best], state.best_params)
        first, last = state.records[0], state.records[-1]
        self.log.info("Calibration finished after %s iterations [%s s]: MAE ratio %s -> %s",
                      state.k, round(time.time() - t, 2), round(first.mae_ratio, 4),
                      round(last.mae_ratio, 4))
        if state.best != state.k - 1:
            self.log.info("Lowest MAE at iteration %s: MAE ratio %s", state.records[state.best].k,
                          round(state.records[state.best].mae_ratio, 4))
        return state


def run_calibration(scenario, config, out_dir=None, logger=None):
    return Calibrator(scenario, config, out_dir, logger).run()
