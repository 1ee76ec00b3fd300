import os
import sys
import json
import logging
import argparse
from pysltc.errors import SltcError, InvalidConfig, MissingInput
from pysltc.classes.scenario import Scenario, ScenarioConfig, synth
from pysltc.calibration.simulator import Simulator
from pysltc.calibration.calibrator import CalibrationConfig, Calibrator
from pysltc.calibration.artifacts import ArtifactWriter
from pysltc.calibration.report import render_report
from pysltc.functions.adjust import gap_vector
from pysltc.functions.metrics import metrics, loocv_lambda

log = logging.getLogger("pysltc")

CONFIG_SECTIONS = ("scenario", "calibration")


def load_config(path):
    """
    Read the JSON configuration file.

    :return: dict with "scenario" and "calibration" sections (empty when absent).
    """
    if path is None:
        return {s: {} for s in CONFIG_SECTIONS}
    if not os.path.exists(path):
        raise MissingInput("config file %s not found" % path)
    with open(path) as f:
        try:
            data = json.load(f)
        except ValueError as err:
            raise InvalidConfig("%s: invalid JSON: %s" % (path, err))
    if not isinstance(data, dict):
        raise InvalidConfig("%s: top level should be an object" % path)
    unknown = sorted(set(data) - set(CONFIG_SECTIONS))
    if unknown:
        raise InvalidConfig("%s: unknown sections %s" % (path, unknown))
    return {s: dict(data.get(s) or {}) for s in CONFIG_SECTIONS}


def lambda_grid(value):
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("invalid lambda grid %s" % value)


def calibration_config(args, config):
    section = dict(config["calibration"])
    overrides = {"seed": args.seed, "fixed_lambda": getattr(args, "fixed_lambda", None),
                 "lambda_grid": getattr(args, "lambda_grid", None),
                 "epsilon": getattr(args, "epsilon", None), "max_iter": getattr(args, "max_iter", None)}
    section.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "reselect_lambda", False):
        section["reselect_lambda"] = True
    return CalibrationConfig.from_dict(section)


def build_simulator(scenario, config):
    capacity = config.vehicle_capacity or (scenario.config.vehicle_capacity if scenario.config else None)
    contract = config.mean_contract_size or \
        (scenario.config.mean_contract_size if scenario.config else None)
    if capacity is None or contract is None:
        raise InvalidConfig("vehicle_capacity and mean_contract_size are required")
    return Simulator(scenario.network, scenario.establishments, scenario.screenlines, capacity,
                     contract, config.candidate_cap, config.max_shipment_size)


def cmd_synth(args, config):
    section = dict(config["scenario"])
    if args.seed is not None:
        section["seed"] = args.seed
    scenario = synth(ScenarioConfig.from_dict(section))
    scenario.save(args.out_dir)
    log.info("Scenario written to %s", args.out_dir)


def cmd_simulate(args, config):
    calibration = calibration_config(args, config)
    scenario = Scenario.load(args.scenario, calibration.draws)
    params = scenario.initial if args.params == "initial" else scenario.truth
    if params is None:
        raise MissingInput("scenario %s has no ground-truth parameters" % args.scenario)
    simulator = build_simulator(scenario, calibration)
    run = simulator.simulate(params, calibration.seed)
    writer = ArtifactWriter(args.out_dir)
    writer.counts("simulated_counts.csv", simulator.screenline_ids, simulator.observed_counts,
                  run.counts)
    writer.slb_classes(1, run.classes)
    writer.mapping_matrix(1, run.matrix)
    writer.demand(run)
    rmse, mae, ratio = metrics(simulator.observed_counts, run.counts)
    log.info("RMSE %s MAE %s MAE ratio %s, %s tours cross a screenline more than once",
             round(rmse, 4), round(mae, 4), round(ratio, 4), run.repeated_crossings)


def cmd_loocv(args, config):
    calibration = calibration_config(args, config)
    scenario = Scenario.load(args.scenario, calibration.draws)
    simulator = build_simulator(scenario, calibration)
    run = simulator.simulate(scenario.initial, calibration.seed)
    gap = gap_vector(simulator.observed_counts, run.counts)
    lam, curve = loocv_lambda(run.matrix, gap, calibration.lambda_grid)
    ArtifactWriter(args.out_dir).loocv_curve(curve)
    log.info("Chosen penalty %s", lam)
    for value, rmse in curve:
        log.info("lambda %s CV-RMSE %s", value, round(rmse, 6))


def cmd_calibrate(args, config):
    calibration = calibration_config(args, config)
    scenario = Scenario.load(args.scenario, calibration.draws)
    state = Calibrator(scenario, calibration, args.out_dir).run()
    log.info("Calibration state: %s iterations, converged %s", state.k, state.converged)


def cmd_report(args, config):
    render_report(args.out_dir)


def parser():
    p = argparse.ArgumentParser(prog="sltc", description="Screenline-based tour calibration of "
                                                         "agent-based freight demand")
    p.add_argument("--log-level", default="INFO",
                   choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = p.add_subparsers(dest="command")
    sub.required = True

    def command(name, handler, help):
        c = sub.add_parser(name, help=help)
        c.set_defaults(handler=handler)
        c.add_argument("--config", default=None, help="JSON configuration file")
        c.add_argument("--seed", type=int, default=None, help="master seed")
        c.add_argument("--out-dir", required=True, help="output directory")
        return c

    command("synth", cmd_synth, "generate a synthetic scenario")
    c = command("simulate", cmd_simulate, "simulate the demand chain once")
    c.add_argument("--scenario", required=True, help="scenario directory")
    c.add_argument("--params", choices=("initial", "true"), default="initial")
    c = command("loocv", cmd_loocv, "cross-validate the ridge penalty")
    c.add_argument("--scenario", required=True, help="scenario directory")
    c.add_argument("--lambda-grid", type=lambda_grid, default=None,
                   help="comma separated penalties")
    c = command("calibrate", cmd_calibrate, "run the calibration loop")
    c.add_argument("--scenario", required=True, help="scenario directory")
    c.add_argument("--lambda", dest="fixed_lambda", type=float, default=None,
                   help="fixed penalty, skips cross-validation")
    c.add_argument("--lambda-grid", type=lambda_grid, default=None,
                   help="comma separated penalties")
    c.add_argument("--epsilon", type=float, default=None, help="RMSE change threshold")
    c.add_argument("--max-iter", type=int, default=None, help="maximum iterations")
    c.add_argument("--reselect-lambda", action="store_true",
                   help="cross-validate the penalty at every iteration")
    command("report", cmd_report, "render SVG charts from calibration outputs")
    return p


def main(argv=None):
    args = parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        args.handler(args, load_config(args.config))
    except SltcError as err:
        log.error("%s", err)
        print("error: %s" % err, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
