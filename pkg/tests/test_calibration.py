from pysltc.calibration import *
from pysltc.calibration.calibrator import IterationRecord
from pysltc.calibration.report import load_report_tables
from pysltc.functions.tools import read_table
from pysltc.errors import InvalidConfig, EmptyInput, MissingInput
import os
import math
import filecmp
import pytest


def test_calibration_config():
    config = CalibrationConfig()
    assert config.lambda_grid == [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0]
    assert config.max_iter == 15
    assert config.epsilon is None
    assert CalibrationConfig(max_iter=None).max_iter == 15
    assert CalibrationConfig.from_dict(config.to_dict()).to_dict() == config.to_dict()
    for bad in ({"lambda_grid": []}, {"lambda_grid": [1, -1]}, {"fixed_lambda": 0},
                {"max_iter": 0}, {"epsilon": -1}, {"draws": 0}, {"gtol": 0},
                {"max_iter": "x"}, {"penalty": 1}):
        with pytest.raises(InvalidConfig):
            CalibrationConfig(**bad)
    with pytest.raises(InvalidConfig):
        CalibrationConfig.from_dict("max_iter=3")


def test_iteration_record():
    record = IterationRecord(2, 3.0, 2.0, 0.1, 10.0, tours=5, clones=1)
    assert record.diagnostics()[:2] == (2, 5)
    assert record.pinned_classes is None


def test_simulator(small_scenario):
    scenario = small_scenario
    config = scenario.config
    simulator = Simulator(scenario.network, scenario.establishments, scenario.screenlines,
                          config.vehicle_capacity, config.mean_contract_size)
    run = simulator.simulate(scenario.truth, config.seed)
    assert simulator.screenline_ids == ["E2", "W2", "E4", "W4", "N2", "S2"]
    assert run.matrix.shape == (len(run.classes), 6)
    assert sum(c.count for c in run.classes) + len(run.unobservable) == len(run.tours)
    assert all(s.size <= config.vehicle_capacity for s in run.shipments)
    assert all(s.frequency >= 1 - 1e-9 for s in run.shipments)
    for t in run.tours:
        assert run.routes[t.id].validate(scenario.network, t.node_sequence())
    # every route is a concatenation of shortest path legs, counts follow class counts
    assert list(run.counts) == list(run.matrix.matrix.T @ run.class_counts)
    again = simulator.simulate(scenario.truth, config.seed)
    assert list(again.counts) == list(run.counts)
    assert [t.node_sequence() for t in again.tours] == [t.node_sequence() for t in run.tours]


def test_single_iteration(small_scenario):
    state = Calibrator(small_scenario, CalibrationConfig(max_iter=1)).run()
    assert state.k == 1
    assert not state.converged
    assert state.records[0].lam is None
    assert math.isfinite(state.records[0].rmse)


def test_calibrator(small_scenario, tmp_path):
    first, second = str(tmp_path / "a"), str(tmp_path / "b")
    config = CalibrationConfig(max_iter=2, draws=5, lambda_grid=[0.1, 1, 10])
    state = run_calibration(small_scenario, config, first)
    assert state.k == 2
    assert state.lam in (0.1, 1.0, 10.0)
    assert len(state.loocv_curve) == 3
    assert state.epsilon == pytest.approx(0.005 * sum(small_scenario.observed_counts) / 6)
    assert all(math.isfinite(v) for v in state.rmse)
    assert len(state.params) == 2
    record = state.records[1]
    assert record.slack_holds == 1
    assert record.tours > 0
    assert record.slb_classes > 0

    for name in ("convergence.csv", "iterations.csv", "loocv_curve.csv", "scatter_1.csv",
                 "scatter_2.csv", "slb_classes_2.csv", "mapping_matrix_2.mtx", "adjustment_2.csv",
                 "target_tours_2.csv", "clone_log_2.csv", "removal_log_2.csv",
                 "qo_shipments_2.csv", "origin_distribution_2.csv", "estimation_report_2.csv",
                 "generation_params_1.csv", "supplier_params_2.csv",
                 "shipment_size_params_2.csv", "contracts_1.csv", "shipments_1.csv", "tours_1.csv",
                 "best.csv", "generation_params_best.csv", "supplier_params_best.csv"):
        assert os.path.exists(os.path.join(first, name)), name

    convergence = read_table(os.path.join(first, "convergence.csv"),
                             ("k", "rmse", "mae", "mae_ratio", "lambda"), {"k": "int"})
    assert list(convergence["k"]) == [1, 2]
    adjustment = read_table(os.path.join(first, "adjustment_2.csv"),
                            ("class_index", "x_star", "rounded", "pinned_flag", "count"),
                            {"class_index": "int", "rounded": "int", "pinned_flag": "int",
                             "count": "int"})
    assert list(adjustment["class_index"]) == list(range(record.slb_classes))
    assert all(a >= -c for c, a in zip(adjustment["count"], adjustment["rounded"]))
    classes = read_table(os.path.join(first, "slb_classes_2.csv"),
                         ("class_index", "signature", "count", "member_tour_ids"),
                         {"count": "int", "member_tour_ids": "str"})
    assert all(len(m.split()) == c for m, c in zip(classes["member_tour_ids"], classes["count"]))
    best = read_table(os.path.join(first, "best.csv"), ("k", "mae"), {"k": "int", "mae": "float"})
    assert list(best["k"]) == [state.records[state.best].k]
    assert best["mae"][0] == min(r.mae for r in state.records)

    run_calibration(small_scenario, config, second)
    for name in ("convergence.csv", "adjustment_2.csv", "target_tours_2.csv",
                 "supplier_params_2.csv"):
        assert filecmp.cmp(os.path.join(first, name), os.path.join(second, name), shallow=False)


def test_calibrator_stops_on_epsilon(small_scenario):
    config = CalibrationConfig(max_iter=5, epsilon=float("inf"), fixed_lambda=1.0, draws=5)
    state = Calibrator(small_scenario, config).run()
    assert state.k == 2
    assert state.converged
    assert state.lam == 1.0
    assert state.loocv_curve == []


def test_report(small_scenario, tmp_path):
    out = str(tmp_path / "run")
    run_calibration(small_scenario, CalibrationConfig(max_iter=2, fixed_lambda=1.0, draws=5), out)
    convergence, loocv, scatters = load_report_tables(out)
    assert loocv is None
    assert [k for k, _ in scatters] == [1, 2]
    written = render_report(out)
    assert sorted(os.path.basename(p) for p in written) == \
        ["convergence.svg", "scatter_1.svg", "scatter_2.svg", "scatter_initial_final.svg"]
    with open(os.path.join(out, "convergence.svg")) as f:
        first = f.read()
    render_report(out)
    with open(os.path.join(out, "convergence.svg")) as f:
        assert f.read() == first

    with open(os.path.join(out, "convergence.csv"), "w") as f:
        f.write("k,rmse,mae,mae_ratio,lambda\n")
    os.remove(os.path.join(out, "convergence.svg"))
    with pytest.raises(EmptyInput):
        render_report(out)
    assert not os.path.exists(os.path.join(out, "convergence.svg"))
    with pytest.raises(MissingInput):
        render_report(str(tmp_path / "absent"))


def test_demand_tables(small_scenario, tmp_path):
    scenario = small_scenario
    config = scenario.config
    simulator = Simulator(scenario.network, scenario.establishments, scenario.screenlines,
                          config.vehicle_capacity, config.mean_contract_size)
    run = simulator.simulate(scenario.initial, config.seed)
    writer = ArtifactWriter(str(tmp_path))
    writer.demand(run)
    contracts = read_table(str(tmp_path / "contracts.csv"),
                           ("contract_id", "receiver", "supplier", "size"),
                           {"contract_id": "int", "supplier": "int", "size": "float"})
    assert list(contracts["contract_id"]) == sorted(c.id for c in run.contracts)
    assert sum(contracts["size"]) == pytest.approx(sum(c.size for c in run.contracts))
    shipments = read_table(str(tmp_path / "shipments.csv"),
                           ("shipment_id", "contract_id", "size", "frequency", "daily_count"),
                           {"shipment_id": "int", "frequency": "float", "daily_count": "int"})
    assert len(shipments) == len(run.shipments)
    assert sum(shipments["daily_count"]) == sum(s.daily_count for s in run.shipments)

    tours = read_table(str(tmp_path / "tours.csv"), ("tour_id", "seq", "node_id", "shipment_ids"),
                       {"tour_id": "int", "seq": "int", "node_id": "int"})
    by_tour = dict()
    for tour_id, seq, node, served in tours.itertuples(index=False):
        by_tour.setdefault(tour_id, []).append((seq, node, served.split()))
    assert sorted(by_tour) == sorted(t.id for t in run.tours)
    for t in run.tours:
        rows = by_tour[t.id]
        assert [seq for seq, _, _ in rows] == list(range(len(t.stops) + 2))
        assert [node for _, node, _ in rows] == t.node_sequence()
        assert rows[0][2] == [] and rows[-1][2] == []
        assert [int(s) for _, _, served in rows for s in served] == t.shipment_ids()


def test_best_iteration():
    state = CalibrationState()
    for k, mae in ((1, 5.0), (2, 2.0), (3, 3.0), (4, 2.0)):
        state.append(IterationRecord(k, mae + 1, mae, mae / 10), "params_%s" % k)
    assert state.best == 1
    assert state.best_params == "params_2"


def test_default_scenario_convergence(default_scenario, tmp_path):
    first, second = str(tmp_path / "a"), str(tmp_path / "b")
    config = CalibrationConfig(epsilon=0, max_iter=15)
    state = run_calibration(default_scenario, config, first)
    assert state.k == 15
    assert not state.converged
    ratio = state.mae_ratio
    assert min(ratio[1:]) <= 0.5 * ratio[0]
    assert state.records[state.best].mae_ratio == min(ratio)

    run_calibration(default_scenario, config, second)
    assert filecmp.cmp(os.path.join(first, "convergence.csv"),
                       os.path.join(second, "convergence.csv"), shallow=False)
