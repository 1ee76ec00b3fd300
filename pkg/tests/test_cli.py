from pysltc.cli import main, load_config, lambda_grid, parser
from pysltc.errors import InvalidConfig, MissingInput
import os
import json
import argparse
import pytest

from tests.conftest import SMALL_SCENARIO


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    config = str(root / "config.json")
    with open(config, "w") as f:
        json.dump({"scenario": SMALL_SCENARIO, "calibration": {"max_iter": 2, "draws": 5}}, f)
    scenario = str(root / "scenario")
    assert main(["synth", "--config", config, "--out-dir", scenario]) == 0
    return root, config, scenario


def test_load_config(tmp_path):
    assert load_config(None) == {"scenario": {}, "calibration": {}}
    path = str(tmp_path / "c.json")
    with open(path, "w") as f:
        json.dump({"calibration": {"max_iter": 3}}, f)
    assert load_config(path) == {"scenario": {}, "calibration": {"max_iter": 3}}
    with open(path, "w") as f:
        json.dump({"plots": {}}, f)
    with pytest.raises(InvalidConfig):
        load_config(path)
    with open(path, "w") as f:
        f.write("{broken")
    with pytest.raises(InvalidConfig):
        load_config(path)
    with pytest.raises(MissingInput):
        load_config(str(tmp_path / "absent.json"))


def test_arguments():
    assert lambda_grid("0.1, 1,10") == [0.1, 1.0, 10.0]
    with pytest.raises(argparse.ArgumentTypeError):
        lambda_grid("a,b")
    args = parser().parse_args(["calibrate", "--scenario", "s", "--out-dir", "o", "--lambda", "5",
                                "--reselect-lambda"])
    assert args.fixed_lambda == 5.0
    assert args.reselect_lambda
    with pytest.raises(SystemExit):
        parser().parse_args(["calibrate", "--out-dir", "o"])


def test_synth_command(workspace):
    root, config, scenario = workspace
    for name in ("nodes.csv", "links.csv", "screenlines.csv", "establishments.csv",
                 "scenario.json"):
        assert os.path.exists(os.path.join(scenario, name))


def test_simulate_and_loocv(workspace):
    root, config, scenario = workspace
    out = str(root / "simulate")
    assert main(["simulate", "--config", config, "--scenario", scenario, "--params", "true",
                 "--out-dir", out]) == 0
    for name in ("simulated_counts.csv", "slb_classes_1.csv", "mapping_matrix_1.mtx", "contracts.csv",
                 "shipments.csv", "tours.csv"):
        assert os.path.exists(os.path.join(out, name))
    out = str(root / "loocv")
    assert main(["loocv", "--scenario", scenario, "--lambda-grid", "0.1,1,10", "--out-dir",
                 out]) == 0
    with open(os.path.join(out, "loocv_curve.csv")) as f:
        assert len(f.read().strip().splitlines()) == 4


def test_calibrate_and_report(workspace):
    root, config, scenario = workspace
    out = str(root / "calibrate")
    assert main(["calibrate", "--config", config, "--scenario", scenario, "--lambda", "1",
                 "--out-dir", out]) == 0
    assert os.path.exists(os.path.join(out, "convergence.csv"))
    assert main(["report", "--out-dir", out]) == 0
    assert os.path.exists(os.path.join(out, "convergence.svg"))


def test_errors(workspace, tmp_path):
    root, config, scenario = workspace
    assert main(["calibrate", "--scenario", str(tmp_path / "absent"), "--out-dir",
                 str(tmp_path / "o")]) == 1
    empty = str(tmp_path / "empty")
    os.makedirs(empty)
    with open(os.path.join(empty, "convergence.csv"), "w") as f:
        f.write("k,rmse,mae,mae_ratio,lambda\n")
    assert main(["report", "--out-dir", empty]) == 1
    assert not os.path.exists(os.path.join(empty, "convergence.svg"))
    bad = str(tmp_path / "bad.json")
    with open(bad, "w") as f:
        json.dump({"calibration": {"max_iter": 0}}, f)
    assert main(["calibrate", "--config", bad, "--scenario", scenario, "--out-dir",
                 str(tmp_path / "o")]) == 1
