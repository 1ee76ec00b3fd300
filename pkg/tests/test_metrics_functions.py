from pysltc.functions.metrics import *
from pysltc.functions.adjust import ridge_solve, round_and_repair, gap_vector
from pysltc.constants import DEFAULT_LAMBDA_GRID
from pysltc.calibration.simulator import Simulator
from pysltc.functions.tools import substream
from pysltc.errors import EmptyInput, DimensionMismatch
import math
import numpy as np
import pytest


def test_metrics():
    rmse, mae, ratio = metrics([10, 10], [13, 6])
    assert rmse == pytest.approx(math.sqrt(12.5))
    assert mae == 3.5
    assert ratio == 0.35
    assert metrics([5, 5], [5, 5]) == (0.0, 0.0, 0.0)
    assert math.isnan(metrics([0, 0], [1, 1])[2])


def test_metrics_properties():
    rng = substream(4, 0)
    observed = rng.uniform(10, 100, 12)
    simulated = observed + rng.normal(0, 5, 12)
    rmse, mae, ratio = metrics(observed, simulated)
    assert mae <= rmse
    scaled = metrics(observed * 3, simulated * 3)
    assert scaled[0] == pytest.approx(3 * rmse)
    assert scaled[1] == pytest.approx(3 * mae)
    assert scaled[2] == pytest.approx(ratio)
    order = rng.permutation(12)
    assert metrics(observed[order], simulated[order]) == pytest.approx((rmse, mae, ratio))


def test_metrics_errors():
    with pytest.raises(EmptyInput):
        metrics([], [])
    with pytest.raises(DimensionMismatch):
        metrics([1, 2], [1])


def test_loocv_interior():
    A = np.array([[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    y = [1.0, 0.1]
    grid = [0.01, 0.1, 1, 10, 100, 1000, 1e4]
    lam, curve = loocv_lambda(A, y, grid)
    assert lam == 10
    assert [v for v, _ in curve] == grid
    values = dict(curve)
    assert values[10] == pytest.approx(math.sqrt(14165 / 28800.0))
    assert values[0.01] > values[10]
    assert values[1e4] > values[10]


def test_loocv_default_scenario(default_scenario):
    scenario = default_scenario
    config = scenario.config
    simulator = Simulator(scenario.network, scenario.establishments, scenario.screenlines,
                          config.vehicle_capacity, config.mean_contract_size)
    run = simulator.simulate(scenario.initial, 1)
    assert 0 < len(run.classes) < len(run.tours)
    gap = gap_vector(simulator.observed_counts, run.counts)
    lam, curve = loocv_lambda(run.matrix, gap, DEFAULT_LAMBDA_GRID)
    values = [v for _, v in curve]
    best = values.index(min(values))
    assert 0 < best < len(values) - 1
    assert lam == DEFAULT_LAMBDA_GRID[best]
    assert values[best] < values[0]
    assert values[best] < values[-1]


def test_loocv_ties_and_grid():
    A = np.zeros((3, 4))
    lam, curve = loocv_lambda(A, [1, 2, 3, 4], [1, 10, 100])
    assert lam == 100
    assert len({v for _, v in curve}) == 1

    A = np.array([[1.0, 1.0], [1.0, 0.0]])
    assert loocv_lambda(A, [1, 2], [5.0])[0] == 5.0
    with pytest.raises(ValueError):
        loocv_lambda(A, [1, 2], [])
    with pytest.raises(ValueError):
        loocv_lambda(A, [1, 2], [1, 0])
    with pytest.raises(DimensionMismatch):
        loocv_lambda(A[:, :1], [1], [1])
    with pytest.raises(DimensionMismatch):
        loocv_lambda(A, [1, 2, 3], [1])


def test_loocv_matches_refit():
    rng = substream(9, 0)
    A = (rng.random((12, 5)) < 0.4).astype(float)
    y = rng.normal(0, 10, 5)
    _, curve = loocv_lambda(A, y, [0.5, 5.0])
    for lam, value in curve:
        errors = []
        for k in range(5):
            keep = [i for i in range(5) if i != k]
            x = ridge_solve(A[:, keep], y[keep], lam)
            errors.append((A[:, k] @ x - y[k]) ** 2)
        assert value == pytest.approx(math.sqrt(sum(errors) / 5))


def test_adjustment_slack():
    for seed in range(20):
        rng = substream(seed, 5)
        A = (rng.random((9, 4)) < 0.5).astype(float)
        y = rng.normal(0, 20, 4)
        x_star = ridge_solve(A, y, 1.0)
        v = round_and_repair(A, y, 1.0, x_star, np.full(9, 100.0))
        check = adjustment_slack(A, y, x_star, v.rounded)
        assert check["holds"]
        assert check["slack"] >= 0
        assert check["after"] <= check["bound"] + 1e-9
