from pysltc.classes.estimate import *
from pysltc.functions.tools import read_table
import numpy as np


def test_choice_data():
    X = np.ones((2, 3, 4))
    E = np.zeros((2, 3, 3))
    E[1, 2] = (1, 0, 1)
    mask = np.array([[True, True, True], [True, True, False]])
    data = ChoiceData(X, E, mask, [0, 1])
    # masked alternatives do not count as differing error components
    assert list(data.homogeneous) == [True, True]
    assert data.X[1, 2].sum() == 0
    E[0, 1] = (0, 1, 1)
    assert list(ChoiceData(X, E, mask, [0, 1]).homogeneous) == [False, True]
    sub = data.subset([1])
    assert len(sub) == 1
    assert list(sub.chosen) == [1]
    assert ChoiceObservation(1, "e", [4, 2, 3]).chosen == 4


def test_estimation_report(tmp_path):
    report = EstimationReport()
    report.add("production", "food.retail", "ok", 12, r2=0.9)
    report.add("supplier", "food.retail.factory", "non_converged", 40)
    assert report.status("production", "food.retail") == "ok"
    assert report.status("supplier", "food.retail.office") is None
    assert [r["group"] for r in report.flagged()] == ["food.retail.factory"]
    path = str(tmp_path / "report.csv")
    report.to_csv(path)
    frame = read_table(path, EstimationReport.COLUMNS, {"n_obs": "int"})
    assert list(frame["status"]) == ["ok", "non_converged"]
    assert list(frame["n_obs"]) == [12, 40]
