from pysltc.functions.tools import *
from pysltc.errors import MissingInput, SchemaViolation
import math
import numpy as np
import pytest


def test_round_half_away():
    assert list(round_half_away([0.5, -0.5, 1.5, -1.5, 2.4, -2.6, 0.0])) == [1, -1, 2, -2, 2, -3, 0]
    assert round_half_away(1.6) == 2
    assert round_half_away(-0.4) == 0
    assert round_half_away([1.2]).dtype == np.int64


def test_substream():
    a = substream(7, 1, 10, 2).random(5)
    b = substream(7, 1, 10, 2).random(5)
    assert list(a) == list(b)
    assert list(substream(7, 1, 10, 3).random(5)) != list(a)
    assert list(substream(8, 1, 10, 2).random(5)) != list(a)
    # draw order of other entities does not matter
    substream(7, 1, 11, 0).random(100)
    assert list(substream(7, 1, 10, 2).random(5)) == list(a)


def test_compensated_sum():
    assert compensated_sum([0.1] * 10) == 1.0
    assert compensated_sum([1e16, 1.0, -1e16]) == 1.0
    assert compensated_sum([]) == 0.0


def test_labels():
    assert commodity_of("food.retail") == "food"
    assert commodity_of("food") == "food"
    assert epg_label("food", "retail", "factory") == "food.retail.factory"


def test_tables(tmp_path):
    path = str(tmp_path / "t.csv")
    write_table(path, [(1, 0.5, "a", 1), (2, 1.25, "b", 0)], ("id", "v", "name", "flag"))
    frame = read_table(path, ("id", "v", "name", "flag"),
                       {"id": "int", "v": "float", "name": "str", "flag": "bool"})
    assert list(frame["id"]) == [1, 2]
    assert list(frame["v"]) == [0.5, 1.25]
    assert list(frame["name"]) == ["a", "b"]
    assert list(frame["flag"]) == [True, False]

    values = [0.1 + 0.2, 1 / 3.0, math.pi * 1e-7, -2.0 / 7 * 1e12]
    write_table(path, [(i, v) for i, v in enumerate(values)], ("id", "v"))
    assert list(read_table(path, ("v",), {"v": "float"})["v"]) == values


def test_table_errors(tmp_path):
    with pytest.raises(MissingInput):
        read_table(str(tmp_path / "absent.csv"), ("id",))

    path = str(tmp_path / "bad.csv")
    with open(path, "w") as f:
        f.write("id,v\n1,0.5\n2,abc\n")
    with pytest.raises(SchemaViolation) as err:
        read_table(path, ("id", "v"), {"id": "int", "v": "float"})
    assert "row 3" in str(err.value)
    assert "column v" in str(err.value)

    with pytest.raises(SchemaViolation):
        read_table(path, ("id", "w"))

    with open(path, "w") as f:
        f.write("id,v\n1,\n")
    with pytest.raises(SchemaViolation):
        read_table(path, ("id", "v"), {"v": "float"})

    with open(path, "w") as f:
        f.write("")
    with pytest.raises(SchemaViolation):
        read_table(path, ("id",))
