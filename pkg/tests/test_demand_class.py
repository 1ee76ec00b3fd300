from pysltc.classes.demand import *
from pysltc.functions.tools import read_table
from pysltc.errors import InvalidConfig, MissingGroupParams, SchemaViolation
import pytest


def params():
    return DemandParams(
        GenerationParams({"food.retail": (1, 2, 3, 0.25)}, {"food.retail": (4, 5, 6, 0, 0.5)}),
        SupplierChoiceParams({"food.retail.factory": (-1.5, 0.6, 0, 0.5, 0.5, 0.5, 0.3)}, 20),
        ShipmentSizeParams({"food.retail": (-0.72, 0.5, 0.1, -0.05)}))


def test_establishment():
    e = Establishment(1, 2, 3, 100, 5, "food.retail", RETAIL)
    assert e.commodity == "food"
    assert not e.is_carrier
    with pytest.raises(InvalidConfig):
        Establishment(1, 2, 3, 100, 5, "food.retail", "warehouse")
    with pytest.raises(InvalidConfig):
        Establishment(1, 2, 3, 0, 5, "food.retail", RETAIL)


def test_params_lookup():
    p = params()
    assert p.generation.groups == ["food.retail"]
    assert list(p.supplier["food.retail.factory"]) == [-1.5, 0.6, 0, 0.5, 0.5, 0.5, 0.3]
    assert "food.retail.factory" in p.supplier
    assert "food.retail.office" not in p.supplier
    with pytest.raises(MissingGroupParams):
        p.supplier["food.retail.office"]
    with pytest.raises(MissingGroupParams):
        p.shipment_size["goods.retail"]
    with pytest.raises(MissingGroupParams):
        p.generation.consumption_params("goods.retail")
    with pytest.raises(InvalidConfig):
        SupplierChoiceParams({"food.retail.factory": (0, 0, 0, 0, -0.1, 0, 0)})
    with pytest.raises(InvalidConfig):
        ShipmentSizeParams({"food.retail": (0, 0)})


def test_params_copy():
    p = params()
    q = p.copy()
    q.generation.prod["food.retail"][0] = 99
    q.supplier.params["food.retail.factory"][0] = 99
    assert p.generation.prod["food.retail"][0] == 1
    assert p.supplier["food.retail.factory"][0] == -1.5
    assert q.supplier.draws == 20


def test_params_csv(tmp_path):
    p = params()
    p.save(str(tmp_path), "_3")
    assert (tmp_path / "generation_params_3.csv").exists()
    loaded = DemandParams.load(str(tmp_path), "_3", draws=20)
    assert list(loaded.generation.prod["food.retail"]) == [1, 2, 3, 0.25]
    assert list(loaded.generation.cons["food.retail"]) == [4, 5, 6, 0, 0.5]
    assert list(loaded.supplier["food.retail.factory"]) == [-1.5, 0.6, 0, 0.5, 0.5, 0.5, 0.3]
    assert list(loaded.shipment_size["food.retail"]) == [-0.72, 0.5, 0.1, -0.05]
    assert loaded.supplier.draws == 20

    frame = read_table(str(tmp_path / "generation_params_3.csv"), ("group", "block"))
    assert list(frame["block"]) == ["prod", "cons"]

    with open(str(tmp_path / "generation_params_3.csv"), "a") as f:
        f.write("food.office,other,0,0,0,0,0\n")
    with pytest.raises(InvalidConfig):
        GenerationParams.from_csv(str(tmp_path / "generation_params_3.csv"))
    with open(str(tmp_path / "shipment_size_params_3.csv"), "w") as f:
        f.write("group,const,size\nfood.retail,1,2\n")
    with pytest.raises(SchemaViolation):
        ShipmentSizeParams.from_csv(str(tmp_path / "shipment_size_params_3.csv"))


def test_contract_shipment_tour():
    c = Contract(7, 1, "food", 100.0, 2, 3, "food.retail.factory")
    s = Shipment(c, 25.0, 4.0, 1)
    assert s.id == 7
    with pytest.raises(ValueError):
        Contract(8, 1, "food", 0.0)

    t = NodeTour(1, 5, 10, [(11, [7]), (12, [8, 9])], 300)
    assert t.node_sequence() == [10, 11, 12, 10]
    assert t.shipment_ids() == [7, 8, 9]
    clone = t.clone(2)
    assert clone.id == 2
    assert clone.node_sequence() == t.node_sequence()
    clone.stops[0][1].append(99)
    assert t.shipment_ids() == [7, 8, 9]

