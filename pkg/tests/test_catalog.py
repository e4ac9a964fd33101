import pytest

from quantale_workbench import catalog
from quantale_workbench.errors import UnknownName
from quantale_workbench.lattice import SupLattice
from quantale_workbench.qmodule import Module, revalidate
from quantale_workbench.quantale import Quantale


def test_names_are_sorted_and_unique():
    names = catalog.names()
    assert names == sorted(set(names))
    assert set(catalog.names("quantale")) >= {"TWO", "C3-nil", "C3-idem", "PZ2"}
    assert set(catalog.names()) == {n for k in catalog.KINDS for n in catalog.names(k)}


@pytest.mark.parametrize("name", catalog.names())
def test_every_entry_loads_as_its_kind(name):
    e = catalog.entry(name)
    obj = catalog.load(name)
    expected = {"lattice": SupLattice, "quantale": Quantale, "module": Module, "bimodule": Module}[e.kind]
    assert isinstance(obj, expected)
    if isinstance(obj, Module):
        revalidate(obj)
        assert (obj.side == "bimodule") == (e.kind == "bimodule")
        for _, act in obj.actions():
            # rings are catalog quantales
            assert any(catalog.load(q) == act.ring for q in catalog.names("quantale"))
    assert e.note


def test_minimum_contents():
    two = catalog.load("TWO")
    assert two.size == 2 and two.is_integral()
    M3 = catalog.load("M3")
    assert M3.size == 5 and len(M3.lat.join_irr) == 3 and M3.ring == two
    assert catalog.load("PZ2").size == 4
    for name in ("C3-idem^2", "TWO^2", "diamond", "TWO-point", "C3-nil-reg", "C3-idem-reg", "PZ2-reg"):
        catalog.load(name)


def test_unknown_name():
    with pytest.raises(UnknownName):
        catalog.load("no-such-thing")
    with pytest.raises(ValueError):
        catalog.names("monoid")


def test_load_is_stable():
    assert catalog.load("TWO") is catalog.load("TWO")
