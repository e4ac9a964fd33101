import pytest

from oracles import brute_homs, is_hom, small_hom_pairs
from quantale_workbench import catalog
from quantale_workbench.errors import NotFree, ValidationError
from quantale_workbench.homs import (
    END_ORIENTATION,
    dual_basis,
    dual_module,
    end_quantale,
    enumerate_homs,
    hom_module,
)
from quantale_workbench.qmodule import free_module, regular, revalidate
from quantale_workbench.quantale import iso_failure, quantale_isomorphic

QUANTALES = catalog.names("quantale")


@pytest.mark.parametrize("case", small_hom_pairs(), ids=lambda c: c[0])
def test_enumeration_matches_brute_force(case):
    _, M, N = case
    assert [h.table for h in enumerate_homs(M, N)] == brute_homs(M, N)


@pytest.mark.parametrize("name", QUANTALES)
def test_homs_of_regular_module_are_right_multiplications(name):
    Q = catalog.load(name)
    R = regular(Q, "left")
    tables = {h.table for h in enumerate_homs(R, R)}
    right_mults = {tuple(Q.mul[x][r] for x in range(Q.size)) for r in range(Q.size)}
    assert tables == right_mults
    # r is recovered as the image of the unit
    assert len(tables) == Q.size


@pytest.mark.parametrize("name", QUANTALES)
def test_end_of_regular_module_is_the_quantale(name):
    Q = catalog.load(name)
    E = end_quantale(regular(Q, "left"))
    assert E.orientation == "h.g = g o h"
    assert quantale_isomorphic(Q, E.quantale) is not None
    # r -> (x -> x r) is itself an isomorphism
    fwd = [E.index(tuple(Q.mul[x][r] for x in range(Q.size))) for r in range(Q.size)]
    assert iso_failure(Q, E.quantale, fwd) is None


def test_end_orientation_for_right_modules():
    Q = catalog.load("MAT2-TWO")
    E = end_quantale(regular(Q, "right"))
    assert END_ORIENTATION["right"] == "h.g = h o g"
    # endomorphisms of the right regular module are left multiplications, composed in order
    for h in range(E.quantale.size):
        for g in range(E.quantale.size):
            comp = tuple(E.hom(h).table[y] for y in E.hom(g).table)
            assert E.hom(E.quantale.mul[h][g]).table == comp
    assert quantale_isomorphic(Q, E.quantale) is not None


def test_end_of_two_squared():
    E = end_quantale(catalog.load("TWO^2"))
    assert E.quantale.size == 16
    assert not E.quantale.is_commutative()
    assert all(is_hom(E.module, E.module, h.table) for h in E.homs)


def test_hom_module_structure_is_valid():
    # Hom_TWO(TWO^2, TWO^2-bi) over the left action keeps the right action of the target
    M = catalog.load("TWO^2")
    N = catalog.load("TWO^2-bi")
    H, homs = hom_module(M, N, over="left")
    revalidate(H)
    assert H.side == "right" and H.size == len(homs)
    B = catalog.load("C3-nil-bireg")
    H2, _ = hom_module(B, B, over="left")
    assert H2.side == "bimodule"
    revalidate(H2)


def test_hom_module_rejects_mismatched_rings():
    with pytest.raises(ValidationError):
        enumerate_homs(catalog.load("TWO^2"), catalog.load("PZ2-reg"))


@pytest.mark.parametrize("name", ["TWO^2", "diamond", "C3-nil-reg", "MAT2-TWO-col", "PZ2-triv"])
def test_dual_module_satisfies_bimodule_laws(name):
    M = catalog.load(name)
    D = dual_module(M)
    revalidate(D.module)
    assert D.module.left.ring == D.end.quantale
    assert D.module.right.ring == M.ring
    Q = M.ring
    for f in range(len(D.homs)):
        for q in range(Q.size):
            g = D.hom(D.module.ract(f, q))
            assert g.table == tuple(Q.mul[y][q] for y in D.hom(f).table)


def test_dual_basis_of_free_modules():
    for name, n in (("TWO", 2), ("C3-nil", 2), ("PZ2", 1), ("MAT2-TWO", 1)):
        Q = catalog.load(name)
        F, gens = free_module(Q, n)
        basis = dual_basis(F)
        assert len(basis) == n
        for i, e in enumerate(basis):
            assert [e.table[g] for g in gens] == [Q.unit if i == j else Q.lat.bot for j in range(n)]


def test_dual_basis_needs_a_free_module():
    with pytest.raises(NotFree):
        dual_basis(catalog.load("M3"))
