from itertools import product

import pytest

from oracles import left_action_ok
from quantale_workbench import catalog
from quantale_workbench.enumeration import automorphisms, canonical_form, enumerate_modules, lattices, module_structures
from quantale_workbench.homs import enumerate_homs
from quantale_workbench.qmodule import Action, Module


def brute_structures(Q, L):
    """Every valid left action table of ``Q`` on ``L``, by trying all tables."""
    n = L.size
    rows = list(product(range(n), repeat=n))
    out = []
    for table in product(rows, repeat=Q.size):
        if left_action_ok(Q, L, table):
            out.append(table)
    return out


def isomorphic(M, N):
    return any(h.is_iso() for h in enumerate_homs(M, N))


def test_relabeled_lattices_share_a_canonical_form():
    for L in lattices(5):
        forms = {canonical_form(tuple(L.up))}
        for perm in automorphisms(L):
            up = [0] * L.size
            for x in range(L.size):
                up[perm[x]] = sum(1 << perm[y] for y in range(L.size) if L.up[x] >> y & 1)
            forms.add(canonical_form(tuple(up)))
        assert len(forms) == 1


def test_two_modules_are_the_lattices():
    two = catalog.load("TWO")
    mods = list(enumerate_modules(two, 5))
    assert len(mods) == sum(len(lattices(n)) for n in range(1, 6))


@pytest.mark.parametrize("qname,n", [("C3-nil", 2), ("C3-nil", 3), ("C3-idem", 2), ("C3-idem", 3), ("PZ2", 2)])
def test_module_structures_match_brute_force_up_to_iso(qname, n):
    Q = catalog.load(qname)
    for L in lattices(n):
        found = module_structures(Q, L)
        for M in found:
            assert left_action_ok(Q, L, M.left.table)
        for a in range(len(found)):
            for b in range(a + 1, len(found)):
                assert not isomorphic(found[a], found[b])
        for table in brute_structures(Q, L):
            M = Module(L, left=Action(Q, table))
            assert any(isomorphic(M, F) for F in found)


def test_enumeration_order_is_stable():
    Q = catalog.load("C3-nil")
    first = [M.left.table for M in enumerate_modules(Q, 4)]
    second = [M.left.table for M in enumerate_modules(Q, 4)]
    assert first == second
    sizes = [M.size for M in enumerate_modules(Q, 4)]
    assert sizes == sorted(sizes)
