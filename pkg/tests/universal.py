"""Universal-property checks for equalizers and coequalizers by hom enumeration."""

from __future__ import annotations

from quantale_workbench.homs import enumerate_homs
from quantale_workbench.qmodule import Hom, coequalizer, equalizer


def equalizer_is_universal(f: Hom, g: Hom, tests) -> int:
    """Every ``h: T -> M`` with ``f h = g h`` factors uniquely through the equalizer.

    Returns the number of cones checked.
    """
    E = equalizer(f, g)
    inc = E.inclusion
    assert inc.is_hom() and inc.is_injective()
    assert inc.then(f).table == inc.then(g).table
    checked = 0
    for T in tests:
        via = enumerate_homs(T, E.module).homs
        for h in enumerate_homs(T, f.src).homs:
            if h.then(f).table != h.then(g).table:
                continue
            mediators = [u for u in via if u.then(inc).table == h.table]
            assert len(mediators) == 1, (T, h.table, [u.table for u in mediators])
            checked += 1
    return checked


def coequalizer_is_universal(f: Hom, g: Hom, tests) -> int:
    """Every ``k: N -> T`` with ``k f = k g`` factors uniquely through the coequalizer."""
    C, q = coequalizer(f, g)
    assert q.is_hom() and q.is_surjective()
    assert f.then(q).table == g.then(q).table
    checked = 0
    for T in tests:
        via = enumerate_homs(C, T).homs
        for k in enumerate_homs(f.dst, T).homs:
            if f.then(k).table != g.then(k).table:
                continue
            mediators = [u for u in via if q.then(u).table == k.table]
            assert len(mediators) == 1, (T, k.table, [u.table for u in mediators])
            checked += 1
    return checked
