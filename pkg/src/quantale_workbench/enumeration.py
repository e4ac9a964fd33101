"""Finite lattices and module structures up to isomorphism.

Lattices with ``n`` elements are generated as naturally labeled posets (bottom
``0``, top ``n-1``, ``i <= j`` only when ``i < j``) and deduplicated by a
canonical form: the least relabeled up-mask tuple over all relabelings that
keep a cheap element profile sorted.  This is practical up to about eight
elements.

Left Q-module structures on a lattice ``L`` are exactly the quantale
homomorphisms ``Q -> SupEnd(L)``.  They are searched by assigning a
join-preserving endomap to each join-irreducible of ``Q`` and validating the
extension; isomorphic structures are merged by conjugating with the lattice
automorphisms.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product
from typing import Iterator

from .errors import MissingJoin, NoBottom, ValidationError
from .homs import enumerate_homs
from .lattice import SupLattice, iter_bits
from .qmodule import Module, validate_module
from .quantale import Quantale


def _profile(up: tuple[int, ...], x: int) -> tuple[int, int]:
    down = sum(1 for y in range(len(up)) if up[y] >> x & 1)
    return (down, bin(up[x]).count("1"))


def _relabelings(up: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Maps ``old id -> new id`` that list elements in order of their profile."""
    n = len(up)
    order = sorted(range(n), key=lambda x: _profile(up, x))
    groups: list[list[int]] = []
    for x in order:
        if groups and _profile(up, groups[-1][0]) == _profile(up, x):
            groups[-1].append(x)
        else:
            groups.append([x])
    for choice in product(*(permutations(g) for g in groups)):
        perm = [0] * n
        pos = 0
        for g in choice:
            for x in g:
                perm[x] = pos
                pos += 1
        yield tuple(perm)


def _relabel(up: tuple[int, ...], perm: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(up)
    for x, m in enumerate(up):
        out[perm[x]] = sum(1 << perm[y] for y in iter_bits(m))
    return tuple(out)


def canonical_form(up: tuple[int, ...]) -> tuple[int, ...]:
    return min(_relabel(up, p) for p in _relabelings(up))


def automorphisms(L: SupLattice) -> list[tuple[int, ...]]:
    """Order automorphisms of ``L`` as id tables, identity first."""
    up = L.up
    out = [p for p in _relabelings(up) if _relabel(up, p) == up]
    out.sort(key=lambda p: p != tuple(range(L.size)))
    return out


def _names(n: int) -> list[str]:
    if n == 1:
        return ["0"]
    inner = [chr(ord("a") + i) for i in range(n - 2)]
    return ["0", *inner, "1"]


def _transitive(rel: dict[int, int], n: int) -> bool:
    for i in range(n):
        for j in iter_bits(rel[i]):
            if rel[j] & ~rel[i]:
                return False
    return True


@lru_cache(maxsize=None)
def lattices(n: int) -> tuple[SupLattice, ...]:
    """All lattices with ``n`` elements up to isomorphism, in canonical order."""
    if n < 1:
        return ()
    if n == 1:
        return (SupLattice.from_up_masks(["0"], [1]),)
    inner = list(range(1, n - 1))
    pairs = [(i, j) for i in inner for j in inner if i < j]
    found: dict[tuple[int, ...], None] = {}
    top = n - 1
    for bits in range(1 << len(pairs)):
        rel = {i: 1 << i for i in range(n)}
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                rel[i] |= 1 << j
        if not _transitive(rel, n):
            continue
        up = [rel[i] | (1 << top) for i in range(n)]
        up[0] = (1 << n) - 1
        up = tuple(up)
        try:
            SupLattice.from_up_masks(_names(n), up)
        except (MissingJoin, NoBottom):
            continue
        found.setdefault(canonical_form(up), None)
    out = []
    for up in sorted(found):
        # canonical labels keep bottom first and top last, and respect the order
        out.append(SupLattice.from_up_masks(_names(n), up))
    return tuple(out)


# -- module structures ------------------------------------------------------------------


def _sup_endomaps(L: SupLattice) -> list[tuple[int, ...]]:
    return [h.table for h in enumerate_homs(Module(L), Module(L)).homs]


def _canonical_action(table: tuple[tuple[int, ...], ...], autos: list[tuple[int, ...]]) -> tuple:
    best = None
    for p in autos:
        inv = [0] * len(p)
        for x, y in enumerate(p):
            inv[y] = x
        conj = tuple(tuple(p[row[inv[y]]] for y in range(len(p))) for row in table)
        if best is None or conj < best:
            best = conj
    return best


def module_structures(Q: Quantale, L: SupLattice) -> list[Module]:
    """All left Q-module structures on ``L`` up to isomorphism, in canonical order."""
    maps = _sup_endomaps(L)
    n = L.size
    ident = tuple(range(n))
    irr = sorted(Q.lat.join_irr, key=lambda j: (bin(Q.lat.down[j]).count("1"), j))
    below = {a: [j for j in irr if Q.lat.leq(j, a)] for a in range(Q.size)}

    def pointwise_leq(f, g) -> bool:
        return all(L.leq(a, b) for a, b in zip(f, g))

    def ext(img: dict[int, tuple[int, ...]], a: int) -> tuple[int, ...]:
        out = [L.bot] * n
        for j in below[a]:
            out = [L.join2[u][v] for u, v in zip(out, img[j])]
        return tuple(out)

    seen: dict[tuple, Module] = {}
    autos = automorphisms(L)
    img: dict[int, tuple[int, ...]] = {}

    def rec(i: int) -> None:
        if i == len(irr):
            table = tuple(ext(img, a) for a in range(Q.size))
            if table[Q.unit] != ident:
                return
            try:
                validate_module(Q, L, table, "left")
            except ValidationError:
                return
            key = _canonical_action(table, autos)
            if key not in seen:
                seen[key] = Module(L, left=validate_module(Q, L, key, "left").left)
            return
        j = irr[i]
        for f in maps:
            if any(not pointwise_leq(img[j2], f) for j2 in below[j] if j2 != j):
                continue
            if Q.lat.leq(Q.unit, j) and not pointwise_leq(ident, f):
                continue
            img[j] = f
            rec(i + 1)
            del img[j]

    rec(0)
    return [seen[k] for k in sorted(seen)]


def enumerate_modules(Q: Quantale, max_size: int, min_size: int = 1) -> Iterator[Module]:
    """Left Q-modules with ``min_size <= |M| <= max_size`` up to isomorphism.

    Order: by size, then lattice canonical form, then canonical action table.
    """
    for n in range(min_size, max_size + 1):
        for L in lattices(n):
            yield from module_structures(Q, L)
