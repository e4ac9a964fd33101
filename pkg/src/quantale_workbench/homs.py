"""Hom-sets, endomorphism quantales and dual modules.

Composition orientation in End(M)
---------------------------------
For a left module the endomorphisms are written on the right of their
argument, ``x h = h(x)``, so the product is ``h . g = g o h`` and ``M`` becomes
a ``Q``-``End(M)`` bimodule.  For a right module they are written on the left
and the product is ordinary composition ``h . g = h o g``.  Plain sup-lattices
and bimodules follow the left-module rule.  See :data:`END_ORIENTATION`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .errors import NotFree, ValidationError
from .lattice import SupLattice
from .limits import check_size
from .qmodule import Action, Hom, Module, regular, submodule_generated, validate_bimodule
from .quantale import Quantale, validate_quantale

END_ORIENTATION = {
    "left": "h.g = g o h",
    "lattice": "h.g = g o h",
    "bimodule": "h.g = g o h",
    "right": "h.g = h o g",
}


def _require_same_actions(M: Module, N: Module) -> None:
    for side, act in M.actions():
        other = getattr(N, side)
        if other is None or other.ring != act.ring:
            raise ValidationError(f"target has no {side} action over the source's ring")


def _candidate_tables(M: Module, N: Module):
    """Yield extension tables seeded by images of M's join-irreducibles.

    Images are assigned in order of height; a partial assignment is pruned as
    soon as it breaks monotonicity between irreducibles or an action law whose
    both sides are already determined.
    """
    L, T = M.lat, N.lat
    irr = sorted(L.join_irr, key=lambda j: (bin(L.down[j]).count("1"), j))
    below = {x: [j for j in irr if L.down[x] >> j & 1] for x in range(M.size)}
    checks: dict[int, list] = {j: [] for j in irr}
    order = {j: i for i, j in enumerate(irr)}
    for side, act in M.actions():
        other = getattr(N, side).table
        for a, row in enumerate(act.table):
            for j in irr:
                x = row[j]
                needed = [j] + below[x]
                last = max(needed, key=order.__getitem__)
                checks[last].append((j, x, other[a]))
    img: dict[int, int] = {}

    def ext(x: int) -> int:
        return T.join(img[j] for j in below[x])

    def rec(i: int):
        if i == len(irr):
            yield tuple(ext(x) for x in range(M.size))
            return
        j = irr[i]
        for y in range(N.size):
            if any(not T.leq(img[j2], y) for j2 in below[j] if j2 != j):
                continue
            img[j] = y
            if all(ext(x) == orow[img[jj]] for jj, x, orow in checks[j]):
                yield from rec(i + 1)
            del img[j]

    yield from rec(0)


@dataclass(frozen=True)
class HomLattice:
    src: Module
    dst: Module
    homs: tuple[Hom, ...]
    lat: SupLattice

    @cached_property
    def _index(self) -> dict:
        return {h.table: i for i, h in enumerate(self.homs)}

    def index(self, h: Hom | Sequence[int]) -> int:
        table = h.table if isinstance(h, Hom) else tuple(h)
        return self._index[table]

    def __len__(self) -> int:
        return len(self.homs)

    def __iter__(self):
        return iter(self.homs)

    def __getitem__(self, i: int) -> Hom:
        return self.homs[i]


def pointwise_lattice(homs: Sequence[Hom], N: Module, prefix: str = "f") -> SupLattice:
    k = len(homs)
    up = []
    for h in homs:
        mask = 0
        for j, g in enumerate(homs):
            if all(N.lat.leq(a, b) for a, b in zip(h.table, g.table)):
                mask |= 1 << j
        up.append(mask)
    lat = SupLattice.from_up_masks([f"{prefix}{i}" for i in range(k)], up)
    index = {h.table: i for i, h in enumerate(homs)}
    J = N.lat.join2
    for i, h in enumerate(homs):
        for j in range(i + 1, k):
            pw = tuple(J[a][b] for a, b in zip(h.table, homs[j].table))
            assert index.get(pw) == lat.join2[i][j], "pointwise join of homs must be a hom"
    return lat


def enumerate_homs(M: Module, N: Module, prefix: str = "f") -> HomLattice:
    """All homomorphisms ``M -> N`` preserving every action ``M`` carries.

    Homs are listed in lexicographic order of their tables.
    """
    check_size(M.size, "hom source", derived=True)
    check_size(N.size, "hom target", derived=True)
    _require_same_actions(M, N)
    found = []
    for table in _candidate_tables(M, N):
        h = Hom(M, N, table)
        if h.failure() is None:
            found.append(h)
    found.sort(key=lambda h: h.table)
    check_size(len(found), "hom lattice", derived=True)
    return HomLattice(M, N, tuple(found), pointwise_lattice(found, N, prefix))


# -- hom-sets as modules -----------------------------------------------------------


def hom_module(M: Module, N: Module, over: str | None, prefix: str = "f") -> tuple[Module, HomLattice]:
    """Hom-set preserving the ``over`` actions, with the structure induced by the rest.

    With ``over='left'`` (``M`` an S-Q, ``N`` an S-R bimodule) the result is a
    Q-R bimodule: ``(q f)(m) = f(m q)`` and ``(f r)(m) = f(m) r``.
    With ``over='right'`` (``M`` a Q-R, ``N`` an S-R bimodule) it is an S-Q
    bimodule: ``(s g)(n) = s g(n)`` and ``(g q)(n) = g(q n)``.
    ``over=None`` takes sup-lattice homs and induces whatever is unambiguous.
    """
    src, dst = M.restrict(over), N.restrict(over)
    H = enumerate_homs(src, dst, prefix)
    J = H.lat
    induced: dict[str, Action] = {}

    def add(side: str, ring: Quantale, make) -> None:
        if side in induced:
            raise ValidationError(f"two actions would be induced on the {side} of the hom-set")
        rows = []
        for a in range(ring.size):
            rows.append(tuple(H.index(make(a, h)) for h in H.homs))
        induced[side] = Action(ring, tuple(rows))

    src_extra = [s for s, _ in M.actions() if s != over]
    dst_extra = [s for s, _ in N.actions() if s != over]
    for s in src_extra:
        act = getattr(M, s)
        # precomposition with a source action lands on the opposite side
        target_side = "left" if s == "right" else "right"
        add(target_side, act.ring, lambda a, h, t=act.table: tuple(h.table[t[a][x]] for x in range(M.size)))
    for s in dst_extra:
        act = getattr(N, s)
        add(s, act.ring, lambda a, h, t=act.table: tuple(t[a][y] for y in h.table))
    out = Module(J, left=induced.get("left"), right=induced.get("right"))
    return out, H


# -- endomorphism quantale -------------------------------------------------------


@dataclass(frozen=True)
class EndQuantale:
    module: Module
    homs: HomLattice
    quantale: Quantale
    orientation: str

    def index(self, h: Hom | Sequence[int]) -> int:
        return self.homs.index(h)

    def hom(self, i: int) -> Hom:
        return self.homs.homs[i]

    @cached_property
    def identity(self) -> int:
        return self.quantale.unit

    @cached_property
    def bimodule(self) -> Module:
        """``M`` with ``End(M)`` acting on the side opposite to ``Q``."""
        M = self.module
        table = tuple(h.table for h in self.homs.homs)
        E = Action(self.quantale, table)
        if M.side == "right":
            return Module(M.lat, left=E, right=M.right)
        return Module(M.lat, left=M.left, right=E)


def end_quantale(M: Module) -> EndQuantale:
    H = enumerate_homs(M, M, prefix="h")
    homs = H.homs
    idx = {h.table: i for i, h in enumerate(homs)}
    if M.side == "right":
        mul = [[idx[tuple(h.table[y] for y in g.table)] for g in homs] for h in homs]
    else:
        mul = [[idx[tuple(g.table[y] for y in h.table)] for g in homs] for h in homs]
    unit = idx[tuple(range(M.size))]
    Q = validate_quantale(H.lat, mul, unit)
    return EndQuantale(M, H, Q, END_ORIENTATION[M.side])


# -- dual module ---------------------------------------------------------------------


@dataclass(frozen=True)
class DualModule:
    """``M* = Hom(M, Q)`` as an End(M)-Q bimodule.

    ``(h f) = f o h`` and ``(f q)(x) = f(x) q``.
    """

    source: Module
    end: EndQuantale
    homs: HomLattice
    module: Module

    def index(self, h: Hom | Sequence[int]) -> int:
        return self.homs.index(h)

    def hom(self, i: int) -> Hom:
        return self.homs.homs[i]

    def fm(self, f: int, m: int) -> int:
        """Endomorphism ``x -> f(x).m`` as an element of End(M)."""
        M = self.source
        ft = self.homs.homs[f].table
        return self.end.index(tuple(M.lact(ft[x], m) for x in range(M.size)))

    def mf(self, m: int, f: int) -> int:
        return self.homs.homs[f].table[m]


def dual_module(M: Module) -> DualModule:
    if M.left is None:
        raise ValidationError("dual_module expects a left module")
    M = M.restrict("left")
    Q = M.left.ring
    E = end_quantale(M)
    H = enumerate_homs(M, regular(Q, "left"), prefix="f")
    homs = H.homs
    lact = [[H.index(tuple(f.table[x] for x in h.table)) for f in homs] for h in E.homs.homs]
    ract = [[H.index(tuple(Q.mul[y][q] for y in f.table)) for f in homs] for q in range(Q.size)]
    N = validate_bimodule(E.quantale, Q, H.lat, lact, ract)
    D = DualModule(M, E, H, N)
    _check_dual_laws(D)
    return D


def _check_dual_laws(D: DualModule) -> None:
    """Exhaustive MNQ, MEN, MNM and NMN associativity checks."""
    M, N, E = D.source, D.module, D.end
    Q = M.left.ring
    fs = range(len(D.homs))
    for f in fs:
        ft = D.homs.homs[f].table
        for m in range(M.size):
            for q in range(Q.size):
                assert D.mf(m, N.ract(f, q)) == Q.mul[ft[m]][q], "MNQ associativity"
            for h in range(len(E.homs)):
                mh = E.homs.homs[h].table[m]
                assert D.mf(m, N.lact(h, f)) == ft[mh], "MEN associativity"
    for f in fs:
        for m in range(M.size):
            fm = D.fm(f, m)  # raises KeyError unless fm is an endomorphism
            fmt = E.homs.homs[fm].table
            for m2 in range(M.size):
                assert fmt[m2] == M.lact(D.mf(m2, f), m), "MNM associativity"
            for f2 in fs:
                assert N.lact(fm, f2) == N.ract(f, D.mf(m, f2)), "NMN associativity"


def dual_basis(M: Module) -> list[Hom]:
    """Coordinate functionals ``e_i*`` of a free module.

    ``e_i*`` is located in ``Hom(M, Q)`` as the hom sending ``e_j`` to the unit
    when ``i == j`` and to bottom otherwise.  The set is checked to generate
    ``M*`` as a right Q-module and to be minimal with that property.
    """
    if M.basis is None or M.left is None:
        raise NotFree("module was not built as a free module")
    D = dual_module(M)
    Q = M.left.ring
    gens = M.basis
    out = []
    for i in range(len(gens)):
        want = [Q.unit if i == j else Q.lat.bot for j in range(len(gens))]
        hits = [h for h in D.homs.homs if [h.table[g] for g in gens] == want]
        assert len(hits) == 1, "free module hom is not determined by its generators"
        out.append(hits[0])
    ids = [D.index(h) for h in out]
    N_right = D.module.restrict("right")
    assert len(submodule_generated(N_right, ids).carrier) == N_right.size, "dual basis does not generate"
    for k in range(len(ids)):
        rest = ids[:k] + ids[k + 1 :]
        assert len(submodule_generated(N_right, rest).carrier) < N_right.size, "dual basis is not minimal"
    return out
