"""Quantale modules and bimodules.

A :class:`Module` is a sup-lattice with an optional left action and an optional
right action.  One-sided modules set exactly one of them, bimodules set both,
and a plain sup-lattice (a module over nothing) sets neither.  Action tables
are always indexed scalar first: ``left.table[a][u] = a.u`` and
``right.table[a][u] = u.a``.

Finite products and coproducts of modules coincide: the coproduct injections
of the product ``M1 x ... x Mk`` are ``u -> (bot, ..., u, ..., bot)`` and every
tuple is the join of its injected coordinates.  Only products are built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

from .errors import (
    NotAHom,
    NotAssociativeAction,
    NotCompatible,
    NotJoinDistributiveAction,
    NotUnitalAction,
    ValidationError,
)
from .lattice import SupLattice, congruence_closure, quotient
from .limits import check_size
from .quantale import Quantale, opposite_quantale


@dataclass(frozen=True)
class Action:
    ring: Quantale
    table: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Module:
    lat: SupLattice
    left: Action | None = None
    right: Action | None = None
    # generator ids when the module was built by free_module()
    basis: tuple[int, ...] | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return self.lat.size

    def __len__(self) -> int:
        return self.lat.size

    @property
    def names(self) -> tuple[str, ...]:
        return self.lat.names

    @property
    def side(self) -> str:
        if self.left and self.right:
            return "bimodule"
        if self.left:
            return "left"
        if self.right:
            return "right"
        return "lattice"

    @property
    def ring(self) -> Quantale:
        """Ring of a one-sided module."""
        if self.side == "left":
            return self.left.ring
        if self.side == "right":
            return self.right.ring
        raise ValueError(f"a {self.side} has no single ring")

    def lact(self, a: int, u: int) -> int:
        return self.left.table[a][u]

    def ract(self, u: int, a: int) -> int:
        return self.right.table[a][u]

    def actions(self) -> list[tuple[str, Action]]:
        out = []
        if self.left:
            out.append(("left", self.left))
        if self.right:
            out.append(("right", self.right))
        return out

    def restrict(self, side: str | None) -> "Module":
        """Forget one (or both, with ``side=None``) of the actions."""
        if side == "left":
            return Module(self.lat, left=self.left, basis=self.basis)
        if side == "right":
            return Module(self.lat, right=self.right)
        if side is None:
            return Module(self.lat)
        raise ValueError(side)

    def opposite(self) -> "Module":
        """A right Q-module read as a left module over the opposite quantale, and back.

        Over a commutative quantale the ring is unchanged.
        """
        if self.side not in ("left", "right"):
            raise ValidationError("only one-sided modules can switch sides")
        act = self.left or self.right
        flipped = Action(opposite_quantale(act.ring), act.table)
        if self.left:
            return Module(self.lat, right=flipped)
        return Module(self.lat, left=flipped)

    def as_bimodule(self) -> "Module":
        """One-sided module over a commutative quantale, acting on both sides."""
        if self.side not in ("left", "right") or not self.ring.is_commutative():
            raise ValidationError("only one-sided modules over commutative quantales become bimodules")
        act = self.left or self.right
        return Module(self.lat, left=act, right=act, basis=self.basis)


# -- validation ---------------------------------------------------------------


def _check_action(lat: SupLattice, ring: Quantale, table, side: str) -> tuple[tuple[int, ...], ...]:
    nq, n = ring.size, lat.size
    if len(table) != nq or any(len(row) != n for row in table):
        raise ValidationError(f"{side} action table is not total")
    table = tuple(tuple(row) for row in table)
    for row in table:
        for v in row:
            if not 0 <= v < n:
                raise ValidationError(f"{side} action entry {v} is out of range")
    qn, mn = ring.names, lat.names
    for u in range(n):
        if table[ring.unit][u] != u:
            raise NotUnitalAction(f"unit does not act trivially on {mn[u]!r}", (ring.unit, u))
    J, JQ, bot = lat.join2, ring.lat.join2, lat.bot
    for a in range(nq):
        if table[a][bot] != bot:
            raise NotJoinDistributiveAction(f"{qn[a]!r} does not fix bottom", (a, bot))
    for u in range(n):
        if table[ring.lat.bot][u] != bot:
            raise NotJoinDistributiveAction(f"bottom scalar does not kill {mn[u]!r}", (ring.lat.bot, u))
    for a in range(nq):
        row = table[a]
        for u in range(n):
            for v in range(u + 1, n):
                if row[J[u][v]] != J[row[u]][row[v]]:
                    raise NotJoinDistributiveAction(
                        f"{qn[a]!r} does not distribute over {mn[u]!r} v {mn[v]!r}", (a, u, v)
                    )
    for a in range(nq):
        for b in range(a + 1, nq):
            ra, rb, rab = table[a], table[b], table[JQ[a][b]]
            for u in range(n):
                if rab[u] != J[ra[u]][rb[u]]:
                    raise NotJoinDistributiveAction(
                        f"({qn[a]!r} v {qn[b]!r}) does not distribute at {mn[u]!r}", (a, b, u)
                    )
    mul = ring.mul
    for a in range(nq):
        for b in range(nq):
            rab = table[mul[a][b]]
            if side == "left":
                outer, inner = table[a], table[b]
            else:
                outer, inner = table[b], table[a]
            for u in range(n):
                if rab[u] != outer[inner[u]]:
                    raise NotAssociativeAction(
                        f"acting by {qn[a]!r}*{qn[b]!r} on {mn[u]!r} differs from acting in turn", (a, b, u)
                    )
    return table


def validate_module(ring: Quantale, lat: SupLattice, act, side: str = "left") -> Module:
    if side not in ("left", "right"):
        raise ValidationError(f"side must be 'left' or 'right', not {side!r}")
    table = _check_action(lat, ring, act, side)
    if side == "left":
        return Module(lat, left=Action(ring, table))
    return Module(lat, right=Action(ring, table))


def validate_bimodule(left_ring: Quantale, right_ring: Quantale, lat: SupLattice, lact, ract) -> Module:
    lt = _check_action(lat, left_ring, lact, "left")
    rt = _check_action(lat, right_ring, ract, "right")
    for a in range(left_ring.size):
        for b in range(right_ring.size):
            for u in range(lat.size):
                if rt[b][lt[a][u]] != lt[a][rt[b][u]]:
                    raise NotCompatible(
                        f"({left_ring.names[a]!r}.{lat.names[u]!r}).{right_ring.names[b]!r} "
                        f"!= {left_ring.names[a]!r}.({lat.names[u]!r}.{right_ring.names[b]!r})",
                        (a, u, b),
                    )
    return Module(lat, left=Action(left_ring, lt), right=Action(right_ring, rt))


def revalidate(M: Module) -> Module:
    """Run the validators on an already-built module and return it."""
    if M.left and M.right:
        validate_bimodule(M.left.ring, M.right.ring, M.lat, M.left.table, M.right.table)
    elif M.left:
        _check_action(M.lat, M.left.ring, M.left.table, "left")
    elif M.right:
        _check_action(M.lat, M.right.ring, M.right.table, "right")
    return M


# -- standard modules -----------------------------------------------------------


def regular(Q: Quantale, side: str = "left") -> Module:
    """``Q`` acting on itself by multiplication (``side='both'`` for the bimodule)."""
    n = Q.size
    lt = Action(Q, tuple(tuple(Q.mul[a][u] for u in range(n)) for a in range(n)))
    rt = Action(Q, tuple(tuple(Q.mul[u][a] for u in range(n)) for a in range(n)))
    if side == "left":
        return Module(Q.lat, left=lt, basis=(Q.unit,))
    if side == "right":
        return Module(Q.lat, right=rt)
    if side == "both":
        return Module(Q.lat, left=lt, right=rt)
    raise ValueError(side)


def point_module(Q: Quantale | None = None, side: str = "left") -> Module:
    lat = SupLattice.from_up_masks(["0"], [1])
    if Q is None:
        return Module(lat)
    act = Action(Q, tuple((0,) for _ in range(Q.size)))
    if side == "left":
        return Module(lat, left=act, basis=())
    if side == "right":
        return Module(lat, right=act)
    return Module(lat, left=act, right=act)


# -- homomorphisms ----------------------------------------------------------------


@dataclass(frozen=True)
class Hom:
    """Join- and action-preserving map, stored as a full element table.

    Equality and hashing look at the table only.
    """

    src: Module = field(compare=False, repr=False)
    dst: Module = field(compare=False, repr=False)
    table: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.table[x]

    def then(self, g: "Hom") -> "Hom":
        """``g o self``."""
        return Hom(self.src, g.dst, tuple(g.table[y] for y in self.table))

    def failure(self) -> str | None:
        """First hom law this table breaks, or None.  Checks every action of ``src``."""
        S, T, f = self.src, self.dst, self.table
        if len(f) != S.size or any(not 0 <= y < T.size for y in f):
            return "table does not map the source into the target"
        if f[S.lat.bot] != T.lat.bot:
            return "bottom is not preserved"
        JS, JT = S.lat.join2, T.lat.join2
        for x in range(S.size):
            for y in range(x + 1, S.size):
                if f[JS[x][y]] != JT[f[x]][f[y]]:
                    return f"join of {S.names[x]} and {S.names[y]} is not preserved"
        for side, act in S.actions():
            other = getattr(T, side)
            if other is None or other.ring != act.ring:
                return f"target lacks the source's {side} action"
            for a, row in enumerate(act.table):
                orow = other.table[a]
                for x in range(S.size):
                    if f[row[x]] != orow[f[x]]:
                        return f"{side} action of {act.ring.names[a]} on {S.names[x]} is not preserved"
        return None

    def is_hom(self) -> bool:
        return self.failure() is None

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.dst.size

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()


def compose(g: Hom, f: Hom) -> Hom:
    """``g o f``."""
    return f.then(g)


def identity(M: Module) -> Hom:
    return Hom(M, M, tuple(range(M.size)))


def zero_hom(M: Module, N: Module) -> Hom:
    return Hom(M, N, (N.lat.bot,) * M.size)


def checked_hom(src: Module, dst: Module, table: Sequence[int]) -> Hom:
    h = Hom(src, dst, tuple(table))
    why = h.failure()
    if why:
        raise NotAHom(why)
    return h


# -- residuals --------------------------------------------------------------------


def vector_residual(M: Module, a: int, u: int) -> int:
    """Largest vector ``v`` with ``a.v <= u`` (left) or ``v.a <= u`` (right)."""
    act = M.left if M.side in ("left", "bimodule") else M.right
    row = act.table[a]
    return M.lat.join(v for v in range(M.size) if M.lat.leq(row[v], u))


def scalar_residual(M: Module, u: int, v: int) -> int:
    """Largest scalar ``a`` with ``a.v <= u`` (left) or ``v.a <= u`` (right)."""
    act = M.left if M.side in ("left", "bimodule") else M.right
    Q = act.ring
    return Q.lat.join(a for a in range(Q.size) if M.lat.leq(act.table[a][v], u))


# -- submodules -------------------------------------------------------------------


@dataclass(frozen=True)
class Submodule:
    parent: Module
    carrier: tuple[int, ...]

    def __contains__(self, x: int) -> bool:
        return x in self._set

    @cached_property
    def _set(self) -> frozenset:
        return frozenset(self.carrier)

    def is_closed(self) -> bool:
        M, s = self.parent, self._set
        if M.lat.bot not in s:
            return False
        J = M.lat.join2
        for x in self.carrier:
            for y in self.carrier:
                if J[x][y] not in s:
                    return False
        for _, act in M.actions():
            for row in act.table:
                for x in self.carrier:
                    if row[x] not in s:
                        return False
        return True

    @cached_property
    def module(self) -> Module:
        M = self.parent
        pos = {x: i for i, x in enumerate(self.carrier)}
        up = [sum(1 << pos[y] for y in self.carrier if M.lat.leq(x, y)) for x in self.carrier]
        lat = SupLattice.from_up_masks([M.names[x] for x in self.carrier], up)

        def restrict(act: Action | None) -> Action | None:
            if act is None:
                return None
            return Action(act.ring, tuple(tuple(pos[row[x]] for x in self.carrier) for row in act.table))

        return Module(lat, left=restrict(M.left), right=restrict(M.right))

    @cached_property
    def inclusion(self) -> Hom:
        return Hom(self.module, self.parent, self.carrier)


def submodule_generated(M: Module, S: Iterable[int]) -> Submodule:
    """Least subset containing ``S`` and bottom, closed under joins and the actions."""
    members = {M.lat.bot} | set(S)
    J = M.lat.join2
    rows = [row for _, act in M.actions() for row in act.table]
    frontier = list(members)
    while frontier:
        new = []
        for x in frontier:
            cand = [J[x][y] for y in members] + [row[x] for row in rows]
            for z in cand:
                if z not in members:
                    members.add(z)
                    new.append(z)
        frontier = new
    return Submodule(M, tuple(sorted(members)))


def equalizer(f: Hom, g: Hom) -> Submodule:
    """Submodule of the common domain on which ``f`` and ``g`` agree."""
    sub = Submodule(f.src, tuple(x for x in range(f.src.size) if f.table[x] == g.table[x]))
    assert sub.is_closed(), "agreement set of two homs must be a submodule"
    return sub


def module_congruence(N: Module, pairs: Iterable[tuple[int, int]]):
    ops = [row for _, act in N.actions() for row in act.table]
    return congruence_closure(N.lat, pairs, ops)


def quotient_module(N: Module, cong) -> tuple[Module, Hom]:
    lat, proj = quotient(N.lat, cong)
    maxima = sorted(set(cong.class_max))

    def act_on(act: Action | None) -> Action | None:
        if act is None:
            return None
        return Action(act.ring, tuple(tuple(proj[row[m]] for m in maxima) for row in act.table))

    Q = Module(lat, left=act_on(N.left), right=act_on(N.right))
    return Q, Hom(N, Q, proj)


def coequalizer(f: Hom, g: Hom) -> tuple[Module, Hom]:
    """Quotient of the common codomain by the congruence generated by ``(f(x), g(x))``."""
    N = f.dst
    cong = module_congruence(N, ((f.table[x], g.table[x]) for x in range(f.src.size)))
    C, proj = quotient_module(N, cong)
    assert proj.is_hom() and proj.is_surjective()
    return C, proj


# -- products ---------------------------------------------------------------------


@dataclass(frozen=True)
class Product:
    module: Module
    factors: tuple[Module, ...]
    projections: tuple[Hom, ...]
    injections: tuple[Hom, ...]
    coords: tuple[tuple[int, ...], ...]

    def element(self, coords: Sequence[int]) -> int:
        return self._pos[tuple(coords)]

    @cached_property
    def _pos(self) -> dict:
        return {c: i for i, c in enumerate(self.coords)}


def product_module(
    modules: Sequence[Module],
    *,
    left: Quantale | None = None,
    right: Quantale | None = None,
) -> Product:
    """Componentwise product.  ``left``/``right`` give the rings of an empty product."""
    modules = list(modules)
    if modules:
        first = modules[0]
        for M in modules[1:]:
            if (M.left and M.left.ring) != (first.left and first.left.ring) or (M.right and M.right.ring) != (
                first.right and first.right.ring
            ):
                raise ValidationError("product factors must be modules over the same rings on the same sides")
        left = first.left.ring if first.left else None
        right = first.right.ring if first.right else None
    size = 1
    for M in modules:
        size *= M.size
    check_size(size, "product module")
    coords = list(product(*(range(M.size) for M in modules)))
    names = ["(" + ",".join(M.names[c] for M, c in zip(modules, t)) + ")" for t in coords]
    pos = {t: i for i, t in enumerate(coords)}
    up = []
    for t in coords:
        mask = 0
        for j, s in enumerate(coords):
            if all(M.lat.leq(a, b) for M, a, b in zip(modules, t, s)):
                mask |= 1 << j
        up.append(mask)
    lat = SupLattice.from_up_masks(names, up)

    def act(side: str, ring: Quantale | None) -> Action | None:
        if ring is None:
            return None
        rows = []
        for a in range(ring.size):
            rows.append(
                tuple(pos[tuple(getattr(M, side).table[a][c] for M, c in zip(modules, t))] for t in coords)
            )
        return Action(ring, tuple(rows))

    P = Module(lat, left=act("left", left), right=act("right", right))
    projections = tuple(Hom(P, M, tuple(t[i] for t in coords)) for i, M in enumerate(modules))
    injections = []
    for i, M in enumerate(modules):
        table = []
        for x in range(M.size):
            t = [N.lat.bot for N in modules]
            t[i] = x
            table.append(pos[tuple(t)])
        injections.append(Hom(M, P, tuple(table)))
    return Product(P, tuple(modules), projections, tuple(injections), tuple(coords))


def free_module(Q: Quantale, n: int) -> tuple[Module, tuple[int, ...]]:
    """``Q^n`` as a left module, with its standard generators ``e_1..e_n``."""
    if n < 0:
        raise ValueError("rank must be non-negative")
    check_size(Q.size**n, "free module")
    P = product_module([regular(Q, "left")] * n, left=Q)
    gens = []
    for i in range(n):
        t = [Q.lat.bot] * n
        t[i] = Q.unit
        gens.append(P.element(t))
    M = Module(P.module.lat, left=P.module.left, basis=tuple(gens))
    return M, tuple(gens)
