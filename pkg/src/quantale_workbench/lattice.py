"""Finite sup-lattices.

Elements are dense integer ids in declaration order.  Order relations are
stored as bit rows: ``up[x]`` has bit ``y`` set iff ``x <= y``, ``down[x]`` has
bit ``y`` set iff ``y <= x``.

Validation only checks binary joins and a bottom element.  In a finite poset
this is enough for completeness: the join of a finite set is obtained by
folding binary joins, and the empty join is the bottom.  Meets then exist as
joins of lower-bound sets.

A useful fact used throughout: if ``u`` is the join of ``a`` and ``b`` then
``up[u] == up[a] & up[b]``, so joins are a dictionary lookup on up-masks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import JoinTableMismatch, MissingJoin, NoBottom, NotAPartialOrder, ValidationError
from .limits import check_size


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_of(ids: Iterable[int]) -> int:
    mask = 0
    for i in ids:
        mask |= 1 << i
    return mask


@dataclass(frozen=True)
class SupLattice:
    names: tuple[str, ...]
    up: tuple[int, ...]
    down: tuple[int, ...]
    join2: tuple[tuple[int, ...], ...]
    bot: int
    top: int
    join_irr: tuple[int, ...]
    _by_up: dict = field(compare=False, hash=False, repr=False)
    _by_down: dict = field(compare=False, hash=False, repr=False)
    _by_name: dict = field(compare=False, hash=False, repr=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_up_masks(cls, names: Sequence[str], up: Sequence[int]) -> "SupLattice":
        """Build from a reflexive, transitive, antisymmetric relation.

        Raises MissingJoin / NoBottom when the poset is not a lattice.  No size
        cap is applied; callers decide which cap governs the structure.
        """
        n = len(names)
        if len(set(names)) != n:
            raise ValidationError("element names are not distinct")
        up = tuple(up)
        down = [0] * n
        for x in range(n):
            for y in iter_bits(up[x]):
                down[y] |= 1 << x
        down = tuple(down)
        full = (1 << n) - 1
        by_up = {m: i for i, m in enumerate(up)}
        by_down = {m: i for i, m in enumerate(down)}
        bot = by_up.get(full)
        if bot is None:
            raise NoBottom("no least element")
        join2 = []
        for a in range(n):
            row = []
            for b in range(n):
                u = by_up.get(up[a] & up[b])
                if u is None:
                    raise MissingJoin(f"{names[a]!r} and {names[b]!r} have no least upper bound", (a, b))
                row.append(u)
            join2.append(tuple(row))
        top = by_down[full]
        irr = []
        for x in range(n):
            if x == bot:
                continue
            strictly_below = down[x] & ~(1 << x)
            if by_up[_and_all(up, strictly_below, full)] != x:
                irr.append(x)
        return cls(
            names=tuple(names),
            up=up,
            down=down,
            join2=tuple(join2),
            bot=bot,
            top=top,
            join_irr=tuple(irr),
            _by_up=by_up,
            _by_down=by_down,
            _by_name={s: i for i, s in enumerate(names)},
        )

    # -- queries ------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown element {name!r}") from None

    def leq(self, a: int, b: int) -> bool:
        return bool(self.up[a] >> b & 1)

    def join(self, elems: Iterable[int]) -> int:
        mask = (1 << self.size) - 1
        for e in elems:
            mask &= self.up[e]
        return self._by_up[mask]

    def meet(self, elems: Iterable[int]) -> int:
        mask = (1 << self.size) - 1
        for e in elems:
            mask &= self.down[e]
        return self._by_down[mask]

    def join_mask(self, mask: int) -> int:
        """Join of the set of ids encoded by ``mask``."""
        return self.join(iter_bits(mask))

    def meet2(self, a: int, b: int) -> int:
        return self._by_down[self.down[a] & self.down[b]]

    def covers(self) -> list[tuple[int, int]]:
        """Hasse diagram edges ``(a, b)`` with ``b`` covering ``a``, in id order."""
        out = []
        for a in range(self.size):
            strict_up = self.up[a] & ~(1 << a)
            for b in iter_bits(strict_up):
                between = strict_up & self.down[b] & ~(1 << b)
                if not between:
                    out.append((a, b))
        return out


def _and_all(masks: Sequence[int], selector: int, full: int) -> int:
    m = full
    for i in iter_bits(selector):
        m &= masks[i]
    return m


# -- validation ---------------------------------------------------------------


def _closure_of_relation(n: int, rel: Iterable[tuple[int, int]]) -> list[int]:
    up = [1 << i for i in range(n)]
    for a, b in rel:
        up[a] |= 1 << b
    # Warshall on bit rows
    for k in range(n):
        bit = 1 << k
        uk = up[k]
        for i in range(n):
            if up[i] & bit:
                up[i] |= uk
    return up


def lattice_from_pairs(names: Sequence[str], pairs: Iterable[tuple[int, int]]) -> SupLattice:
    """Lattice from generating order pairs ``a <= b`` given as ids."""
    n = len(names)
    up = _closure_of_relation(n, pairs)
    for a in range(n):
        for b in iter_bits(up[a]):
            if a != b and up[b] >> a & 1:
                raise NotAPartialOrder(f"{names[a]!r} and {names[b]!r} lie on a cycle", (a, b))
    return SupLattice.from_up_masks(names, up)


def lattice_from_join_table(names: Sequence[str], table: Sequence[Sequence[int]]) -> SupLattice:
    """Lattice whose order is ``a <= b iff a v b == b``; the table must be that order's join."""
    n = len(names)
    for a in range(n):
        if table[a][a] != a:
            raise NotAPartialOrder(f"join table is not idempotent at {names[a]!r}", (a,))
    pairs = [(a, b) for a in range(n) for b in range(n) if table[a][b] == b]
    up = [0] * n
    for a, b in pairs:
        up[a] |= 1 << b
    for a in range(n):
        for b in iter_bits(up[a]):
            if a != b and up[b] >> a & 1:
                raise NotAPartialOrder(f"join table makes {names[a]!r} and {names[b]!r} equal", (a, b))
            for c in iter_bits(up[b]):
                if not up[a] >> c & 1:
                    raise NotAPartialOrder(
                        f"induced order is not transitive: {names[a]!r} <= {names[b]!r} <= {names[c]!r}", (a, b, c)
                    )
    lat = SupLattice.from_up_masks(names, up)
    for a in range(n):
        for b in range(n):
            if lat.join2[a][b] != table[a][b]:
                raise JoinTableMismatch(
                    f"table gives {names[a]!r} v {names[b]!r} = {names[table[a][b]]!r}, "
                    f"least upper bound is {names[lat.join2[a][b]]!r}",
                    (a, b),
                )
    return lat


def validate_suplattice(
    elements: Sequence[str],
    *,
    leq: Iterable[tuple[str, str]] | None = None,
    join: Iterable[tuple[str, str, str]] | None = None,
) -> SupLattice:
    """Validate a named lattice given either order pairs or a join table.

    ``leq`` pairs are closed reflexively and transitively, so a Hasse diagram
    suffices.  A ``join`` table must be total.
    """
    if (leq is None) == (join is None):
        raise ValidationError("exactly one of 'leq' and 'join' is required")
    names = list(elements)
    if len(set(names)) != len(names):
        raise ValidationError("element names are not distinct")
    check_size(len(names), "lattice")
    idx = {s: i for i, s in enumerate(names)}

    def lookup(s: str) -> int:
        try:
            return idx[s]
        except KeyError:
            raise ValidationError(f"unknown element {s!r}") from None

    if leq is not None:
        return lattice_from_pairs(names, [(lookup(a), lookup(b)) for a, b in leq])
    n = len(names)
    table = [[None] * n for _ in range(n)]
    for a, b, c in join:
        table[lookup(a)][lookup(b)] = lookup(c)
    for a in range(n):
        for b in range(n):
            if table[a][b] is None:
                raise ValidationError(f"join table misses {names[a]!r} v {names[b]!r}", (a, b))
    return lattice_from_join_table(names, table)


# -- derived operations ---------------------------------------------------------


def join(L: SupLattice, elems: Iterable[int]) -> int:
    return L.join(elems)


def meet(L: SupLattice, elems: Iterable[int]) -> int:
    return L.meet(elems)


def join_irreducibles(L: SupLattice) -> tuple[int, ...]:
    return L.join_irr


def chain(n: int, names: Sequence[str] | None = None) -> SupLattice:
    names = list(names) if names is not None else [str(i) for i in range(n)]
    return lattice_from_pairs(names, [(i, i + 1) for i in range(n - 1)])


@dataclass(frozen=True)
class LatCongruence:
    """Sup-lattice congruence stored as its class-maximum closure operator."""

    lat: SupLattice
    class_max: tuple[int, ...]

    def same(self, a: int, b: int) -> bool:
        return self.class_max[a] == self.class_max[b]

    def classes(self) -> list[tuple[int, ...]]:
        groups: dict[int, list[int]] = {}
        for x, m in enumerate(self.class_max):
            groups.setdefault(m, []).append(x)
        return [tuple(groups[m]) for m in sorted(groups)]


def congruence_closure(
    L: SupLattice,
    pairs: Iterable[tuple[int, int]],
    operations: Sequence[Sequence[int]] = (),
) -> LatCongruence:
    """Least congruence containing ``pairs``.

    Besides binary joins the relation is made compatible with every unary map
    in ``operations`` (for module congruences: one map per scalar).
    """
    n = L.size
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        parent[rb] = ra
        return True

    for a, b in pairs:
        union(a, b)
    J = L.join2
    changed = True
    while changed:
        changed = False
        for x in range(n):
            r = find(x)
            if r == x:
                continue
            jx, jr = J[x], J[r]
            for c in range(n):
                if union(jx[c], jr[c]):
                    changed = True
            for op in operations:
                if union(op[x], op[r]):
                    changed = True
    members: dict[int, list[int]] = {}
    for x in range(n):
        members.setdefault(find(x), []).append(x)
    class_max = [0] * n
    for group in members.values():
        m = L.join(group)
        for x in group:
            class_max[x] = m
    return LatCongruence(L, tuple(class_max))


def quotient(L: SupLattice, c: LatCongruence) -> tuple[SupLattice, tuple[int, ...]]:
    """Quotient lattice on the class maxima, plus the projection table."""
    maxima = sorted(set(c.class_max))
    pos = {m: i for i, m in enumerate(maxima)}
    up = []
    for m in maxima:
        mask = 0
        for j, m2 in enumerate(maxima):
            if L.leq(m, m2):
                mask |= 1 << j
        up.append(mask)
    Q = SupLattice.from_up_masks([L.names[m] for m in maxima], up)
    proj = tuple(pos[c.class_max[x]] for x in range(L.size))
    assert proj[L.bot] == Q.bot
    for a in range(L.size):
        for b in range(L.size):
            assert proj[L.join2[a][b]] == Q.join2[proj[a]][proj[b]], "projection does not preserve joins"
    return Q, proj
