"""Unital quantales on finite sup-lattices."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Sequence

from .errors import MonoidInvalid, NotAssociative, NotJoinDistributive, NotUnital, ValidationError
from .lattice import SupLattice, bits_of, iter_bits
from .limits import check_size


@dataclass(frozen=True)
class Quantale:
    lat: SupLattice
    mul: tuple[tuple[int, ...], ...]
    unit: int

    @property
    def size(self) -> int:
        return self.lat.size

    def __len__(self) -> int:
        return self.lat.size

    @property
    def names(self) -> tuple[str, ...]:
        return self.lat.names

    # Residual tables are built on first use only.
    @cached_property
    def _left_res(self) -> tuple[tuple[int, ...], ...]:
        L, n = self.lat, self.size
        return tuple(
            tuple(L.join(c for c in range(n) if L.leq(self.mul[b][c], a)) for a in range(n)) for b in range(n)
        )

    @cached_property
    def _right_res(self) -> tuple[tuple[int, ...], ...]:
        L, n = self.lat, self.size
        return tuple(
            tuple(L.join(c for c in range(n) if L.leq(self.mul[c][b], a)) for b in range(n)) for a in range(n)
        )

    def left_residual(self, b: int, a: int) -> int:
        """``b\\a``: the largest ``c`` with ``b*c <= a``."""
        return self._left_res[b][a]

    def right_residual(self, a: int, b: int) -> int:
        """``a/b``: the largest ``c`` with ``c*b <= a``."""
        return self._right_res[a][b]

    def is_commutative(self) -> bool:
        n = self.size
        return all(self.mul[a][b] == self.mul[b][a] for a in range(n) for b in range(a + 1, n))

    def is_integral(self) -> bool:
        return self.unit == self.lat.top

    def idempotents(self) -> tuple[int, ...]:
        return tuple(a for a in range(self.size) if self.mul[a][a] == a)


def left_residual(Q: Quantale, b: int, a: int) -> int:
    return Q.left_residual(b, a)


def right_residual(Q: Quantale, a: int, b: int) -> int:
    return Q.right_residual(a, b)


def is_commutative(Q: Quantale) -> bool:
    return Q.is_commutative()


def is_integral(Q: Quantale) -> bool:
    return Q.is_integral()


def opposite_quantale(Q: Quantale) -> Quantale:
    """Same lattice with ``a *op b = b * a``; ``Q`` itself when commutative."""
    if Q.is_commutative():
        return Q
    n = Q.size
    return Quantale(Q.lat, tuple(tuple(Q.mul[b][a] for b in range(n)) for a in range(n)), Q.unit)


def validate_quantale(lat: SupLattice, mul: Sequence[Sequence[int]], unit: int) -> Quantale:
    n = lat.size
    if len(mul) != n or any(len(row) != n for row in mul):
        raise ValidationError("multiplication table is not total")
    if not 0 <= unit < n:
        raise ValidationError("unit is not an element")
    mul = tuple(tuple(row) for row in mul)
    names = lat.names
    for row in mul:
        for v in row:
            if not 0 <= v < n:
                raise ValidationError(f"multiplication table entry {v} is out of range")
    for a in range(n):
        if mul[unit][a] != a or mul[a][unit] != a:
            raise NotUnital(f"{names[unit]!r} is not a two-sided unit at {names[a]!r}", (unit, a))
    J, bot = lat.join2, lat.bot
    for a in range(n):
        if mul[a][bot] != bot or mul[bot][a] != bot:
            raise NotJoinDistributive(f"multiplying {names[a]!r} by bottom is not bottom", (a, bot))
    for a, b, c in product(range(n), repeat=3):
        if mul[a][J[b][c]] != J[mul[a][b]][mul[a][c]]:
            raise NotJoinDistributive(
                f"{names[a]!r}*({names[b]!r} v {names[c]!r}) differs from the join of products", (a, b, c)
            )
        if mul[J[b][c]][a] != J[mul[b][a]][mul[c][a]]:
            raise NotJoinDistributive(
                f"({names[b]!r} v {names[c]!r})*{names[a]!r} differs from the join of products", (b, c, a)
            )
    for a, b, c in product(range(n), repeat=3):
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            raise NotAssociative(f"({names[a]!r}*{names[b]!r})*{names[c]!r} != {names[a]!r}*({names[b]!r}*{names[c]!r})", (a, b, c))
    return Quantale(lat, mul, unit)


def powerset_quantale(elements: Sequence[str], mul: Sequence[Sequence[int]], unit: int) -> Quantale:
    """Quantale of all subsets of a finite monoid under the pointwise product.

    Subsets are listed in binary-counting order of their membership masks, so
    the empty set is element 0 and the full set is last.  Element names are
    ``{a,b}`` with members in monoid declaration order.
    """
    k = len(elements)
    for a, b, c in product(range(k), repeat=3):
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            raise MonoidInvalid("monoid multiplication is not associative", (a, b, c))
    for a in range(k):
        if mul[unit][a] != a or mul[a][unit] != a:
            raise MonoidInvalid("monoid unit is not a unit", (unit, a))
    size = 1 << k
    check_size(size, "powerset quantale")
    names = ["{" + ",".join(elements[i] for i in iter_bits(m)) + "}" for m in range(size)]
    up = [sum(1 << m2 for m2 in range(size) if m & ~m2 == 0) for m in range(size)]
    lat = SupLattice.from_up_masks(names, up)
    table = []
    for A in range(size):
        row = []
        for B in range(size):
            row.append(bits_of(mul[a][b] for a in iter_bits(A) for b in iter_bits(B)))
        table.append(row)
    return validate_quantale(lat, table, 1 << unit)


# -- isomorphism ----------------------------------------------------------------


@dataclass(frozen=True)
class QuantaleIso:
    fwd: tuple[int, ...]
    bwd: tuple[int, ...]


def iso_failure(Q: Quantale, R: Quantale, fwd: Sequence[int]) -> str | None:
    """Describe the first quantale-isomorphism law ``fwd: Q -> R`` breaks, or None.

    Checks run in the order bijectivity, multiplication, unit, joins.
    """
    n = Q.size
    if R.size != n or len(fwd) != n or sorted(fwd) != list(range(n)):
        return "not a bijection"
    qn = Q.names
    for a in range(n):
        for b in range(n):
            if fwd[Q.mul[a][b]] != R.mul[fwd[a]][fwd[b]]:
                return f"multiplication law fails at ({qn[a]}, {qn[b]})"
    if fwd[Q.unit] != R.unit:
        return "unit is not preserved"
    if fwd[Q.lat.bot] != R.lat.bot:
        return "bottom is not preserved"
    for a in range(n):
        for b in range(n):
            if fwd[Q.lat.join2[a][b]] != R.lat.join2[fwd[a]][fwd[b]]:
                return f"join law fails at ({qn[a]}, {qn[b]})"
    return None


def _element_profile(Q: Quantale, x: int) -> tuple:
    L = Q.lat
    m = Q.mul
    return (
        bin(L.down[x]).count("1"),
        bin(L.up[x]).count("1"),
        m[x][x] == x,
        L.leq(x, Q.unit),
        L.leq(Q.unit, x),
        sum(1 for y in range(Q.size) if m[x][y] == y),
        sum(1 for y in range(Q.size) if m[y][x] == y),
        sum(1 for y in range(Q.size) if m[x][y] == m[y][x]),
    )


def _fingerprint(Q: Quantale) -> tuple:
    return (
        Q.size,
        len(Q.lat.join_irr),
        Q.is_commutative(),
        Q.is_integral(),
        _element_profile(Q, Q.unit),
        tuple(sorted(_element_profile(Q, x) for x in range(Q.size))),
    )


def quantale_isomorphic(Q: Quantale, R: Quantale) -> QuantaleIso | None:
    """Find a quantale isomorphism ``Q -> R`` or return None.

    Invariants are compared first.  Otherwise images of the join-irreducibles
    of ``Q`` are assigned by backtracking, in order of height, among the
    irreducibles of ``R`` with matching element profiles; partial maps must
    respect order between irreducibles and any products whose value is already
    determined.
    """
    check_size(Q.size, "quantale", derived=True)
    check_size(R.size, "quantale", derived=True)
    if _fingerprint(Q) != _fingerprint(R):
        return None
    LQ, LR = Q.lat, R.lat
    JQ = sorted(LQ.join_irr, key=lambda j: (bin(LQ.down[j]).count("1"), j))
    JR = list(LR.join_irr)
    prof_R = {j: _element_profile(R, j) for j in JR}
    cands = {j: [k for k in JR if prof_R[k] == _element_profile(Q, j)] for j in JQ}
    irr_mask = bits_of(JQ)
    # products of irreducibles, checked once every irreducible below them is assigned
    pending = []
    for a in JQ:
        for b in JQ:
            pending.append((a, b, LQ.down[Q.mul[a][b]] & irr_mask))
    img: dict[int, int] = {}
    used: set[int] = set()

    def extend(x_mask: int) -> int:
        return LR.join(img[j] for j in iter_bits(x_mask & irr_mask))

    def ok_so_far(j: int) -> bool:
        assigned = bits_of(img)
        for j2 in img:
            if LQ.leq(j2, j) != LR.leq(img[j2], img[j]) or LQ.leq(j, j2) != LR.leq(img[j], img[j2]):
                return False
        for a, b, need in pending:
            if a in img and b in img and need & ~assigned == 0:
                if extend(LQ.down[Q.mul[a][b]]) != R.mul[img[a]][img[b]]:
                    return False
        return True

    def search(i: int) -> tuple[int, ...] | None:
        if i == len(JQ):
            fwd = tuple(extend(LQ.down[x]) for x in range(Q.size))
            return fwd if iso_failure(Q, R, fwd) is None else None
        j = JQ[i]
        for k in cands[j]:
            if k in used:
                continue
            img[j] = k
            used.add(k)
            if ok_so_far(j):
                found = search(i + 1)
                if found is not None:
                    return found
            del img[j]
            used.discard(k)
        return None

    fwd = search(0)
    if fwd is None:
        return None
    bwd = [0] * len(fwd)
    for x, y in enumerate(fwd):
        bwd[y] = x
    return QuantaleIso(fwd, tuple(bwd))
