"""Tensor products of quantale modules.

``M (x)_Q N`` is realized as the family of subsets ``T`` of ``M x N`` that are
closed under the three balancing rules

* (R1) ``X x {y} <= T``  iff  ``(VX, y) in T``      for every ``X <= M``
* (R2) ``{x} x Y <= T``  iff  ``(x, VY) in T``      for every ``Y <= N``
* (R3) ``(x.a, y) in T``  iff  ``(x, a.y) in T``     for every scalar ``a``

ordered by inclusion.  These are the class maxima of the sup-lattice
congruence on the powerset of ``M x N`` generated by the balancing pairs.
(R1) with ``X`` empty forces ``(bot, y)`` into every closed set, and with
``X = {x, x'}`` for ``x' <= x`` it forces down-closure; so every column is a
principal down-set, and dually every row.

Subsets are Python ints used as bitsets over pair ids ``x * |N| + y``.  All
single-premise consequences (down-closure in either coordinate and both
directions of (R3)) are precomputed as transitive reachability masks; the
closure loop then only has to add the join of each column and each row.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Sequence

from .errors import NotAHom, ValidationError
from .homs import HomLattice, enumerate_homs, hom_module
from .lattice import SupLattice, iter_bits
from .limits import check_size
from .qmodule import Action, Hom, Module, regular

AUDIT_PAIR_LIMIT = 20


class TensorProduct:
    """``M (x)_Q N`` for a right Q-module ``M`` and a left Q-module ``N``.

    If ``M`` also carries a left S-action, or ``N`` a right R-action, the
    tensor inherits them: ``s.(x (x) y) = (s.x) (x) y`` and
    ``(x (x) y).r = x (x) (y.r)``.
    """

    def __init__(self, M: Module, N: Module, *, audit: bool | None = None):
        if M.right is None or N.left is None:
            raise ValidationError("tensor needs a right module on the left and a left module on the right")
        if M.right.ring != N.left.ring:
            raise ValidationError("tensor factors are modules over different quantales")
        check_size(M.size * N.size, "tensor pair universe", derived=True)
        self.M, self.N = M, N
        self.ring = M.right.ring
        self.nM, self.nN = M.size, N.size
        self.npairs = self.nM * self.nN
        self._row_mask = (1 << self.nN) - 1
        self._reach = self._reachability()
        self._forced_mask = self._forced()
        self.base = self.closure(0)
        self.carrier = self._enumerate()
        self._index = {c: i for i, c in enumerate(self.carrier)}
        self.lat = self._lattice()
        check_size(self.lat.size, "tensor product", derived=True)
        self.elementary = tuple(
            tuple(self._index[self.closure(1 << (x * self.nN + y))] for y in range(self.nN)) for x in range(self.nM)
        )
        self.module = Module(self.lat, left=self._induced_left(), right=self._induced_right())
        if audit is None:
            audit = self.npairs <= AUDIT_PAIR_LIMIT
        if audit:
            self.audit()

    # -- pair encoding ---------------------------------------------------------

    def pair(self, x: int, y: int) -> int:
        return x * self.nN + y

    def unpair(self, p: int) -> tuple[int, int]:
        return divmod(p, self.nN)

    def pairs(self, t: int) -> list[tuple[int, int]]:
        """Pairs of the closed set with id ``t``."""
        return [divmod(p, self.nN) for p in iter_bits(self.carrier[t])]

    # -- closure engine -------------------------------------------------------------

    def _forced(self) -> int:
        M, N, nN = self.M, self.N, self.nN
        mask = 0
        for x in range(self.nM):
            mask |= 1 << (x * nN + N.lat.bot)
        for y in range(nN):
            mask |= 1 << (M.lat.bot * nN + y)
        return mask

    def _reachability(self) -> list[int]:
        M, N, nN = self.M, self.N, self.nN
        direct = [1 << p for p in range(self.npairs)]
        for x in range(self.nM):
            for y in range(nN):
                p = x * nN + y
                for x2 in iter_bits(M.lat.down[x]):
                    direct[p] |= 1 << (x2 * nN + y)
                for y2 in iter_bits(N.lat.down[y]):
                    direct[p] |= 1 << (x * nN + y2)
        rt, lt = self.M.right.table, self.N.left.table
        for a in range(self.ring.size):
            ra, la = rt[a], lt[a]
            for x in range(self.nM):
                for y in range(nN):
                    p1 = ra[x] * nN + y
                    p2 = x * nN + la[y]
                    direct[p1] |= 1 << p2
                    direct[p2] |= 1 << p1
        reach = list(direct)
        changed = True
        while changed:
            changed = False
            for p in range(self.npairs):
                r = reach[p]
                acc = r
                for q in iter_bits(r & ~(1 << p)):
                    acc |= reach[q]
                if acc != r:
                    reach[p] = acc
                    changed = True
        return reach

    def _expand(self, t: int, new: int) -> int:
        for p in iter_bits(new & ~t):
            t |= self._reach[p]
        return t | new

    def closure(self, bits: int) -> int:
        """Least closed set containing ``bits``."""
        nN, nM = self.nN, self.nM
        JM, JN = self.M.lat, self.N.lat
        t = self._expand(0, bits | self._forced_mask)
        while True:
            add = 0
            for y in range(nN):
                xs = [x for x in range(nM) if t >> (x * nN + y) & 1]
                p = JM.join(xs) * nN + y
                if not t >> p & 1:
                    add |= 1 << p
            for x in range(nM):
                p = x * nN + JN.join_mask(t >> (x * nN) & self._row_mask)
                if not t >> p & 1:
                    add |= 1 << p
            if not add:
                return t
            t = self._expand(t, add)

    def is_closed(self, bits: int) -> bool:
        """Direct check of (R1)-(R3) on a subset, independent of the closure engine."""
        M, N, nN, nM = self.M, self.N, self.nN, self.nM
        # empty joins: (bot, y) and (x, bot) are in every closed set
        forced = self._forced_mask
        if bits & forced != forced:
            return False

        def has(x: int, y: int) -> bool:
            return bool(bits >> (x * nN + y) & 1)

        for y in range(nN):
            col = [x for x in range(nM) if has(x, y)]
            if not has(M.lat.bot, y):
                return False
            for a in col:
                for b in col:
                    if not has(M.lat.join2[a][b], y):
                        return False
                for x in range(nM):
                    if M.lat.leq(x, a) and not has(x, y):
                        return False
        for x in range(nM):
            row = [y for y in range(nN) if has(x, y)]
            if not has(x, N.lat.bot):
                return False
            for a in row:
                for b in row:
                    if not has(x, N.lat.join2[a][b]):
                        return False
                for y in range(nN):
                    if N.lat.leq(y, a) and not has(x, y):
                        return False
        rt, lt = M.right.table, N.left.table
        for a in range(self.ring.size):
            for x in range(nM):
                for y in range(nN):
                    if has(rt[a][x], y) != has(x, lt[a][y]):
                        return False
        return True

    # -- carrier ------------------------------------------------------------------------

    def _enumerate(self) -> tuple[int, ...]:
        gens = sorted({self.closure(1 << p) for p in range(self.npairs)})
        seen = {self.base}
        frontier = [self.base]
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    c = self.closure(e | g)
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
            frontier = nxt
        return tuple(sorted(seen, key=lambda c: (bin(c).count("1"), c)))

    def _lattice(self) -> SupLattice:
        cs = self.carrier
        up = []
        for c in cs:
            mask = 0
            for j, d in enumerate(cs):
                if c & ~d == 0:
                    mask |= 1 << j
            up.append(mask)
        return SupLattice.from_up_masks([f"t{i}" for i in range(len(cs))], up)

    def audit(self, full: bool = False) -> None:
        """Exhaustive check that the carrier is exactly the family of closed subsets.

        Every closed subset contains the forced pairs ``(x, bot)`` and
        ``(bot, y)``, so by default only subsets of the remaining pairs are
        enumerated.  With ``full`` every subset of ``M x N`` is tried.
        """
        if full:
            found = {s for s in range(1 << self.npairs) if self.is_closed(s)}
        else:
            forced = self._forced_mask
            free = [p for p in range(self.npairs) if not forced >> p & 1]
            found = set()
            for k in range(len(free) + 1):
                for combo in combinations(free, k):
                    s = forced
                    for p in combo:
                        s |= 1 << p
                    if self.is_closed(s):
                        found.add(s)
        if found != set(self.carrier):
            raise AssertionError("tensor carrier disagrees with the exhaustive closed-set audit")

    # -- elements ---------------------------------------------------------------------

    def element(self, bits: int) -> int:
        return self._index[self.closure(bits)]

    def lift(self, fn: Callable[[int, int], int], target: SupLattice) -> tuple[int, ...]:
        """Table of the join-preserving extension of ``(x, y) -> fn(x, y)``.

        Each closed set is the join of the elementary tensors of its pairs, so
        the extension maps it to the join of ``fn`` over those pairs.
        """
        return tuple(target.join(fn(x, y) for x, y in self.pairs(t)) for t in range(len(self.carrier)))

    def _induced_left(self) -> Action | None:
        if self.M.left is None:
            return None
        S, st = self.M.left.ring, self.M.left.table
        E = self.elementary
        rows = tuple(self.lift(lambda x, y, r=st[s]: E[r[x]][y], self.lat) for s in range(S.size))
        return Action(S, rows)

    def _induced_right(self) -> Action | None:
        if self.N.right is None:
            return None
        R, rt = self.N.right.ring, self.N.right.table
        E = self.elementary
        rows = tuple(self.lift(lambda x, y, r=rt[s]: E[x][r[y]], self.lat) for s in range(R.size))
        return Action(R, rows)

    def describe(self, t: int) -> list[tuple[str, str]]:
        """Sorted pair list of an element, by element names."""
        M, N = self.M, self.N
        return [(M.names[x], N.names[y]) for x, y in self.pairs(t)]


@lru_cache(maxsize=128)
def tensor_product(M: Module, N: Module) -> TensorProduct:
    return TensorProduct(M, N)


def elementary_tensor(T: TensorProduct, x: int, y: int) -> int:
    return T.elementary[x][y]


# -- morphisms ------------------------------------------------------------------------


def _verified(h: Hom) -> Hom:
    why = h.failure()
    if why:
        raise NotAHom(why)
    return h


def tensor_of_morphisms(f: Hom, g: Hom) -> Hom:
    """``f (x) g`` on ``src(f) (x) src(g)``, determined by ``x (x) y -> f(x) (x) g(y)``."""
    A = tensor_product(f.src, g.src)
    B = tensor_product(f.dst, g.dst)
    table = A.lift(lambda x, y: B.elementary[f.table[x]][g.table[y]], B.lat)
    return _verified(Hom(A.module, B.module, table))


@dataclass(frozen=True)
class IsoPair:
    fwd: Hom
    bwd: Hom

    def failure(self) -> str | None:
        for name, h in (("forward", self.fwd), ("backward", self.bwd)):
            why = h.failure()
            if why:
                return f"{name} map: {why}"
        if self.bwd.then(self.fwd).table != tuple(range(self.fwd.dst.size)):
            return "forward o backward is not the identity"
        if self.fwd.then(self.bwd).table != tuple(range(self.fwd.src.size)):
            return "backward o forward is not the identity"
        return None


def _checked_pair(fwd: Hom, bwd: Hom) -> IsoPair:
    pair = IsoPair(fwd, bwd)
    why = pair.failure()
    if why:
        raise AssertionError(why)
    return pair


def assoc_iso(M: Module, N: Module, O: Module) -> IsoPair:
    """``(M (x) N) (x) O  ->  M (x) (N (x) O)`` and its inverse.

    Both sides are computed independently; the maps are the join-preserving
    extensions of ``(x (x) y) (x) z <-> x (x) (y (x) z)``.
    """
    MN = tensor_product(M, N)
    NO = tensor_product(N, O)
    lhs = tensor_product(MN.module, O)
    rhs = tensor_product(M, NO.module)
    fwd = []
    for T in range(lhs.lat.size):
        acc = []
        for t, z in lhs.pairs(T):
            for x, y in MN.pairs(t):
                acc.append(rhs.elementary[x][NO.elementary[y][z]])
        fwd.append(rhs.lat.join(acc))
    bwd = []
    for T in range(rhs.lat.size):
        acc = []
        for x, s in rhs.pairs(T):
            for y, z in NO.pairs(s):
                acc.append(lhs.elementary[MN.elementary[x][y]][z])
        bwd.append(lhs.lat.join(acc))
    return _checked_pair(Hom(lhs.module, rhs.module, tuple(fwd)), Hom(rhs.module, lhs.module, tuple(bwd)))


def unit_iso(M: Module, side: str | None = None) -> IsoPair:
    """``Q (x)_Q M -> M`` (left) or ``M (x)_Q Q -> M`` (right), with inverses.

    The regular factor is taken as a Q-Q bimodule so the tensor keeps the
    action being compared.
    """
    side = side or ("left" if M.left else "right")
    if side == "left":
        Q = M.left.ring
        T = tensor_product(regular(Q, "both"), M)
        fwd = T.lift(lambda q, m: M.left.table[q][m], M.lat)
        bwd = tuple(T.elementary[Q.unit][m] for m in range(M.size))
    else:
        Q = M.right.ring
        T = tensor_product(M, regular(Q, "both"))
        fwd = T.lift(lambda m, q: M.right.table[q][m], M.lat)
        bwd = tuple(T.elementary[m][Q.unit] for m in range(M.size))
    return _checked_pair(Hom(T.module, M, fwd), Hom(M, T.module, bwd))


# -- hom-tensor adjunction -------------------------------------------------------------


@dataclass
class Adjunction:
    """``phi: Hom(M (x)_Q N, O) -> Hom(M, Hom_R(N, O))`` with its inverse."""

    tensor: TensorProduct
    inner: Module
    inner_homs: HomLattice
    lhs: HomLattice
    rhs: HomLattice
    phi: tuple[int, ...]
    psi: tuple[int, ...]

    def _phi_table(self, f: Sequence[int]) -> tuple[int, ...]:
        E = self.tensor.elementary
        return tuple(
            self.inner_homs.index(tuple(f[E[m][n]] for n in range(self.tensor.nN))) for m in range(self.tensor.nM)
        )

    def naturality_in_source(self, a: Hom) -> bool:
        """Square for an endomorphism ``a`` of ``M``: ``phi(f o (a (x) 1)) = phi(f) o a``."""
        N = self.tensor.N
        a1 = tensor_of_morphisms(a, Hom(N, N, tuple(range(N.size))))
        for i, f in enumerate(self.lhs.homs):
            pre = a1.then(f)
            if self._phi_table(pre.table) != tuple(self.rhs.homs[self.phi[i]].table[x] for x in a.table):
                return False
        return True

    def naturality_in_target(self, c: Hom) -> bool:
        """Square for an endomorphism ``c`` of ``O``: ``phi(c o f) = c_* o phi(f)``."""
        H = self.inner_homs
        push = [H.index(tuple(c.table[y] for y in h.table)) for h in H.homs]
        for i, f in enumerate(self.lhs.homs):
            post = f.then(c)
            if self._phi_table(post.table) != tuple(push[v] for v in self.rhs.homs[self.phi[i]].table):
                return False
        return True


def adjunction_phi(M: Module, N: Module, O: Module) -> Adjunction:
    """Hom-tensor adjunction for ``M`` an S-Q, ``N`` a Q-R and ``O`` an S-R bimodule.

    S and R may be absent (one-sided ``M``/``N``, or ``O`` a bare lattice when
    neither is present).
    """
    T = tensor_product(M, N)
    lhs = enumerate_homs(T.module, O)
    inner, H = hom_module(N, O, "right" if N.right else None)
    rhs = enumerate_homs(M, inner, prefix="g")
    adj = Adjunction(T, inner, H, lhs, rhs, (), ())
    phi = tuple(rhs.index(adj._phi_table(f.table)) for f in lhs.homs)
    psi = []
    for g in rhs.homs:
        table = T.lift(lambda m, n: H.homs[g.table[m]].table[n], O.lat)
        psi.append(lhs.index(table))
    adj.phi, adj.psi = phi, tuple(psi)
    if any(adj.psi[adj.phi[i]] != i for i in range(len(lhs))) or any(
        adj.phi[adj.psi[j]] != j for j in range(len(rhs))
    ):
        raise AssertionError("phi and its inverse are not mutually inverse")
    return adj
