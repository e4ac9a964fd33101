"""Trace, projectivity, generators, progenerators and Morita equivalence.

Throughout, ``M`` is a left Q-module, ``E = End(M)`` acts on the right of
``M`` by ``m.h = h(m)``, and ``M* = Hom(M, Q)`` is the E-Q bimodule of
:func:`homs.dual_module`.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import NotProgenerator, SizeCapExceeded, ValidationError, WorkbenchError
from .homs import DualModule, EndQuantale, dual_module, end_quantale, enumerate_homs, hom_module
from .limits import check_size, current_cap, size_cap
from .qmodule import Action, Hom, Module, Submodule, product_module, regular, revalidate, submodule_generated
from .quantale import Quantale, QuantaleIso, iso_failure, quantale_isomorphic
from .tensor import TensorProduct, assoc_iso, tensor_of_morphisms, tensor_product, unit_iso


def _left(M: Module) -> Module:
    if M.left is None:
        raise ValidationError("expected a left Q-module")
    return M if M.side == "left" else M.restrict("left")


# -- trace and generators ----------------------------------------------------------------


def trace(M: Module) -> Submodule:
    """Submodule of Q generated by the images of all ``f`` in ``Hom(M, Q)``."""
    M = _left(M)
    Q = M.left.ring
    H = enumerate_homs(M, regular(Q, "left"))
    images = {y for h in H.homs for y in h.table}
    return submodule_generated(regular(Q, "left"), images)


def is_generator(M: Module) -> bool:
    return len(trace(M).carrier) == _left(M).left.ring.size


@dataclass(frozen=True)
class Retract:
    """Retraction data ``p o s = id`` through a power or free module.

    ``data`` lists the (hom table, vector) pairs that define ``s`` and ``p``.
    The ambient ``module`` and the maps ``s`` and ``p`` are materialized only
    when the ambient module fits the cap.
    """

    exponent: int
    data: tuple
    module: Module | None = None
    s: Hom | None = None
    p: Hom | None = None


def generator_retract(M: Module) -> Retract | None:
    """Search for ``Q`` as a retract of ``M^I`` with ``I`` a set of homs ``M -> Q``.

    Any retraction ``p: M^I -> Q`` with section ``s`` gives homs
    ``g_i = p o inj_i`` and vectors ``y_i = s(1)_i`` with ``V g_i(y_i) = 1``.
    Each ``y_i`` lies below ``x_g = V{x : g(x) <= 1}`` and ``g(x_g) <= 1``, so a
    retraction exists iff ``V_g g(x_g) = 1``.  Then ``s(q) = (q x_g)_g`` and
    ``p(m) = V_g g(m_g)``.
    """
    M = _left(M)
    Q = M.left.ring
    RQ = regular(Q, "left")
    homs = enumerate_homs(M, RQ).homs
    chosen = []
    for g in homs:
        xg = M.lat.join(x for x in range(M.size) if Q.lat.leq(g.table[x], Q.unit))
        if g.table[xg] != Q.lat.bot:
            chosen.append((g, xg))
    if Q.lat.join(g.table[x] for g, x in chosen) != Q.unit:
        return None
    for q in range(Q.size):
        assert Q.lat.join(g.table[M.lact(q, x)] for g, x in chosen) == q, "p o s is not the identity"
    data = tuple((g.table, x) for g, x in chosen)
    if M.size ** len(chosen) > current_cap():
        return Retract(len(chosen), data)
    P = product_module([M] * len(chosen), left=Q)
    s = Hom(RQ, P.module, tuple(P.element([M.lact(q, x) for _, x in chosen]) for q in range(Q.size)))
    p = Hom(P.module, RQ, tuple(Q.lat.join(g.table[c] for (g, _), c in zip(chosen, t)) for t in P.coords))
    _check_retract(s, p)
    return Retract(len(chosen), data, P.module, s, p)


def _check_retract(s: Hom, p: Hom) -> None:
    for h, name in ((s, "section"), (p, "projection")):
        why = h.failure()
        if why:
            raise AssertionError(f"{name}: {why}")
    if s.then(p).table != tuple(range(s.src.size)):
        raise AssertionError("p o s is not the identity")


# -- projectivity ---------------------------------------------------------------------------


def projective_retract(M: Module) -> Retract | None:
    """Search for ``M`` as a retract of a free module ``Q^n``, ``n <= |J(M)|``.

    A retraction ``Q^n -> M`` with section ``(f_1..f_n)`` and ``m_i = p(e_i)``
    means ``x = V_i f_i(x) m_i`` for all ``x``; each pair satisfies
    ``f_i(x) m_i <= x``.  Such pairs are collected as admissible, and since a
    join-irreducible ``j`` cannot be a join of strictly smaller elements, the
    identity is recovered iff each ``j`` equals ``f(j) m`` for one admissible
    pair.  One pair per irreducible then suffices.
    """
    M = _left(M)
    Q = M.left.ring
    RQ = regular(Q, "left")
    homs = enumerate_homs(M, RQ).homs
    admissible = [
        (f, m)
        for f in homs
        for m in range(M.size)
        if all(M.lat.leq(M.lact(f.table[x], m), x) for x in range(M.size))
    ]
    chosen = []
    for j in M.lat.join_irr:
        hit = next(((f, m) for f, m in admissible if M.lact(f.table[j], m) == j), None)
        if hit is None:
            return None
        if hit not in chosen:
            chosen.append(hit)
    for x in range(M.size):
        assert M.lat.join(M.lact(f.table[x], m) for f, m in chosen) == x, "retraction is not the identity"
    data = tuple((f.table, m) for f, m in chosen)
    if Q.size ** len(chosen) > current_cap():
        return Retract(len(chosen), data)
    F = product_module([RQ] * len(chosen), left=Q)
    s = Hom(M, F.module, tuple(F.element([f.table[x] for f, _ in chosen]) for x in range(M.size)))
    p = Hom(F.module, M, tuple(M.lat.join(M.lact(q, m) for (_, m), q in zip(chosen, t)) for t in F.coords))
    _check_retract(s, p)
    return Retract(len(chosen), data, F.module, s, p)


# -- alpha and beta ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MoritaMap:
    """``alpha: M (x)_E M* -> Q`` or ``beta: M* (x)_Q M -> E``."""

    name: str
    tensor: TensorProduct
    hom: Hom

    def is_surjective(self) -> bool:
        return self.hom.is_surjective()

    def is_injective(self) -> bool:
        return self.hom.is_injective()

    def is_bijective(self) -> bool:
        return self.hom.is_iso()

    def inverse(self) -> Hom | None:
        if not self.is_bijective():
            return None
        inv = [0] * len(self.hom.table)
        for t, v in enumerate(self.hom.table):
            inv[v] = t
        return Hom(self.hom.dst, self.hom.src, tuple(inv))


@dataclass(frozen=True)
class MoritaContext:
    module: Module
    end: EndQuantale
    dual: DualModule

    @property
    def ring(self) -> Quantale:
        return self.module.left.ring

    @property
    def bimodule(self) -> Module:
        """``M`` as a Q-E bimodule."""
        return self.end.bimodule


def morita_context(M: Module) -> MoritaContext:
    M = _left(M)
    D = dual_module(M)
    return MoritaContext(M, D.end, D)


def _checked(name: str, T: TensorProduct, dst: Module, table: tuple[int, ...]) -> MoritaMap:
    h = Hom(T.module, dst, table)
    why = h.failure()
    if why:
        raise AssertionError(f"{name} is not a bimodule homomorphism: {why}")
    return MoritaMap(name, T, h)


def alpha_map(M: Module | MoritaContext) -> MoritaMap:
    """``m (x) f -> f(m)``, a Q-Q bimodule map onto the trace."""
    C = M if isinstance(M, MoritaContext) else morita_context(M)
    Q, D = C.ring, C.dual
    T = tensor_product(C.bimodule, D.module)
    table = T.lift(lambda m, f: D.homs.homs[f].table[m], Q.lat)
    return _checked("alpha", T, regular(Q, "both"), table)


def beta_map(M: Module | MoritaContext) -> MoritaMap:
    """``f (x) m -> (x -> f(x) m)``, an E-E bimodule map."""
    C = M if isinstance(M, MoritaContext) else morita_context(M)
    E, D = C.end.quantale, C.dual
    T = tensor_product(D.module, C.bimodule)
    table = T.lift(lambda f, m: D.fm(f, m), E.lat)
    return _checked("beta", T, regular(E, "both"), table)


def is_projective(M: Module) -> bool:
    return beta_map(M).is_surjective()


@dataclass(frozen=True)
class ProgeneratorCheck:
    module: Module
    alpha: MoritaMap
    beta: MoritaMap
    generator: bool
    projective: bool

    @property
    def is_progenerator(self) -> bool:
        return self.alpha.is_bijective() and self.beta.is_bijective()

    def __bool__(self) -> bool:
        return self.is_progenerator

    @property
    def alpha_inverse(self) -> Hom | None:
        return self.alpha.inverse()

    @property
    def beta_inverse(self) -> Hom | None:
        return self.beta.inverse()


def is_progenerator(M: Module) -> ProgeneratorCheck:
    """Decide by bijectivity of alpha and beta; cross-checked against trace and beta-surjectivity."""
    C = morita_context(M)
    a, b = alpha_map(C), beta_map(C)
    gen = len(trace(C.module).carrier) == C.ring.size
    proj = b.is_surjective()
    if a.is_surjective() and not a.is_injective():
        raise AssertionError("alpha is surjective but not injective")
    if gen != a.is_surjective():
        raise AssertionError("alpha-surjectivity disagrees with trace = Q")
    res = ProgeneratorCheck(C.module, a, b, gen, proj)
    if res.is_progenerator != (gen and proj):
        raise AssertionError("alpha/beta bijectivity disagrees with projective and generator")
    return res


# -- the five isomorphisms for a progenerator ----------------------------------------------


@dataclass(frozen=True)
class IsoItem:
    label: str
    statement: str
    table: tuple[int, ...]
    failure: str | None

    @property
    def ok(self) -> bool:
        return self.failure is None


def _module_iso_failure(h: Hom) -> str | None:
    why = h.failure()
    if why:
        return why
    if not h.is_iso():
        return "map is not bijective"
    return None


def prog_isomorphisms(M: Module) -> list[IsoItem]:
    """Build and check the five isomorphisms attached to a progenerator ``M``.

    With ``N = M*``:

    (i)   ``lambda: N -> Hom_E(M_E, E_E)``, ``lambda(f)(m) = fm``
    (ii)  ``mu: M -> Hom_E(_E N, _E E)``, ``mu(m)(f) = fm``
    (iii) ``sigma: Q -> End(M_E)``, ``sigma(q)(m) = qm``, and
          ``tau: Q -> End(_E N)``, ``tau(q)(f) = fq``
    (iv)  ``ev: M -> Hom_Q(N_Q, Q_Q)``, ``ev(m)(f) = f(m)``
    (v)   ``eps: E -> End(N_Q)``, ``eps(h)(f) = f o h``
    """
    check = is_progenerator(M)
    if not check:
        raise NotProgenerator("alpha and beta are not both bijective")
    C = morita_context(M)
    Q, E, D = C.ring, C.end, C.dual
    Mb, N = C.bimodule, D.module
    EQ = E.quantale
    items = []

    H1, L1 = hom_module(Mb, regular(EQ, "both"), "right")
    lam = tuple(L1.index(tuple(D.fm(f, m) for m in range(Mb.size))) for f in range(N.size))
    items.append(IsoItem("i", "M* = Hom_E(M_E, E_E)", lam, _module_iso_failure(Hom(N, H1, lam))))

    H2, L2 = hom_module(N, regular(EQ, "both"), "left")
    mu = tuple(L2.index(tuple(D.fm(f, m) for f in range(N.size))) for m in range(Mb.size))
    items.append(IsoItem("ii", "M = Hom_E(_E N, _E E)", mu, _module_iso_failure(Hom(Mb, H2, mu))))

    EM = end_quantale(Mb.restrict("right"))
    sigma = tuple(EM.index(tuple(Mb.lact(q, m) for m in range(Mb.size))) for q in range(Q.size))
    items.append(IsoItem("iii-sigma", "Q = End(M_E)", sigma, iso_failure(Q, EM.quantale, sigma)))

    EN = end_quantale(N.restrict("left"))
    tau = tuple(EN.index(tuple(N.ract(f, q) for f in range(N.size))) for q in range(Q.size))
    items.append(IsoItem("iii-tau", "Q = End(_E N)", tau, iso_failure(Q, EN.quantale, tau)))

    H4, L4 = hom_module(N, regular(Q, "both"), "right")
    ev = tuple(L4.index(tuple(D.homs.homs[f].table[m] for f in range(N.size))) for m in range(Mb.size))
    items.append(IsoItem("iv", "M = Hom_Q(N_Q, Q_Q)", ev, _module_iso_failure(Hom(Mb, H4, ev))))

    NQ = end_quantale(N.restrict("right"))
    eps = tuple(
        NQ.index(tuple(D.index(tuple(D.homs.homs[f].table[x] for x in E.hom(h).table)) for f in range(N.size)))
        for h in range(EQ.size)
    )
    items.append(IsoItem("v", "E = End(N_Q)", eps, iso_failure(EQ, NQ.quantale, eps)))
    return items


# -- separators ----------------------------------------------------------------------------


def is_separator_on(M: Module, family: Iterable[tuple[Hom, Hom]]) -> bool:
    """For every ``f != g: X -> Y`` in ``family`` find ``e: M -> X`` with ``f o e != g o e``."""
    for f, g in family:
        if f.table == g.table:
            continue
        H = enumerate_homs(M, f.src)
        if not any(e.then(f).table != e.then(g).table for e in H.homs):
            return False
    return True


# -- Morita equivalence ----------------------------------------------------------------------


@dataclass(frozen=True)
class MoritaCertificate:
    """Progenerator ``P`` over ``Q`` with ``R = End(P)``.

    ``end_iso.fwd`` maps ``R`` ids to ids of :func:`end_quantale(P)`; alpha and
    beta are given as tables over their tensor carriers together with inverses.
    """

    ring: Quantale
    other: Quantale
    module: Module
    end_iso: QuantaleIso
    alpha: tuple[int, ...]
    alpha_inverse: tuple[int, ...]
    beta: tuple[int, ...]
    beta_inverse: tuple[int, ...]


@dataclass(frozen=True)
class MoritaResult:
    certificate: MoritaCertificate | None
    bound: int
    candidates: int
    source: str = ""

    def __bool__(self) -> bool:
        return self.certificate is not None

    @property
    def message(self) -> str:
        if self.certificate is not None:
            return f"Morita equivalent: progenerator with {self.certificate.module.size} elements ({self.source})"
        return (
            f"none within bound {self.bound}: no left module with at most {self.bound} elements is a "
            "progenerator whose endomorphism quantale matches. This is not a proof of Morita inequivalence."
        )


def make_certificate(Q: Quantale, R: Quantale, P: Module) -> MoritaCertificate | None:
    """Certificate for ``P`` if it is a progenerator with ``End(P) = R``, else None."""
    P = _left(P)
    E = end_quantale(P)
    if E.quantale.size != R.size:
        return None
    iso = quantale_isomorphic(R, E.quantale)
    if iso is None:
        return None
    check = is_progenerator(P)
    if not check:
        return None
    return MoritaCertificate(
        Q, R, P, iso, check.alpha.hom.table, check.alpha_inverse.table, check.beta.hom.table, check.beta_inverse.table
    )


def _try(args) -> MoritaCertificate | None:
    Q, R, P, cap = args
    with size_cap(cap):
        try:
            return make_certificate(Q, R, P)
        except SizeCapExceeded:
            return None


def morita_equivalent(
    Q: Quantale,
    R: Quantale,
    bound: int,
    seeds: Sequence[Module] = (),
    workers: int = 1,
) -> MoritaResult:
    """Search for a progenerator ``P`` over ``Q`` with ``End(P)`` isomorphic to ``R``.

    Candidates are the given seeds and the regular module first, then every
    left Q-module with at most ``bound`` elements up to isomorphism in
    canonical order.  The first hit in that order is returned, whatever the
    number of workers.  Failing to find one within the bound says nothing
    about inequivalence.
    """
    from .enumeration import enumerate_modules

    check_size(bound, "module bound")
    def candidates():
        for i, s in enumerate(seeds):
            yield f"seed {i}", _left(s)
        yield "regular module", regular(Q, "left")
        for m in enumerate_modules(Q, bound):
            yield "enumerated", m

    cap = current_cap()
    count = 0
    if workers > 1:
        cands = list(candidates())
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_try, [(Q, R, P, cap) for _, P in cands], chunksize=4))
        for (src, _), cert in zip(cands, results):
            if cert is not None:
                return MoritaResult(cert, bound, len(cands), src)
        return MoritaResult(None, bound, len(cands))
    for src, P in candidates():
        count += 1
        cert = _try((Q, R, P, cap))
        if cert is not None:
            return MoritaResult(cert, bound, count, src)
    return MoritaResult(None, bound, count)


# -- certificate verification -------------------------------------------------------------


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    failure: str | None = None
    witness: tuple = ()
    round_trips: tuple[str, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def transported(cert: MoritaCertificate) -> tuple[Module, Module]:
    """``P`` as a Q-R bimodule and ``P*`` as an R-Q bimodule, through ``end_iso``.

    ``u.r = endIso(r)(u)`` and ``r.f = f o endIso(r)``.
    """
    P, R = cert.module, cert.other
    E = end_quantale(P)
    D = dual_module(P)
    fwd = cert.end_iso.fwd
    ract = Action(R, tuple(E.hom(fwd[r]).table for r in range(R.size)))
    Pb = Module(P.lat, left=P.left, right=ract)
    lact = Action(R, tuple(D.module.left.table[fwd[r]] for r in range(R.size)))
    Ps = Module(D.module.lat, left=lact, right=D.module.right)
    return Pb, Ps


def round_trip(cert: MoritaCertificate, X: Module) -> Hom:
    """``(X (x)_Q P) (x)_R P* -> X`` via associativity, ``1 (x) alpha`` and the right unit."""
    Q = cert.ring
    Pb, Ps = transported(cert)
    D = dual_module(cert.module)
    A = tensor_product(Pb, Ps)
    alpha = Hom(A.module, regular(Q, "both"), A.lift(lambda m, f: D.homs.homs[f].table[m], Q.lat))
    why = alpha.failure()
    if why:
        raise AssertionError(f"alpha over R: {why}")
    assoc = assoc_iso(X, Pb, Ps)
    idX = Hom(X, X, tuple(range(X.size)))
    one_alpha = tensor_of_morphisms(idX, alpha)
    unit = unit_iso(X, "right")
    return assoc.fwd.then(one_alpha).then(unit.fwd)


def default_family(Q: Quantale) -> list[tuple[str, Module]]:
    """Right Q-modules for the round trip: catalog modules over ``Q`` plus regular and point modules."""
    from . import catalog
    from .qmodule import point_module

    out = [("regular", regular(Q, "right")), ("point", point_module(Q, "right"))]
    for name in catalog.names("module"):
        M = catalog.load(name)
        if M.side == "right" and M.ring == Q:
            out.append((name, M))
        elif M.side == "left" and M.ring == Q and Q.is_commutative():
            out.append((name, M.opposite()))
    return out


def verify_certificate(
    Q: Quantale,
    R: Quantale,
    cert: MoritaCertificate,
    family: Sequence[tuple[str, Module]] | None = None,
) -> CertificateCheck:
    """Re-check every claim of ``cert``; report the first failing law."""
    try:
        if cert.ring != Q or cert.other != R:
            return CertificateCheck(False, "certificate is for different quantales")
        P = cert.module
        if P.side != "left" or P.left.ring != Q:
            return CertificateCheck(False, "P is not a left module over the first quantale")
        revalidate(P)
        E = end_quantale(P)
        why = iso_failure(R, E.quantale, cert.end_iso.fwd)
        if why:
            return CertificateCheck(False, f"end_iso: {why}", tuple(cert.end_iso.fwd))
        if tuple(cert.end_iso.fwd[b] for b in cert.end_iso.bwd) != tuple(range(E.quantale.size)):
            return CertificateCheck(False, "end_iso: backward map is not inverse")
        check = is_progenerator(P)
        for name, m, tab, inv in (
            ("alpha", check.alpha, cert.alpha, cert.alpha_inverse),
            ("beta", check.beta, cert.beta, cert.beta_inverse),
        ):
            if tuple(tab) != m.hom.table:
                return CertificateCheck(False, f"{name} table does not match its defining formula")
            if not m.is_bijective():
                return CertificateCheck(False, f"{name} is not bijective")
            if any(inv[tab[t]] != t for t in range(len(tab))) or any(tab[inv[v]] != v for v in range(len(inv))):
                return CertificateCheck(False, f"{name} inverse is not inverse")
        trips = []
        for name, X in family if family is not None else default_family(Q):
            h = round_trip(cert, X)
            why = _module_iso_failure(h)
            if why:
                return CertificateCheck(False, f"round trip on {name}: {why}")
            trips.append(name)
        return CertificateCheck(True, None, (), tuple(trips))
    except (WorkbenchError, AssertionError, KeyError, IndexError) as exc:
        return CertificateCheck(False, f"{type(exc).__name__}: {exc}")
