import time

import pytest

from quantale_workbench import catalog
from quantale_workbench.errors import NotProgenerator
from quantale_workbench.homs import dual_module, end_quantale, enumerate_homs
from quantale_workbench.morita import (
    MoritaCertificate,
    alpha_map,
    beta_map,
    default_family,
    generator_retract,
    is_generator,
    is_progenerator,
    is_projective,
    is_separator_on,
    morita_equivalent,
    prog_isomorphisms,
    projective_retract,
    trace,
    transported,
    verify_certificate,
)
from quantale_workbench.qmodule import free_module, point_module, regular
from quantale_workbench.quantale import QuantaleIso

MODULES = catalog.names("module")


@pytest.fixture(scope="module")
def two_square_search():
    Q = catalog.load("TWO")
    R = end_quantale(catalog.load("TWO^2")).quantale
    return Q, R, morita_equivalent(Q, R, bound=4)


def test_trace_examples():
    two = catalog.load("TWO")
    assert len(trace(regular(two)).carrier) == 2
    assert trace(point_module(two)).carrier == (two.lat.bot,)
    assert len(trace(catalog.load("diamond")).carrier) == 2
    assert len(enumerate_homs(catalog.load("diamond"), regular(two))) == 4


@pytest.mark.parametrize("name", MODULES)
def test_criteria_agree_on_catalog_modules(name):
    M = catalog.load(name)
    proj = is_projective(M)
    gen = is_generator(M)
    assert proj == (projective_retract(M) is not None)
    assert gen == (generator_retract(M) is not None)
    check = is_progenerator(M)
    assert bool(check) == (proj and gen)
    assert bool(check) == (check.alpha.is_bijective() and check.beta.is_bijective())
    assert check.alpha.is_surjective() == gen
    if check.alpha.is_surjective():
        assert check.alpha.is_injective()


def test_expected_catalog_classification():
    projective = {n for n in MODULES if is_projective(catalog.load(n))}
    generators = {n for n in MODULES if is_generator(catalog.load(n))}
    assert set(MODULES) - projective == {"M3", "N5", "C3-nil-Qa"}
    assert set(MODULES) - generators == {"C3-idem-Qa", "C3-nil-Qa", "PZ2-triv", "TWO-point"}


def test_retracts_are_materialized_when_small():
    r = projective_retract(catalog.load("diamond"))
    assert r.s is not None and r.s.then(r.p).table == tuple(range(4))
    g = generator_retract(catalog.load("TWO-chain3"))
    assert g.p is not None and g.s.then(g.p).table == (0, 1)


def test_alpha_beta_examples():
    two = catalog.load("TWO")
    pt = point_module(two)
    assert alpha_map(pt).hom.src.size == 1 and beta_map(pt).hom.dst.size == 1
    for name in ("TWO", "C3-nil", "PZ2", "MAT2-TWO"):
        a = alpha_map(regular(catalog.load(name)))
        assert a.is_bijective()
    b = beta_map(catalog.load("TWO^2"))
    assert b.hom.dst.size == 16 and b.is_surjective()


def test_free_module_is_a_progenerator():
    for name in ("TWO", "C3-nil"):
        F, _ = free_module(catalog.load(name), 2)
        check = is_progenerator(F)
        assert check
        assert check.alpha_inverse.then(check.alpha.hom).table == tuple(range(check.alpha.hom.dst.size))
        assert check.beta_inverse.then(check.beta.hom).table == tuple(range(check.beta.hom.dst.size))


def test_negative_instances_are_fast():
    two = catalog.load("TWO")
    start = time.perf_counter()
    assert not is_generator(point_module(two))
    assert not is_projective(catalog.load("M3"))
    assert not is_progenerator(point_module(two))
    assert time.perf_counter() - start < 1.0


@pytest.mark.parametrize("name", ["TWO-chain", "TWO^2", "C3-nil-reg", "MAT2-TWO-col", "diamond"])
def test_five_isomorphisms(name):
    items = prog_isomorphisms(catalog.load(name))
    assert [i.label for i in items] == ["i", "ii", "iii-sigma", "iii-tau", "iv", "v"]
    for item in items:
        assert item.ok, (item.label, item.failure)


def test_five_isomorphisms_need_a_progenerator():
    with pytest.raises(NotProgenerator):
        prog_isomorphisms(point_module(catalog.load("TWO")))


def catalog_parallel_pairs(Q, limit=256):
    """Distinct parallel homs between catalog left modules over ``Q``."""
    mods = [M for M in map(catalog.load, MODULES) if M.ring == Q]
    pairs = []
    for X in mods:
        for Y in mods:
            if Y.size**X.size > limit:
                continue
            homs = enumerate_homs(X, Y).homs
            pairs += [(f, g) for f in homs for g in homs if f.table < g.table]
    return pairs


def test_separators():
    two = catalog.load("TWO")
    family = catalog_parallel_pairs(two)
    assert family
    assert is_separator_on(regular(two), family)
    assert is_separator_on(catalog.load("diamond"), family)
    assert not is_separator_on(point_module(two), family)
    # identical pairs impose nothing
    f = family[0][0]
    assert is_separator_on(point_module(two), [(f, f)])


@pytest.mark.parametrize("name", ["TWO^2", "MAT2-TWO-col", "MAT2-TWO-reg", "C3-idem^2", "PZ2-reg"])
def test_dual_of_a_progenerator_is_a_progenerator(name):
    M = catalog.load(name)
    assert is_progenerator(M)
    N = dual_module(M).module.restrict("right").opposite()
    assert is_progenerator(N)


def test_identity_equivalence():
    for name in ("TWO", "C3-nil", "PZ2"):
        Q = catalog.load(name)
        res = morita_equivalent(Q, Q, bound=1)
        assert res and res.source == "regular module"
        assert verify_certificate(Q, Q, res.certificate)


def test_two_is_equivalent_to_end_of_two_square(two_square_search):
    Q, R, res = two_square_search
    assert res
    cert = res.certificate
    assert cert.module.size == 4
    assert is_progenerator(cert.module)
    check = verify_certificate(Q, R, cert)
    assert check, check.failure
    assert len(check.round_trips) >= 5


def test_tampered_certificate_is_rejected(two_square_search):
    Q, R, res = two_square_search
    cert = res.certificate
    fwd = list(cert.end_iso.fwd)
    # swap the images of two non-fixed elements
    i, j = next((i, j) for i in range(R.size) for j in range(i + 1, R.size) if i != R.unit and j != R.unit)
    fwd[i], fwd[j] = fwd[j], fwd[i]
    bwd = [0] * len(fwd)
    for x, y in enumerate(fwd):
        bwd[y] = x
    bad = MoritaCertificate(
        cert.ring, cert.other, cert.module, QuantaleIso(tuple(fwd), tuple(bwd)),
        cert.alpha, cert.alpha_inverse, cert.beta, cert.beta_inverse,
    )
    check = verify_certificate(Q, R, bad)
    assert not check
    assert check.failure.startswith("end_iso: multiplication law")


def test_none_within_bound_is_not_a_proof():
    res = morita_equivalent(catalog.load("TWO"), catalog.load("PZ2"), bound=4)
    assert not res
    assert "not a proof of Morita inequivalence" in res.message
    assert res.candidates > 1


def test_search_is_the_same_with_workers():
    Q = catalog.load("TWO")
    R = end_quantale(catalog.load("TWO^2")).quantale
    one = morita_equivalent(Q, R, bound=4)
    many = morita_equivalent(Q, R, bound=4, workers=2)
    assert one.certificate == many.certificate


def test_morita_symmetry_with_dual_seed(two_square_search):
    Q, R, res = two_square_search
    _, Ps = transported(res.certificate)
    back = morita_equivalent(R, Q, bound=1, seeds=[Ps.restrict("left")])
    assert back and back.source == "seed 0"
    assert verify_certificate(R, Q, back.certificate, family=default_family(R)[:2])
