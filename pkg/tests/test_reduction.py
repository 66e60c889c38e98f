from dataclasses import replace
from fractions import Fraction

import pytest

from conftest import load_fixture
from toriclab.core.errors import (
    DimensionMismatch,
    InputError,
    InteriorPointPresent,
    NonCompact,
    NonpositiveMld,
    NonpositiveT,
    NotSimplicial,
    ProjectionBelowAsymmetry,
)
from toriclab.services.exact_lattice import Lattice, LatticeMap, vec
from toriclab.services.polyconv import Polyhedron, lattice_points
from toriclab.services.reduction import (
    GroupRep,
    alc_reduce_germ,
    germ_reduce,
    qfactorial_group,
    series_check,
    series_dictionary,
    series_from_reduction,
    tlc_reduce,
    verify_reduction,
)
from toriclab.services.toric_germ import affine_germ, check_semiample, moment_data

F = Fraction
U_P1A1 = Polyhedron.from_vrep([(0, 0), (1, 0), (0, 1), (-1, 0)])
SIMPLEX = Polyhedron.from_vrep([(0, 0), (1, 0), (0, 1)])
HALF_LATTICE = Lattice.from_generators([vec(1, 0), vec(0, 1), vec(F(1, 2), F(1, 2))], 2)


def simplex(d: int) -> Polyhedron:
    return Polyhedron.from_vrep([tuple(0 for _ in range(d))] + [tuple(int(i == j) for j in range(d)) for i in range(d)])


# ============================================================
# tlc_reduce
# ============================================================

def test_reduce_p1xa1_projects_to_base():
    lat = Lattice.standard(2)
    cert = tlc_reduce(lat, U_P1A1, 1)
    assert cert.phi.linear() == [(0, 1)]
    assert cert.u_prime == Polyhedron.interval(0, 1)
    assert cert.bound.box_side == 1
    assert [(s.b, s.tau) for s in cert.projection_chain] == [((1, 0), F(1, 2))]
    assert cert.emptiness_witness.hits == ()
    assert verify_reduction(cert, lat, U_P1A1, 1) == (True, None)


def test_reduce_base_case_interval():
    lat = Lattice.standard(1)
    cert = tlc_reduce(lat, Polyhedron.interval(0, 1), 1)
    assert cert.projection_chain == ()
    assert cert.phi.matrix == ((1,),)
    assert cert.bound.box_side == 1


def test_reduce_half_lattice_is_sum():
    cert = tlc_reduce(HALF_LATTICE, SIMPLEX, 1)
    assert cert.phi.apply(vec(F(1, 2), F(-1, 2))) == (0,)
    assert cert.phi.apply(vec(1, 0)) == (1,)
    assert cert.u_prime == Polyhedron.interval(0, 1)
    assert cert.projection_chain[0].tau == F(1, 2)
    assert verify_reduction(cert, HALF_LATTICE, SIMPLEX, 1)[0]


def test_reduce_stops_when_quotient_gains_interior_point():
    # 2·simplexe : toute projection primitive courte voit 1 ∈ ]0, 2[
    u = SIMPLEX.scale(2)
    cert = tlc_reduce(Lattice.standard(2), u, 1)
    assert cert.projection_chain == ()
    assert cert.u_prime == u
    assert cert.stop_step.tau == F(1, 2)
    assert cert.stop_gamma == F(1, 2)
    assert cert.stop_step.tau >= cert.stop_gamma
    assert verify_reduction(cert, Lattice.standard(2), u, 1)[0]


def test_reduce_raises_when_stop_step_is_below_asymmetry(monkeypatch):
    monkeypatch.setattr("toriclab.services.reduction.pikhurko_constant", lambda lat, p: (F(1), vec(1)))
    with pytest.raises(ProjectionBelowAsymmetry) as exc:
        tlc_reduce(Lattice.standard(2), SIMPLEX.scale(2), 1)
    assert exc.value.details == {"tau": "1/2", "gamma": "1"}
    assert exc.value.exit_code == 4


def test_reduce_errors():
    lat = Lattice.standard(2)
    with pytest.raises(InteriorPointPresent) as exc:
        tlc_reduce(lat, U_P1A1, 3)
    assert exc.value.details["witness"] == ["-1", "1"]
    with pytest.raises(NonCompact):
        tlc_reduce(lat, Polyhedron.cone([(1, 0), (0, 1)], 2), 1)
    with pytest.raises(NonpositiveT):
        tlc_reduce(lat, U_P1A1, 0)


def test_monotone_transfer(p1xa1):
    """Φ(N ∩ int(tU)) ⊆ N′ ∩ int(tU′) sur un t plus grand que le mld."""
    cert = germ_reduce(p1xa1, 1)
    big = U_P1A1.scale(3)
    image = cert.u_prime.scale(3)
    for x in lattice_points(p1xa1.N, big, "interior"):
        assert image.contains_interior(cert.phi.apply(x))


def test_germ_reduce_composes_sigma0():
    g = load_fixture("a2_sigma0")
    cert = germ_reduce(g, 1)
    assert cert.phi.source is g.N
    assert cert.phi.apply(vec(1, 0)) == (0,)
    assert verify_reduction(cert, g.N, moment_data(g).u, 1) == (True, None)


# ============================================================
# verify_reduction
# ============================================================

def test_verify_detects_scaled_image():
    lat = Lattice.standard(2)
    cert = tlc_reduce(lat, U_P1A1, 1)
    tampered = replace(cert, u_prime=cert.u_prime.scale(2))
    ok, clause = verify_reduction(tampered, lat, U_P1A1, 1)
    assert not ok
    assert clause == "image"


def test_verify_detects_non_surjective_map():
    lat = Lattice.standard(2)
    cert = tlc_reduce(lat, U_P1A1, 1)
    tampered = replace(cert, phi=LatticeMap(((0, 2),), lat, Lattice.standard(1)))
    assert verify_reduction(tampered, lat, U_P1A1, 1) == (False, "surjective")


def test_verify_detects_wrong_t():
    lat = Lattice.standard(2)
    cert = tlc_reduce(lat, U_P1A1, 1)
    assert verify_reduction(cert, lat, U_P1A1, F(1, 2)) == (False, "t")


# ============================================================
# alc_reduce_germ
# ============================================================

def test_alc_half_cyclic():
    g = load_fixture("cyclic_2_11")
    img = alc_reduce_germ(g)
    assert img.mld == 1
    assert img.n_prime.is_standard()
    assert img.sigma_prime == Polyhedron.cone([(1,)], 1)
    assert img.psi_prime == (1,)
    assert [(r.e, r.a) for r in img.rays_prime] == [((1,), 1)]
    psi = check_semiample(g).psi[0]
    assert img.certificate.phi.pullback(img.psi_prime) == psi


def test_alc_half_boundary_keeps_mld():
    g = load_fixture("a2_half")
    img = alc_reduce_germ(g)
    assert img.mld == 1
    assert img.certificate.phi.pullback(img.psi_prime) == check_semiample(g).psi[0]
    for r in img.rays_prime:
        assert r.a == g.rays[r.source].a / r.q
        assert r.q.denominator == 1 and r.q >= 1


def test_alc_half_plane_keeps_identity_level():
    # mld 1 atteint sur la diagonale : aucun quotient, Φ reste l'identité
    g = load_fixture("a2_half")
    img = alc_reduce_germ(g)
    assert img.certificate.projection_chain == ()
    assert img.certificate.stop_gamma == F(1, 2)
    assert img.n_prime.dim == 2
    assert img.certificate.phi.apply(vec(1, 0)) == (1, 0)
    assert img.certificate.phi.apply(vec(0, 1)) == (0, 1)
    assert sorted((r.e, r.a) for r in img.rays_prime) == [((0, 1), F(1, 2)), ((1, 0), F(1, 2))]


def test_alc_smooth_line_is_identity():
    img = alc_reduce_germ(load_fixture("a1_smooth"))
    assert img.certificate.projection_chain == ()
    assert [(r.e, r.a) for r in img.rays_prime] == [((1,), 1)]


def test_alc_rejects_fibrations(p1xa1):
    with pytest.raises(InputError):
        alc_reduce_germ(p1xa1)


def test_alc_rejects_zero_mld():
    g = affine_germ(Lattice.standard(2), [(1, 0), (0, 1)], [0, 0])
    with pytest.raises(NonpositiveMld):
        alc_reduce_germ(g)


# ============================================================
# DICTIONNAIRE ℚ-FACTORIEL
# ============================================================

def test_group_of_half_cyclic():
    ctx = qfactorial_group(load_fixture("cyclic_2_11"))
    assert ctx.invariants == (2,)
    assert ctx.generators == ((F(1, 2), F(1, 2)),)
    assert ctx.group.contains(vec(F(1, 2), F(1, 2)))
    assert not ctx.group.contains(vec(F(1, 2), 0))


def test_group_of_smooth_plane_is_trivial():
    ctx = qfactorial_group(load_fixture("a2_smooth"))
    assert ctx.invariants == ()
    assert ctx.lattice.is_standard()


def test_group_of_cone_12():
    ctx = qfactorial_group(load_fixture("cone_12"))
    assert ctx.ray_basis == ((1, 0), (1, 2))
    assert ctx.invariants == (2,)
    assert ctx.generators == ((F(1, 2), F(1, 2)),)


def test_group_requires_simplicial_cone():
    with pytest.raises(NotSimplicial):
        qfactorial_group(load_fixture("square_cone"))


def test_series_check_sum_form():
    assert series_check(GroupRep(d=2, dual_generators=((1, 1),)), SIMPLEX, 1)


@pytest.mark.parametrize("d", [2, 3])
def test_series_check_standard_group(d):
    grp = GroupRep(d=d, dual_generators=tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))
    assert series_check(grp, simplex(d), 1)
    assert not series_check(grp, simplex(d), d + 1)


def test_series_check_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        series_check(GroupRep(d=3, dual_generators=((1, 0, 0),)), SIMPLEX, 1)


@pytest.mark.parametrize("name", ["cyclic_2_11", "cyclic_3_11", "cyclic_5_12", "cone_12", "a2_mixed", "cyclic_2_111"])
def test_series_dictionary_agrees_with_ct(name):
    report = series_dictionary(load_fixture(name), ["1/2", "1", "3/2"])
    for t, by_group, by_germ in report.checks:
        assert by_group == by_germ, t


def test_series_from_reduction_contains_n():
    g = load_fixture("cyclic_3_11")
    ctx = qfactorial_group(g)
    grp = series_from_reduction(ctx, germ_reduce(g, F(2, 3)))
    assert all(grp.contains(b) for b in ctx.lattice.basis)
    assert series_check(grp, ctx.u, F(2, 3))
