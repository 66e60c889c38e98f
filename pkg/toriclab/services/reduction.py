"""
toriclab/services/reduction.py
==============================
Réduction t-lc (projections successives le long de vecteurs courts),
réduction a-lc des germes de singularité avec germe image, et
dictionnaire ℚ-factoriel ↔ groupes ℤ^d ≤ G ≤ ℝ^d.

Une réduction t-lc est une surjection Φ : N → N′ telle que U′ = Φ(U) soit
compact, N′ ∩ int(tU′) = ∅ et (N′, tU′) borné ; le certificat porte de
quoi re-vérifier ces trois points sans refaire la recherche.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from toriclab.core.errors import (
    DimensionMismatch,
    ImageMldMismatch,
    InputError,
    InteriorPointPresent,
    NonCompact,
    NonpositiveMld,
    NonpositiveT,
    NotSimplicial,
    OriginNotContained,
    ProjectionBelowAsymmetry,
    PsiDoesNotFactor,
    ToricLabError,
)
from toriclab.services.exact_lattice import (
    Lattice,
    LatticeMap,
    Vec,
    as_fraction,
    dot,
    inverse,
    lattice_quotient,
    primitive_decompose,
    rank,
    snf,
    solve_combination,
    unit,
    vec_mat,
    zero,
)
from toriclab.services.oracle import (
    EnumerationRecord,
    ScanPredicate,
    bounding_box,
    oracle_lattice_scan,
    replay,
)
from toriclab.services.polyconv import (
    BoundednessCertificate,
    Polyhedron,
    boundedness_certificate,
    lattice_points,
    minkowski_diff_self,
    pikhurko_constant,
    successive_minimum,
    width,
)
from toriclab.services.toric_germ import (
    FibrationGerm,
    affine_germ,
    check_Ct,
    check_semiample,
    mld_fiber,
    sigma0_reduce,
)

logger = logging.getLogger(__name__)


# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class ProjectionStep:
    b: Vec
    tau: Fraction


@dataclass(frozen=True)
class ReductionCertificate:
    t: Fraction
    phi: LatticeMap
    projection_chain: tuple[ProjectionStep, ...]
    u_prime: Polyhedron
    emptiness_witness: EnumerationRecord
    bound: BoundednessCertificate
    # γ(Λ′, □′) du quotient refusé, quand l'arrêt vient d'un point intérieur
    stop_step: ProjectionStep | None = None
    stop_gamma: Fraction | None = None

    @property
    def n_prime(self) -> Lattice:
        return self.phi.target


@dataclass(frozen=True)
class ImageRay:
    e: Vec
    a: Fraction
    source: int
    q: Fraction


@dataclass(frozen=True)
class GermImage:
    n_prime: Lattice
    sigma_prime: Polyhedron
    psi_prime: Vec
    rays_prime: tuple[ImageRay, ...]
    germ: FibrationGerm
    certificate: ReductionCertificate
    mld: Fraction


@dataclass(frozen=True)
class GroupRep:
    """G = g⁻¹(ℤ^p), g de composantes les covecteurs entiers `dual_generators`."""

    d: int
    dual_generators: tuple[tuple[int, ...], ...]

    @property
    def p(self) -> int:
        return len(self.dual_generators)

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(dot(tuple(Fraction(c) for c in g), x).denominator == 1 for g in self.dual_generators)


@dataclass(frozen=True)
class QFactorialGroup:
    """N dans les coordonnées des rayons : ℤ^d ≤ N ≤ ℝ^d."""

    ray_basis: tuple[Vec, ...]
    lattice: Lattice
    invariants: tuple[int, ...]
    generators: tuple[Vec, ...]
    group: GroupRep
    u: Polyhedron


# ============================================================
# RÉDUCTION t-lc
# ============================================================

def _interior_record(lat: Lattice, body: Polyhedron) -> EnumerationRecord:
    box = bounding_box(lat, body.vertices)
    return oracle_lattice_scan(lat, box, ScanPredicate("interior", body.inequalities))


def tlc_reduce(lat: Lattice, u: Polyhedron, t: int | str | Fraction) -> ReductionCertificate:
    """
    Tant que le quotient par un vecteur réalisant λ1(Λ, t(U − U)) garde un
    intérieur sans point du réseau, on projette. Arrêt en dimension 1 ou au
    premier quotient qui acquiert un point intérieur (niveau courant gardé).
    """
    t = as_fraction(t)
    if t <= 0:
        raise NonpositiveT(t=str(t))
    if not u.is_compact:
        raise NonCompact()
    if not u.contains(zero(u.dim)):
        raise OriginNotContained()
    body = u.scale(t)
    hits = lattice_points(lat, body, "interior")
    if hits:
        raise InteriorPointPresent(witness=[str(x) for x in hits[0]])

    phi = LatticeMap.identity(lat)
    current, image = lat, body
    chain: list[ProjectionStep] = []
    stop_step, stop_gamma = None, None
    while current.dim > 1:
        tau, witnesses = successive_minimum(current, minkowski_diff_self(image), 1)
        b = witnesses[0]
        quotient, proj = lattice_quotient(current, b)
        projected = image.image(proj.apply, quotient.dim)
        if lattice_points(quotient, projected, "interior"):
            gamma, _ = pikhurko_constant(quotient, projected)
            stop_step, stop_gamma = ProjectionStep(b, tau), gamma
            if tau < gamma:
                raise ProjectionBelowAsymmetry(tau=str(tau), gamma=str(gamma))
            break
        chain.append(ProjectionStep(b, tau))
        phi = proj.compose(phi)
        current, image = quotient, projected
        logger.debug("[REDUCE] projection le long de %s (τ = %s), rang %s", [str(x) for x in b], tau, current.dim)

    u_prime = u.image(phi.apply, current.dim)
    cert = ReductionCertificate(
        t=t,
        phi=phi,
        projection_chain=tuple(chain),
        u_prime=u_prime,
        emptiness_witness=_interior_record(current, image),
        bound=boundedness_certificate(current, image),
        stop_step=stop_step,
        stop_gamma=stop_gamma,
    )
    logger.info("[REDUCE] réduction t-lc : rang %s -> %s, %s étapes", lat.dim, current.dim, len(chain))
    return cert


def germ_reduce(g: FibrationGerm, t: int | str | Fraction) -> ReductionCertificate:
    """sigma0_reduce puis tlc_reduce ; Φ rendu comme composée."""
    red = sigma0_reduce(g)
    cert = tlc_reduce(red.n0, red.u0, t)
    return replace(cert, phi=cert.phi.compose(red.quot))


def _check_bound(cert: ReductionCertificate, body: Polyhedron) -> bool:
    lat = cert.n_prime
    basis = list(cert.bound.dual_basis)
    if len(basis) != lat.dim:
        return False
    dual = lat.dual()
    try:
        coords = [dual.integer_coords(phi) for phi in basis]
    except ToricLabError:
        return False
    s, _, _ = snf([list(c) for c in coords])
    if any(abs(s[i][i]) != 1 for i in range(lat.dim)):
        return False
    return max(width(body, phi) for phi in basis) == cert.bound.box_side


def verify_reduction(
    cert: ReductionCertificate, lat: Lattice, u: Polyhedron, t: int | str | Fraction
) -> tuple[bool, str | None]:
    """(ok, première clause en échec)."""
    t = as_fraction(t)
    clauses = [
        ("t", lambda: cert.t == t),
        ("source", lambda: cert.phi.source.same_as(lat)),
        ("surjective", lambda: cert.phi.target.dim > 0 and not cert.phi.is_zero() and cert.phi.is_surjective()),
        ("image", lambda: u.image(cert.phi.apply, cert.phi.target.dim) == cert.u_prime),
        ("compact", lambda: cert.u_prime.is_compact),
        ("empty_interior", lambda: not _interior_record(cert.n_prime, cert.u_prime.scale(t)).hits),
        ("witness_replay", lambda: not cert.emptiness_witness.hits and replay(cert.emptiness_witness)),
        ("bounded", lambda: _check_bound(cert, cert.u_prime.scale(t))),
        ("stop_gamma", lambda: cert.stop_step is None or cert.stop_step.tau >= cert.stop_gamma),
    ]
    for name, check in clauses:
        try:
            ok = check()
        except ToricLabError as err:
            logger.debug("[REDUCE] clause %s : %s", name, err.code)
            ok = False
        if not ok:
            return False, name
    return True, None


# ============================================================
# RÉDUCTION a-lc D'UN GERME DE SINGULARITÉ
# ============================================================

def _factor_psi(psi: Vec, phi: LatticeMap) -> Vec:
    """ψ′ avec ψ = ψ′ ∘ Φ."""
    psi_prime = solve_combination(phi.linear(), psi)
    if psi_prime is None or phi.pullback(psi_prime) != psi:
        raise PsiDoesNotFactor(psi=[str(x) for x in psi])
    return psi_prime


def alc_reduce_germ(g: FibrationGerm) -> GermImage:
    if not g.is_affine:
        raise InputError("germe de singularité attendu (f = id)")
    a, _ = mld_fiber(g)
    if a <= 0:
        raise NonpositiveMld(mld=str(a))
    cert = germ_reduce(g, a)
    phi = cert.phi
    psi = check_semiample(g).psi[0]
    psi_prime = _factor_psi(psi, phi)

    n_prime = phi.target
    images = [phi.apply(r.e) for r in g.rays]
    sigma_prime = Polyhedron.cone([y for y in images if any(y)], n_prime.dim)
    rays_prime = []
    for rho in sigma_prime.rays:
        for i, y in enumerate(images):
            if any(y) and rank([rho, y], n_prime.dim) == 1 and dot(rho, y) > 0:
                e, q = primitive_decompose(y, n_prime)
                rays_prime.append(ImageRay(e=e, a=g.rays[i].a / q, source=i, q=q))
                break
    for r in rays_prime:
        if dot(psi_prime, r.e) <= 0:
            raise PsiDoesNotFactor("ψ′ n'est pas dans int(σ′^∨)", ray=[str(x) for x in r.e])

    image = affine_germ(n_prime, [r.e for r in rays_prime], [r.a for r in rays_prime])
    image_mld, _ = mld_fiber(image)
    if image_mld != a:
        raise ImageMldMismatch(expected=str(a), got=str(image_mld))
    logger.info("[REDUCE] germe image de rang %s, mld %s", n_prime.dim, a)
    return GermImage(
        n_prime=n_prime,
        sigma_prime=sigma_prime,
        psi_prime=psi_prime,
        rays_prime=tuple(rays_prime),
        germ=image,
        certificate=cert,
        mld=a,
    )


# ============================================================
# DICTIONNAIRE ℚ-FACTORIEL
# ============================================================

def qfactorial_group(g: FibrationGerm) -> QFactorialGroup:
    """
    Coordonnées des rayons : e_i ↦ i-ème vecteur standard, N ↦ ℤ^d + générateurs.
    N/ℤ^d sous forme cyclique (SNF de la matrice des rayons dans une base de N).
    """
    d = g.dim
    if not g.is_affine or len(g.rays) != d or rank(g.vectors, d) != d:
        raise NotSimplicial(rays=len(g.rays), dim=d)
    ray_inv = inverse(g.vectors)
    change = [vec_mat(b, ray_inv, d) for b in g.N.basis]  # base de N en coordonnées rayons
    k = [list(g.N.integer_coords(r.e)) for r in g.rays]
    s, _, v = snf(k)
    v_inv = inverse([tuple(Fraction(x) for x in row) for row in v])

    invariants, generators = [], []
    for i in range(d):
        if s[i][i] > 1:
            gen = vec_mat(v_inv[i], change, d)
            invariants.append(s[i][i])
            generators.append(tuple(x - (x.numerator // x.denominator) for x in gen))

    lattice = Lattice(tuple(change))
    dual = lattice.dual().canonical()
    group = GroupRep(d=d, dual_generators=tuple(tuple(int(x) for x in row) for row in dual.basis))
    u = Polyhedron.from_vrep(
        [zero(d)] + [tuple(x / r.a for x in unit(d, i)) for i, r in enumerate(g.rays) if r.a > 0],
        [unit(d, i) for i, r in enumerate(g.rays) if r.a == 0],
        d,
    )
    return QFactorialGroup(
        ray_basis=tuple(g.vectors),
        lattice=lattice,
        invariants=tuple(invariants),
        generators=tuple(generators),
        group=group,
        u=u,
    )


def series_check(grp: GroupRep, u: Polyhedron, t: int | str | Fraction) -> bool:
    """G ∩ int(tU) = ∅ ⟺ ℤ^p ∩ int(t·g(U)) = ∅."""
    t = as_fraction(t)
    if t <= 0:
        raise NonpositiveT(t=str(t))
    if u.dim != grp.d:
        raise DimensionMismatch("U et G de dimensions différentes", u=u.dim, group=grp.d)
    rows = [tuple(Fraction(c) for c in row) for row in grp.dual_generators]
    if rank(rows, grp.d) != grp.p:
        raise InputError("covecteurs de G liés")
    image = u.image(lambda x: tuple(dot(row, x) for row in rows), grp.p)
    return not lattice_points(Lattice.standard(grp.p), image.scale(t), "interior")


def series_from_reduction(ctx: QFactorialGroup, cert: ReductionCertificate) -> GroupRep:
    """G = Φ⁻¹(N′) en coordonnées rayons (contient N, G ∩ int(tU) = ∅)."""
    phi = cert.phi
    target = phi.target
    columns = [target.integer_coords(phi.apply(e)) for e in ctx.ray_basis]
    rows = tuple(tuple(col[j] for col in columns) for j in range(target.dim))
    return GroupRep(d=len(ctx.ray_basis), dual_generators=rows)


@dataclass(frozen=True)
class SeriesReport:
    context: QFactorialGroup
    checks: tuple[tuple[Fraction, bool, bool], ...]
    reduction_group: GroupRep | None


def series_dictionary(g: FibrationGerm, ts: Sequence[int | str | Fraction]) -> SeriesReport:
    """
    Pour chaque t : (t, G ∩ int(tU) = ∅ via le groupe, (C_t) sur le germe).
    Les deux réponses doivent coïncider ; le groupe d'une réduction au
    niveau t = mld est joint quand mld > 0.
    Un désaccord est journalisé sans lever : le rapport le porte et la CLI
    le traduit en code 4.
    """
    ctx = qfactorial_group(g)
    checks = []
    for t in ts:
        t = as_fraction(t)
        by_group = series_check(ctx.group, ctx.u, t)
        by_germ = check_Ct(g, t).holds
        if by_group != by_germ:
            logger.error("[SERIES] désaccord en t = %s : groupe %s, germe %s", t, by_group, by_germ)
        checks.append((t, by_group, by_germ))
    a, _ = mld_fiber(g)
    group = series_from_reduction(ctx, germ_reduce(g, a)) if a > 0 else None
    return SeriesReport(context=ctx, checks=tuple(checks), reduction_group=group)
