"""
toriclab/services/toric_germ.py
===============================
Germes de fibrations toriques (X/Y ∋ P, B).

    - validation structurelle (π surjective, |Δ| = π⁻¹(σ̄), coefficients) ;
    - polytope des moments □ et son polaire U ;
    - témoins de semi-amplitude ψ_σ ;
    - discrépances logarithmiques, mld au-dessus de la fibre / totale ;
    - propriété (C_t).

Un germe de singularité est le cas particulier f = id (σ̄ = σ, π = id),
construit par `affine_germ`.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Literal, Sequence

from toriclab.core.errors import (
    CoefficientRange,
    DegenerateQuotient,
    DimensionMismatch,
    InputError,
    InternalDualityMismatch,
    NonpositiveT,
    NotInLattice,
    NotPrimitive,
    NotRCartier,
    NotSemiample,
    NotSurjective,
    OutsideSupport,
    RaysDontSpan,
    RequiresSemiample,
    SupportMismatch,
    ZeroVector,
)
from toriclab.services.exact_lattice import (
    Lattice,
    LatticeMap,
    Vec,
    add,
    as_fraction,
    dot,
    is_zero,
    neg,
    primitive_decompose,
    quotient_by_span,
    rank,
    scale,
    solve_combination,
    sub,
    to_vec,
    zero,
)
from toriclab.services.polyconv import (
    NEG_INF,
    Polyhedron,
    gauge,
    lattice_points,
    polar,
    support_min,
)

logger = logging.getLogger(__name__)

Scope = Literal["fiber", "total"]
POS_INF = math.inf


# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class GermRay:
    """Rayon e_i avec son coefficient de discrépance a_i (B porte 1 − a_i)."""

    e: Vec
    a: Fraction


@dataclass(frozen=True)
class FibrationGerm:
    N: Lattice
    Nbar: Lattice
    pi: LatticeMap
    sigma_bar: Polyhedron
    fan: tuple[tuple[int, ...], ...]
    rays: tuple[GermRay, ...]

    @property
    def dim(self) -> int:
        return self.N.dim

    @property
    def vectors(self) -> list[Vec]:
        return [r.e for r in self.rays]

    @property
    def coefficients(self) -> list[Fraction]:
        return [r.a for r in self.rays]

    @cached_property
    def cones(self) -> tuple[Polyhedron, ...]:
        return tuple(Polyhedron.cone([self.rays[i].e for i in c], self.dim) for c in self.fan)

    @cached_property
    def support(self) -> Polyhedron:
        """π⁻¹(σ̄)."""
        ineqs = [(self.pi.pullback(a), Fraction(0)) for a, _ in self.sigma_bar.inequalities]
        return Polyhedron.from_hrep(ineqs, self.dim)

    @property
    def is_affine(self) -> bool:
        """f = id."""
        return len(self.fan) == 1 and self.Nbar.same_as(self.N) and self.pi.matrix == LatticeMap.identity(self.N).matrix


@dataclass(frozen=True)
class MomentData:
    box: Polyhedron
    u: Polyhedron
    sigma0: Polyhedron


@dataclass(frozen=True)
class SemiampleWitness:
    """ψ_σ par cône maximal, dans l'ordre de `fan`."""

    psi: tuple[Vec, ...]


@dataclass(frozen=True)
class DiscrepancyQuery:
    e: Vec
    value: Fraction | float
    over_fiber: bool


@dataclass(frozen=True)
class CtResult:
    t: Fraction
    holds: bool
    mld: Fraction
    witness: Vec | None = None
    reason: str | None = None


# ============================================================
# CONSTRUCTION / VALIDATION
# ============================================================

def affine_germ(lattice: Lattice, rays: Sequence[Sequence], coefficients: Sequence) -> FibrationGerm:
    """Germe de singularité (X/X ∋ P, B) : un seul cône, f = id."""
    vectors = [to_vec(r) for r in rays]
    germ = FibrationGerm(
        N=lattice,
        Nbar=lattice,
        pi=LatticeMap.identity(lattice),
        sigma_bar=Polyhedron.cone(vectors, lattice.dim),
        fan=(tuple(range(len(vectors))),),
        rays=tuple(GermRay(v, as_fraction(a)) for v, a in zip(vectors, coefficients)),
    )
    return validate_germ(germ)


def _check_rays(g: FibrationGerm) -> None:
    d = g.dim
    for i, r in enumerate(g.rays):
        if len(r.e) != d:
            raise DimensionMismatch("rayon de mauvaise dimension", index=i)
        if not 0 <= r.a <= 1:
            raise CoefficientRange(index=i, a=str(r.a))
        if is_zero(r.e):
            raise ZeroVector(index=i)
        if not g.N.contains(r.e):
            raise NotInLattice(index=i, vector=[str(x) for x in r.e])
        if primitive_decompose(r.e, g.N)[1] != 1:
            raise NotPrimitive(index=i, vector=[str(x) for x in r.e])
    if len({r.e for r in g.rays}) != len(g.rays):
        raise InputError("rayon répété")
    if rank(g.vectors, d) != d:
        raise RaysDontSpan(rank=rank(g.vectors, d) if g.rays else 0, dim=d)


def _check_fan(g: FibrationGerm) -> None:
    n = len(g.rays)
    used = set()
    for k, cone in enumerate(g.fan):
        if not cone or any(not 0 <= i < n for i in cone):
            raise InputError("indice de rayon invalide dans le cône", cone=k)
        used.update(cone)
    if used != set(range(n)):
        raise InputError("rayon absent de l'éventail", missing=sorted(set(range(n)) - used))

    for k, cone in enumerate(g.cones):
        if cone.lines:
            raise InputError("cône non strictement convexe", cone=k)
        if not cone.is_full_dimensional:
            raise SupportMismatch("cône maximal de dimension insuffisante", cone=k)


def _check_support(g: FibrationGerm) -> None:
    for i, r in enumerate(g.rays):
        if not g.sigma_bar.contains(g.pi.apply(r.e)):
            raise SupportMismatch("π(e_i) ∉ σ̄", index=i)
    if Polyhedron.cone(g.vectors, g.dim) != g.support:
        raise SupportMismatch()

    # facettes intérieures appariées
    for k, (idx, cone) in enumerate(zip(g.fan, g.cones)):
        for a, _ in cone.inequalities:
            face = frozenset(i for i in idx if dot(a, g.rays[i].e) == 0)
            center = zero(g.dim)
            for i in face:
                center = add(center, g.rays[i].e)
            if not g.support.contains_interior(center):
                continue
            matched = any(
                (neg(a), Fraction(0)) in other.inequalities
                and frozenset(i for i in jdx if dot(a, g.rays[i].e) == 0) == face
                for j, (jdx, other) in enumerate(zip(g.fan, g.cones))
                if j != k
            )
            if not matched:
                raise SupportMismatch("facette intérieure sans voisin", cone=k)

    # intérieurs disjoints
    for (i, p), (j, q) in itertools.combinations(enumerate(g.cones), 2):
        meet = Polyhedron.from_hrep(list(p.inequalities) + list(q.inequalities), g.dim)
        if meet.is_full_dimensional:
            raise SupportMismatch("cônes maximaux qui se chevauchent", cones=[i, j])


def _normalize(g: FibrationGerm) -> FibrationGerm:
    order = sorted(range(len(g.rays)), key=lambda i: g.rays[i].e)
    position = {old: new for new, old in enumerate(order)}
    fan = tuple(sorted(tuple(sorted(position[i] for i in c)) for c in g.fan))
    return replace(g, rays=tuple(g.rays[i] for i in order), fan=fan)


def validate_germ(g: FibrationGerm) -> FibrationGerm:
    """Vérifie les invariants structurels ; rend le germe avec rayons triés."""
    if g.pi.source.dim != g.N.dim or g.pi.target.dim != g.Nbar.dim:
        raise DimensionMismatch("π : dimensions incompatibles avec N, N̄")
    if not g.pi.is_surjective():
        raise NotSurjective()
    if g.sigma_bar.dim != g.Nbar.dim:
        raise DimensionMismatch("σ̄ n'est pas dans N̄_ℝ")
    if g.sigma_bar.vertices != (zero(g.Nbar.dim),) or g.sigma_bar.lines:
        raise InputError("σ̄ doit être un cône strictement convexe")
    _check_rays(g)
    _check_fan(g)
    _check_support(g)
    out = _normalize(g)
    logger.debug("[GERM] germe validé : d=%s, %s rayons, %s cônes", out.dim, len(out.rays), len(out.fan))
    return out


def base_is_point(g: FibrationGerm) -> bool:
    return g.Nbar.dim == 0


def in_support(g: FibrationGerm, e: Sequence[Fraction]) -> bool:
    return g.support.contains(e)


def in_fiber_interior(g: FibrationGerm, e: Sequence[Fraction]) -> bool:
    """e ∈ int|Δ|, i.e. π(e) ∈ int σ̄."""
    return g.sigma_bar.contains_interior(g.pi.apply(e))


# ============================================================
# □, U, SEMI-AMPLITUDE
# ============================================================

def moment_polytope(g: FibrationGerm) -> Polyhedron:
    """□ = {m : ⟨m, e_i⟩ + a_i ≥ 0}."""
    return Polyhedron.from_hrep([(r.e, -r.a) for r in g.rays], g.dim)


def moment_data(g: FibrationGerm) -> MomentData:
    box = moment_polytope(g)
    u = polar(box)
    hull = Polyhedron.from_vrep(
        [zero(g.dim)] + [scale(1 / r.a, r.e) for r in g.rays if r.a > 0],
        [r.e for r in g.rays if r.a == 0],
        g.dim,
    )
    if hull != u:
        logger.error("[MOMENT] polar(□) != hull : %s vs %s", u.vertices, hull.vertices)
        raise InternalDualityMismatch()
    sigma0 = Polyhedron.cone([r.e for r in g.rays if r.a == 0], g.dim)
    return MomentData(box=box, u=u, sigma0=sigma0)


def _solve_psi(vectors: Sequence[Vec], values: Sequence[Fraction], d: int) -> Vec | None:
    """ψ avec ⟨ψ, v_i⟩ = values_i."""
    columns = [tuple(v[j] for v in vectors) for j in range(d)]
    psi = solve_combination(columns, tuple(values))
    if psi is None:
        return None
    if any(dot(psi, v) != b for v, b in zip(vectors, values)):
        return None
    return psi


def check_semiample(g: FibrationGerm) -> SemiampleWitness:
    box = moment_polytope(g)
    witnesses = []
    for k, idx in enumerate(g.fan):
        psi = _solve_psi([g.rays[i].e for i in idx], [g.rays[i].a for i in idx], g.dim)
        if psi is None:
            raise NotRCartier(cone=k, rays=list(idx))
        for a, b in box.inequalities:
            if dot(a, neg(psi)) < b:
                raise NotSemiample(
                    cone=k,
                    psi=[str(x) for x in psi],
                    inequality={"normal": [str(x) for x in a], "offset": str(b)},
                )
        witnesses.append(psi)
    return SemiampleWitness(tuple(witnesses))


def _require_semiample(g: FibrationGerm) -> SemiampleWitness:
    try:
        return check_semiample(g)
    except (NotRCartier, NotSemiample) as err:
        raise RequiresSemiample(reason=err.code, **err.details) from err


def log_discrepancy(g: FibrationGerm, e: Sequence[Fraction]) -> DiscrepancyQuery:
    """a_{E_e}(X, B) = −h_□(e)."""
    e = to_vec(e)
    if is_zero(e):
        raise ZeroVector()
    if not g.N.contains(e):
        raise NotInLattice(vector=[str(x) for x in e])
    if primitive_decompose(e, g.N)[1] != 1:
        raise NotPrimitive(vector=[str(x) for x in e])
    if not in_support(g, e):
        raise OutsideSupport(vector=[str(x) for x in e])
    witness = _require_semiample(g)

    h = support_min(moment_polytope(g), e)
    value: Fraction | float = POS_INF if h == NEG_INF else -h
    for psi, cone in zip(witness.psi, g.cones):
        if cone.contains(e) and dot(psi, e) != value:
            raise InternalDualityMismatch("−h_□(e) ≠ ⟨ψ_σ, e⟩", vector=[str(x) for x in e])
    return DiscrepancyQuery(e=e, value=value, over_fiber=in_fiber_interior(g, e))


# ============================================================
# RÉDUCTION PAR σ0
# ============================================================

@dataclass(frozen=True)
class Sigma0Reduction:
    n0: Lattice
    u0: Polyhedron
    quot: LatticeMap


def sigma0_reduce(g: FibrationGerm, u: Polyhedron | None = None) -> Sigma0Reduction:
    """Quotient de N par N ∩ (σ0 − σ0) ; l'image U0 de U est compacte."""
    if u is None:
        u = moment_data(g).u
    kernel = [r.e for r in g.rays if r.a == 0]
    if not kernel:
        return Sigma0Reduction(n0=g.N, u0=u, quot=LatticeMap.identity(g.N))
    if rank(kernel, g.dim) == g.dim:
        raise DegenerateQuotient()
    n0, quot = quotient_by_span(g.N, kernel)
    u0 = u.image(quot.apply, n0.dim)
    return Sigma0Reduction(n0=n0, u0=u0, quot=quot)


# ============================================================
# MINIMISATION DES DISCRÉPANCES
# ============================================================

def _value(box: Polyhedron, e: Sequence[Fraction]) -> Fraction:
    return -support_min(box, e)


def _convex_preimage(points: Sequence[Vec], images: Sequence[Vec], target: Vec) -> Vec:
    """x = Σ μ_j points_j avec μ ≥ 0, Σ μ = 1 et Σ μ_j images_j = target."""
    p = len(target)
    lifted = [tuple(y) + (Fraction(1),) for y in images]
    goal = tuple(target) + (Fraction(1),)
    for size in range(1, p + 2):
        for subset in itertools.combinations(range(len(points)), size):
            rows = [lifted[j] for j in subset]
            if rank(rows, p + 1) < size:
                continue
            mu = solve_combination(rows, goal)
            if mu is None or min(mu) < 0:
                continue
            out = zero(len(points[0]))
            for m, j in zip(mu, subset):
                out = add(out, scale(m, points[j]))
            return out
    raise InternalDualityMismatch("point de U0 sans antécédent convexe", point=[str(x) for x in target])


def _lift_minimizer(
    g: FibrationGerm,
    u: Polyhedron,
    red: Sigma0Reduction,
    y0: Vec,
    t: Fraction,
    recession: Sequence[Vec],
) -> Vec:
    """e′ ∈ N ∩ int|Δ| avec Φ0(e′) = y0 et −h(e′) = t."""
    e0 = red.quot.lift(y0)
    if not recession:
        return e0
    pts = [scale(t, v) for v in u.vertices]
    x = _convex_preimage(pts, [red.quot.apply(v) for v in pts], y0)
    c = solve_combination(list(recession), sub(e0, x))
    if c is None:
        raise InternalDualityMismatch("relèvement hors de span(σ0)")
    out = e0
    for ci, r in zip(c, recession):
        shift = math.ceil(-ci) if ci < 0 else 0
        out = add(out, scale(shift + 1, r))
    return out


def discrepancy_minimum(g: FibrationGerm, box: Polyhedron, scope: Scope = "fiber") -> tuple[Fraction, Vec]:
    """
    min de −h_box(e) sur les e primitifs de N ∩ int|Δ| (fiber) ou de
    N ∩ |Δ| ∖ {0} (total), avec un minimiseur.

    Exige 0 ∈ box et box ⊇ |Δ|^∨. Le cas non compact passe par le quotient
    par span(σ0) (σ0 = cône de récession de U = polar(box)) puis relève le
    minimiseur ; les valeurs coïncident de part et d'autre du quotient.
    """
    u = polar(box)
    recession = [primitive_decompose(r, g.N)[0] for r in u.rays]

    if scope == "total":
        if recession:
            return Fraction(0), recession[0]
        bound = min(_value(box, r.e) for r in g.rays)
        best: tuple[Fraction, Vec] | None = None
        for e in lattice_points(g.N, u.scale(bound), "closure"):
            if is_zero(e) or not in_support(g, e):
                continue
            cand = (_value(box, e), e)
            if best is None or cand < best:
                best = cand
        assert best is not None
        value, e = best
        e = primitive_decompose(e, g.N)[0]
        logger.debug("[MLD] total : %s en %s", value, e)
        return value, e

    if recession:
        s0 = zero(g.dim)
        for r in recession:
            s0 = add(s0, r)
        if in_fiber_interior(g, s0):
            return Fraction(0), primitive_decompose(s0, g.N)[0]

    if recession:
        n0, quot = quotient_by_span(g.N, recession)
    else:
        n0, quot = g.N, LatticeMap.identity(g.N)
    red = Sigma0Reduction(n0=n0, u0=u.image(quot.apply, n0.dim), quot=quot)
    cone0 = Polyhedron.cone([quot.apply(r.e) for r in g.rays], n0.dim)

    # point intérieur explicite : somme des rayons d'un cône maximal
    center = zero(g.dim)
    for i in g.fan[0]:
        center = add(center, g.rays[i].e)
    start = primitive_decompose(center, g.N)[0]
    if is_zero(quot.apply(start)):
        start = next(
            add(center, g.rays[i].e) for i in g.fan[0] if not is_zero(quot.apply(g.rays[i].e))
        )
    bound = _value(box, start)

    candidates = []
    for y in lattice_points(n0, red.u0.scale(bound), "closure"):
        if is_zero(y) or not cone0.contains_interior(y):
            continue
        candidates.append((gauge(red.u0, y), y))
    logger.debug("[MLD] fibre : borne %s, %s candidats (rang %s)", bound, len(candidates), n0.dim)
    value, y0 = min(candidates)
    e = _lift_minimizer(g, u, red, y0, value, recession)
    e = primitive_decompose(e, g.N)[0]
    if _value(box, e) != value or not in_fiber_interior(g, e):
        raise InternalDualityMismatch("relèvement du minimiseur incohérent", vector=[str(x) for x in e])
    return value, e


def mld_fiber(g: FibrationGerm) -> tuple[Fraction, Vec]:
    """mld_{f⁻¹P}(X, B) = max{t ≥ 0 ; N ∩ int(tU) ⊂ {0}}."""
    _require_semiample(g)
    value, e = discrepancy_minimum(g, moment_polytope(g), "fiber")
    logger.info("[MLD] mld fibre = %s (minimiseur %s)", value, [str(x) for x in e])
    return value, e


def mld_total(g: FibrationGerm) -> tuple[Fraction, Vec]:
    _require_semiample(g)
    return discrepancy_minimum(g, moment_polytope(g), "total")


# ============================================================
# PROPRIÉTÉ (C_t)
# ============================================================

SPECIAL_CASE_C1 = "SPECIAL_CASE_C1"


def check_Ct(g: FibrationGerm, t: int | str | Fraction) -> CtResult:
    """(C_t) ⟺ N ∩ int(tU) ⊂ {0} ; sinon un point témoin de N ∩ int(tU)."""
    t = as_fraction(t)
    if t <= 0:
        raise NonpositiveT(t=str(t))
    value, e = mld_fiber(g)
    if t == 1 and base_is_point(g) and all(r.a == 1 for r in g.rays):
        total, _ = mld_total(g)
        if total >= 1:
            # Fano canonique au-dessus d'un point : exclu par convention
            return CtResult(t=t, holds=False, mld=value, reason=SPECIAL_CASE_C1)
    if value >= t:
        return CtResult(t=t, holds=True, mld=value)
    return CtResult(t=t, holds=False, mld=value, witness=e)
