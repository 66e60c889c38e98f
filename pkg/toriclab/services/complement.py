"""
toriclab/services/complement.py
===============================
Compléments d'indice borné.

    local_complement   : base Y de dimension > 0 : n = ppcm des dénominateurs
                         des sommets de □′ (□′ tiré de la réduction t-lc)
    global_complement  : recherche du plus petit n (multiples de r·ppcm)
                         avec mld(X, B_n) ≥ t et 1/n ≤ 1 − t
    hyperplane_section : section H = div(χ^m̄) de multiplicité bornée

Le membre général D de |−nK − nB| n'est jamais construit : le certificat
garde les caractères et les multiplicités min⟨·, e_i⟩ qu'ils induisent.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Literal, Sequence

from toriclab.core.errors import (
    BaseIsPoint,
    ComplementMldMismatch,
    CtFails,
    InputError,
    InvalidCertificate,
    MldTooSmall,
    NotHyperstandard,
    TOutOfRange,
    ToricLabError,
)
from toriclab.core.limits import check_index_budget
from toriclab.services.exact_lattice import (
    Lattice,
    Vec,
    add,
    as_fraction,
    dot,
    is_zero,
    lcm_denominators,
    primitive_decompose,
    scale,
    solve_combination,
    sub,
    zero,
)
from toriclab.services.polyconv import Polyhedron, lattice_points
from toriclab.services.reduction import (
    ReductionCertificate,
    germ_reduce,
    qfactorial_group,
    series_check,
    verify_reduction,
)
from toriclab.services.toric_germ import (
    FibrationGerm,
    base_is_point,
    check_Ct,
    discrepancy_minimum,
    moment_data,
    moment_polytope,
    mld_total,
)

logger = logging.getLogger(__name__)

Scope = Literal["fiber", "total"]


# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class ComplementCertificate:
    n: int
    characters: tuple[Vec, ...]
    bplus_coeffs: tuple[Fraction, ...]
    verified_mld: Fraction
    scope: Scope
    t: Fraction
    r: int = 1
    # Φ*(□′) + |Δ|^∨ : prémisse du passage □′ → B⁺ (cas local)
    premise_mld: Fraction | None = None


@dataclass(frozen=True)
class HyperplaneCertificate:
    m_bar: Vec
    m_prime: Vec
    gamma_h: Fraction


# ============================================================
# COEFFICIENTS HYPERSTANDARD
# ============================================================

def hyperstandard_decomposition(a: int | str | Fraction, r: int = 1) -> tuple[Fraction, int]:
    """a = x/q avec x ∈ (1/r)ℤ ∩ [0, 1] et q ≥ 1 minimal."""
    a = as_fraction(a)
    if r < 1 or not 0 <= a <= 1:
        raise NotHyperstandard(a=str(a), r=r)
    if a == 0:
        return Fraction(0), 1
    g = gcd(a.denominator, r)
    if a.numerator > g:
        raise NotHyperstandard(a=str(a), r=r)
    q = a.denominator // g
    return a * q, q


def _check_hyperstandard(g: FibrationGerm, r: int) -> list[int]:
    return [hyperstandard_decomposition(ray.a, r)[1] for ray in g.rays]


def local_index_closed_form(a: int | str | Fraction, r: int = 1) -> int:
    """d = 1, 𝔸¹ : n = r·q."""
    _, q = hyperstandard_decomposition(a, r)
    return r * q


def global_index_closed_form(
    a0: int | str | Fraction, a_inf: int | str | Fraction, r: int, t: int | str | Fraction
) -> int:
    """d = 1, ℙ¹ : plus petit multiple de r·ppcm(q0, q∞) qui soit ≥ (1 − t)⁻¹."""
    t = as_fraction(t)
    if not 0 < t < 1:
        raise TOutOfRange(t=str(t))
    step = r * lcm(hyperstandard_decomposition(a0, r)[1], hyperstandard_decomposition(a_inf, r)[1])
    n = step
    while Fraction(1, n) > 1 - t:
        n += step
    return n


# ============================================================
# OUTILS
# ============================================================

def _bplus(g: FibrationGerm, characters: Sequence[Vec], n: int) -> tuple[Fraction, ...]:
    """Coefficient de B⁺ = B + D/n le long de E_i : 1 + (1/n)·min⟨m, e_i⟩."""
    return tuple(1 + Fraction(min(dot(m, r.e) for m in characters), n) for r in g.rays)


def _complement_box(g: FibrationGerm, characters: Sequence[Vec], n: int) -> Polyhedron:
    """conv(caractères / n) + |Δ|^∨."""
    recession = moment_polytope(g).rays
    return Polyhedron.from_vrep([scale(Fraction(1, n), m) for m in characters], recession, g.dim)


def hilbert_basis(lat: Lattice, cone: Polyhedron) -> list[Vec]:
    """
    Générateurs minimaux du monoïde lat ∩ cone (cône strictement convexe) :
    points du zonotope Σ[0,1]·r_j, puis élagage des éléments réductibles.
    """
    if cone.lines:
        raise InputError("cône non strictement convexe")
    rays = [primitive_decompose(r, lat)[0] for r in cone.rays]
    if not rays:
        return []
    corners = []
    for mask in itertools.product((0, 1), repeat=len(rays)):
        p = zero(cone.dim)
        for bit, r in zip(mask, rays):
            if bit:
                p = add(p, r)
        corners.append(p)
    zonotope = Polyhedron.from_vrep(corners, (), cone.dim)
    candidates = [x for x in lattice_points(lat, zonotope, "closure") if not is_zero(x)]
    basis = [
        x for x in candidates
        if not any(y != x and cone.contains(sub(x, y)) for y in candidates)
    ]
    logger.debug("[COMPLEMENT] base de Hilbert : %s éléments", len(basis))
    return sorted(basis)


def module_generators(g: FibrationGerm, n: int) -> list[Vec]:
    """
    A ⊆ M ∩ n□ avec M ∩ n□ = ∪_{a∈A} a + (M ∩ |Δ|^∨) : éléments minimaux,
    tous dans nC + zonotope(base de Hilbert).
    """
    box = moment_polytope(g)
    m = g.N.dual()
    recession = Polyhedron.cone(box.rays, g.dim)
    hilbert = hilbert_basis(m, recession)
    compact = [scale(n, v) for v in box.vertices]
    corners = []
    for mask in itertools.product((0, 1), repeat=len(hilbert)):
        shift = zero(g.dim)
        for bit, h in zip(mask, hilbert):
            if bit:
                shift = add(shift, h)
        corners.extend(add(v, shift) for v in compact)
    region = Polyhedron.from_vrep(corners, (), g.dim)
    n_box = box.scale(n)
    out = [
        a for a in lattice_points(m, region, "closure")
        if n_box.contains(a) and not any(n_box.contains(sub(a, h)) for h in hilbert)
    ]
    return sorted(out)


# ============================================================
# COMPLÉMENT LOCAL
# ============================================================

def local_complement(
    g: FibrationGerm,
    t: int | str | Fraction,
    r: int = 1,
    cert: ReductionCertificate | None = None,
) -> ComplementCertificate:
    t = as_fraction(t)
    if base_is_point(g):
        raise BaseIsPoint()
    _check_hyperstandard(g, r)
    ct = check_Ct(g, t)
    if not ct.holds:
        witness = [str(x) for x in ct.witness] if ct.witness else None
        raise CtFails(t=str(t), mld=str(ct.mld), witness=witness, reason=ct.reason)
    if cert is None:
        cert = germ_reduce(g, t)
    else:
        ok, clause = verify_reduction(cert, g.N, moment_data(g).u, t)
        if not ok:
            raise InvalidCertificate("réduction incompatible avec (g, t)", kind="reduction", clause=clause)
    phi = cert.phi

    # □′ = {m′ : Φ*(m′) ∈ □}
    box_prime = Polyhedron.from_hrep([(phi.apply(ray.e), -ray.a) for ray in g.rays], phi.target.dim)
    m_prime = phi.target.dual()
    n = lcm_denominators(c for v in box_prime.vertices for c in m_prime.coords(v))
    characters = tuple(sorted({phi.pullback(scale(n, v)) for v in box_prime.vertices}))

    recession = moment_polytope(g).rays
    premise_box = Polyhedron.from_vrep([phi.pullback(v) for v in box_prime.vertices], recession, g.dim)
    premise, _ = discrepancy_minimum(g, premise_box, "fiber")
    verified, _ = discrepancy_minimum(g, _complement_box(g, characters, n), "fiber")
    if premise < t or verified < t:
        raise ComplementMldMismatch(premise=str(premise), verified=str(verified), t=str(t))
    out = ComplementCertificate(
        n=n,
        characters=characters,
        bplus_coeffs=_bplus(g, characters, n),
        verified_mld=verified,
        scope="fiber",
        t=t,
        r=r,
        premise_mld=premise,
    )
    logger.info("[COMPLEMENT] complément local d'indice %s (mld vérifié %s)", n, verified)
    return out


# ============================================================
# COMPLÉMENT GLOBAL
# ============================================================

def global_condition(g: FibrationGerm, n: int) -> tuple[Fraction, list[Vec]]:
    """mld(X, B_n) en portée totale et ensemble générateur A de M ∩ n□."""
    gens = module_generators(g, n)
    value, _ = discrepancy_minimum(g, _complement_box(g, gens, n), "total")
    return value, gens


def global_complement(g: FibrationGerm, t: int | str | Fraction, r: int = 1) -> ComplementCertificate:
    t = as_fraction(t)
    if not 0 < t < 1:
        raise TOutOfRange(t=str(t))
    _check_hyperstandard(g, r)
    total, e = mld_total(g)
    if total < t:
        raise MldTooSmall(mld=str(total), t=str(t), minimizer=[str(x) for x in e])

    step = r * lcm_denominators(ray.a for ray in g.rays)
    n = step
    while True:
        check_index_budget(n)
        if Fraction(1, n) <= 1 - t:
            value, gens = global_condition(g, n)
            logger.debug("[COMPLEMENT] n = %s : mld %s", n, value)
            if value >= t:
                break
        n += step

    characters = tuple(gens)
    logger.info("[COMPLEMENT] complément global d'indice %s", n)
    return ComplementCertificate(
        n=n,
        characters=characters,
        bplus_coeffs=_bplus(g, characters, n),
        verified_mld=value,
        scope="total",
        t=t,
        r=r,
    )


# ============================================================
# VÉRIFICATION
# ============================================================

def verify_complement(
    cert: ComplementCertificate, g: FibrationGerm, t: int | str | Fraction
) -> tuple[bool, str | None]:
    """(ok, première clause en échec) ; tout est recalculé."""
    t = as_fraction(t)
    m = g.N.dual()
    n = cert.n

    def characters_in_n_box() -> bool:
        return all(
            m.contains(ch) and all(dot(ch, ray.e) + n * ray.a >= 0 for ray in g.rays)
            for ch in cert.characters
        )

    def bplus() -> bool:
        fresh = _bplus(g, cert.characters, n)
        return fresh == cert.bplus_coeffs and all(
            1 - ray.a <= b <= 1 for ray, b in zip(g.rays, fresh)
        )

    def mld() -> bool:
        value, _ = discrepancy_minimum(g, _complement_box(g, cert.characters, n), cert.scope)
        return value == cert.verified_mld and value >= t

    clauses = [
        ("t", lambda: cert.t == t),
        ("index", lambda: isinstance(n, int) and n >= 1 and bool(cert.characters)),
        ("characters", characters_in_n_box),
        ("bplus", bplus),
        ("mld", mld),
        ("index_bound", lambda: cert.scope == "fiber" or Fraction(1, n) <= 1 - t),
    ]
    for name, check in clauses:
        try:
            ok = check()
        except ToricLabError as err:
            logger.debug("[COMPLEMENT] clause %s : %s", name, err.code)
            ok = False
        if not ok:
            return False, name
    return True, None


# ============================================================
# SECTION HYPERPLANE
# ============================================================

def hyperplane_sections(
    g: FibrationGerm, t: int | str | Fraction, cert: ReductionCertificate
) -> list[HyperplaneCertificate]:
    """Une section par rayon de σ′^∨ (dans l'ordre lexicographique)."""
    t = as_fraction(t)
    if base_is_point(g):
        raise BaseIsPoint()
    ok, clause = verify_reduction(cert, g.N, moment_data(g).u, t)
    if not ok:
        raise InvalidCertificate(clause=clause)
    phi = cert.phi
    p = phi.target.dim
    images = [phi.apply(ray.e) for ray in g.rays]
    dual_cone = Polyhedron.from_hrep([(y, Fraction(0)) for y in images], p)
    m_lat = phi.target.dual()
    pi_cols = g.pi.linear()
    out = []
    for r in sorted(primitive_decompose(r, m_lat)[0] for r in dual_cone.rays):
        target = phi.pullback(r)
        m_bar = solve_combination(pi_cols, target)
        if m_bar is None or g.pi.pullback(m_bar) != target or not g.Nbar.dual().contains(m_bar):
            raise InvalidCertificate("Φ*(m′) ∉ π*(M̄)", m_prime=[str(x) for x in r])
        gamma = 1 / max(dot(r, v) for v in cert.u_prime.vertices)
        for ray in g.rays:
            if gamma * dot(target, ray.e) > ray.a:
                raise InvalidCertificate("condition lc violée", ray=[str(x) for x in ray.e])
        out.append(HyperplaneCertificate(m_bar=m_bar, m_prime=r, gamma_h=gamma))
    logger.debug("[COMPLEMENT] %s sections hyperplanes", len(out))
    return out


def hyperplane_section(
    g: FibrationGerm, t: int | str | Fraction, cert: ReductionCertificate
) -> HyperplaneCertificate:
    """m′ = plus petit rayon (lexicographique) de σ′^∨ ; γ = t / max⟨m′, tU′⟩."""
    sections = hyperplane_sections(g, t, cert)
    if not sections:
        raise InvalidCertificate("σ′^∨ sans rayon")
    return sections[0]


# ============================================================
# RE-VÉRIFICATION GÉNÉRIQUE
# ============================================================

def verify_certificate(
    g: FibrationGerm, kind: str, cert, t: int | str | Fraction | None = None
) -> tuple[bool, str | None]:
    """
    Re-vérifie un certificat relu (reduction, complement, hyperplane,
    series) contre le germe. t par défaut : celui porté par le certificat.
    """
    if kind == "reduction":
        t = cert.t if t is None else as_fraction(t)
        return verify_reduction(cert, g.N, moment_data(g).u, t)
    if kind == "complement":
        t = cert.t if t is None else as_fraction(t)
        return verify_complement(cert, g, t)
    if t is None:
        raise InputError("t requis pour ce type de certificat", kind=kind)
    t = as_fraction(t)
    if kind == "hyperplane":
        sections = hyperplane_sections(g, t, germ_reduce(g, t))
        return (cert in sections, None if cert in sections else "section")
    if kind == "series":
        ctx = qfactorial_group(g)
        if cert.d != g.dim or not all(cert.contains(b) for b in ctx.lattice.basis):
            return False, "contains_n"
        if not series_check(cert, ctx.u, t):
            return False, "interior"
        return True, None
    raise InputError("type de certificat inconnu", kind=kind)
