"""
toriclab/services/polyconv.py
=============================
Géométrie polyédrale exacte.

    - double description (V ↔ H) par l'algorithme de Motzkin, en rationnels ;
    - polaire, minimum de support, différence □ − □ ;
    - points du réseau (fermeture / intérieur) par balayage de boîte ;
    - coefficient d'asymétrie γ(P ∈ □), constante de Pikhurko γ(Λ, □) ;
    - minima successifs, certificat de bornitude (complétion de Mahler).

Toutes les représentations sont canoniques : deux polyèdres égaux comme
ensembles ont des champs égaux (comparaison par `==`).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Literal, Sequence

from toriclab.core.errors import (
    AsymmetricInput,
    BoxSideExceedsBound,
    DegenerateDimension,
    DimensionMismatch,
    EmptySet,
    InputError,
    NoInteriorInteger,
    NoInteriorLatticePoint,
    OriginNotContained,
    PointOutside,
    UnboundedInput,
)
from toriclab.core.limits import check_cell_budget
from toriclab.services.exact_lattice import (
    Lattice,
    Vec,
    as_fraction,
    dot,
    integer_left_kernel,
    is_zero,
    lcm_denominators,
    mat_vec,
    neg,
    nullspace,
    positive_first,
    primitive_integer,
    project_orthogonal,
    projection_coefficients,
    rank,
    rref,
    scale,
    solve_combination,
    sub,
    unit,
    zero,
)

logger = logging.getLogger(__name__)

Inequality = tuple[Vec, Fraction]  # ⟨normal, x⟩ ≥ offset
Region = Literal["closure", "interior"]
NEG_INF = -math.inf


# ============================================================
# DOUBLE DESCRIPTION
# ============================================================

def _cone_generators(constraints: Sequence[Vec], dim: int) -> tuple[list[Vec], list[Vec]]:
    """
    Générateurs du cône {y : ⟨a, y⟩ ≥ 0 pour tout a} :
    (base de la linéalité, rayons extrêmes modulo linéalité).
    """
    lineality = [unit(dim, i) for i in range(dim)]
    rays: list[Vec] = []
    zeros: list[frozenset[int]] = []

    for k, a in enumerate(constraints):
        idx = next((i for i, l in enumerate(lineality) if dot(a, l) != 0), None)
        if idx is not None:
            pivot = lineality[idx]
            if dot(a, pivot) < 0:
                pivot = neg(pivot)
            ap = dot(a, pivot)
            lineality = [
                sub(l, scale(dot(a, l) / ap, pivot))
                for i, l in enumerate(lineality)
                if i != idx
            ]
            rays = [primitive_integer(sub(r, scale(dot(a, r) / ap, pivot))) for r in rays]
            zeros = [z | {k} for z in zeros]
            rays.append(primitive_integer(pivot))
            zeros.append(frozenset(range(k)))
            continue

        values = [dot(a, r) for r in rays]
        new_rays: list[Vec] = []
        new_zeros: list[frozenset[int]] = []
        for r, z, v in zip(rays, zeros, values):
            if v > 0:
                new_rays.append(r)
                new_zeros.append(z)
            elif v == 0:
                new_rays.append(r)
                new_zeros.append(z | {k})
        positives = [i for i, v in enumerate(values) if v > 0]
        negatives = [i for i, v in enumerate(values) if v < 0]
        for p in positives:
            for n in negatives:
                common = zeros[p] & zeros[n]
                adjacent = not any(
                    common <= zeros[r] for r in range(len(rays)) if r != p and r != n
                )
                if not adjacent:
                    continue
                combo = tuple(values[p] * x - values[n] * y for x, y in zip(rays[n], rays[p]))
                new_rays.append(primitive_integer(combo))
                new_zeros.append(common | {k})
        rays, zeros = new_rays, new_zeros

    return lineality, rays


def _canonical_basis(vectors: Sequence[Vec], dim: int) -> list[Vec]:
    return [primitive_integer(r) for r in rref(list(vectors), dim)]


def _normalize_inequality(a: Vec, b: Fraction) -> Inequality:
    den = lcm_denominators(a)
    ints = [int(x * den) for x in a]
    g = math.gcd(*ints)
    k = Fraction(den, g)
    return tuple(x * k for x in a), b * k


def _canonical_hrep(ineqs: Iterable[Inequality], eqs: Iterable[Inequality], dim: int) -> tuple[Inequality, ...]:
    """Inégalités réduites modulo les équations, normales primitives entières."""
    rows = rref([a + (b,) for a, b in eqs], dim + 1)
    equations = [_normalize_inequality(r[:dim], r[dim]) for r in rows]
    eq_normals = [a for a, _ in equations]
    out: set[Inequality] = set()
    for a, b in ineqs:
        lam = projection_coefficients(a, eq_normals)
        for l, (ea, eb) in zip(lam, equations):
            if l:
                a = sub(a, scale(l, ea))
                b = b - l * eb
        if is_zero(a):
            continue
        out.add(_normalize_inequality(a, b))
    for a, b in equations:
        out.add((a, b))
        out.add((neg(a), -b))
    return tuple(sorted(out))


def vrep_to_hrep(vertices: Sequence[Vec], rays: Sequence[Vec], dim: int) -> tuple[Inequality, ...]:
    """Facettes (⟨a, x⟩ ≥ b) et équations (paires d'inégalités) de conv(V) + cone(R)."""
    if not vertices:
        raise EmptySet("V-représentation sans sommet")
    cons = [tuple(v) + (Fraction(1),) for v in vertices] + [tuple(r) + (Fraction(0),) for r in rays]
    lineality, extreme = _cone_generators(cons, dim + 1)
    eqs = [(g[:dim], -g[dim]) for g in lineality]
    ineqs = [(g[:dim], -g[dim]) for g in extreme]
    return _canonical_hrep(ineqs, eqs, dim)


def hrep_to_vrep(ineqs: Sequence[Inequality], dim: int) -> tuple[tuple[Vec, ...], tuple[Vec, ...]]:
    """Sommets (projetés sur l'orthogonal de la linéalité) et rayons (±linéalité incluse)."""
    cons = [tuple(a) + (-b,) for a, b in ineqs] + [unit(dim + 1, dim)]
    lineality, extreme = _cone_generators(cons, dim + 1)
    lines = _canonical_basis([l[:dim] for l in lineality], dim)
    vertices: set[Vec] = set()
    rays: set[Vec] = set()
    for g in extreme:
        s = g[dim]
        if s > 0:
            vertices.add(project_orthogonal(tuple(x / s for x in g[:dim]), lines))
        else:
            rays.add(primitive_integer(project_orthogonal(g[:dim], lines)))
    if not vertices:
        raise EmptySet()
    for l in lines:
        rays.add(l)
        rays.add(neg(l))
    rays.discard(zero(dim))
    return tuple(sorted(vertices)), tuple(sorted(rays))


# ============================================================
# POLYÈDRE
# ============================================================

@dataclass(frozen=True)
class Polyhedron:
    """Ensemble polyédral rationnel, représentations V et H canoniques."""

    dim: int
    vertices: tuple[Vec, ...]
    rays: tuple[Vec, ...]
    inequalities: tuple[Inequality, ...]

    def __post_init__(self) -> None:
        for a, b in self.inequalities:
            if any(dot(a, v) < b for v in self.vertices) or any(dot(a, r) < 0 for r in self.rays):
                raise InputError("V- et H-représentations incohérentes")

    # -------------------
    # Constructeurs
    # -------------------
    @classmethod
    def from_vrep(cls, vertices: Iterable[Sequence], rays: Iterable[Sequence] = (), dim: int | None = None) -> Polyhedron:
        verts = [tuple(as_fraction(x) for x in v) for v in vertices]
        rs = [tuple(as_fraction(x) for x in r) for r in rays]
        d = dim if dim is not None else len(verts[0]) if verts else None
        if d is None:
            raise EmptySet("V-représentation sans sommet")
        if any(len(v) != d for v in verts + rs):
            raise DimensionMismatch("vecteurs de dimensions différentes", dim=d)
        hrep = vrep_to_hrep(verts, rs, d)
        v2, r2 = hrep_to_vrep(hrep, d)
        return cls(d, v2, r2, hrep)

    @classmethod
    def from_hrep(cls, inequalities: Iterable[tuple[Sequence, int | str | Fraction]], dim: int) -> Polyhedron:
        ineqs = [(tuple(as_fraction(x) for x in a), as_fraction(b)) for a, b in inequalities]
        if any(len(a) != dim for a, _ in ineqs):
            raise DimensionMismatch("normale de mauvaise dimension", dim=dim)
        verts, rays = hrep_to_vrep(ineqs, dim)
        return cls(dim, verts, rays, vrep_to_hrep(verts, rays, dim))

    @classmethod
    def cone(cls, rays: Iterable[Sequence], dim: int) -> Polyhedron:
        return cls.from_vrep([zero(dim)], rays, dim)

    @classmethod
    def interval(cls, lo: int | str | Fraction, hi: int | str | Fraction) -> Polyhedron:
        return cls.from_vrep([(as_fraction(lo),), (as_fraction(hi),)])

    # -------------------
    # Propriétés
    # -------------------
    @property
    def is_compact(self) -> bool:
        return not self.rays

    @cached_property
    def equations(self) -> tuple[Inequality, ...]:
        ineqs = set(self.inequalities)
        return tuple((a, b) for a, b in self.inequalities if (neg(a), -b) in ineqs and positive_first(a))

    @cached_property
    def lines(self) -> tuple[Vec, ...]:
        rs = set(self.rays)
        return tuple(r for r in self.rays if neg(r) in rs and positive_first(r))

    @cached_property
    def dimension(self) -> int:
        """Dimension affine."""
        v0 = self.vertices[0]
        return rank([sub(v, v0) for v in self.vertices[1:]] + list(self.rays), self.dim)

    @property
    def is_full_dimensional(self) -> bool:
        return not self.equations

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(dot(a, x) >= b for a, b in self.inequalities)

    def contains_interior(self, x: Sequence[Fraction]) -> bool:
        """Intérieur topologique de l'ambiant (vide si pas de pleine dimension)."""
        return self.is_full_dimensional and all(dot(a, x) > b for a, b in self.inequalities)

    # -------------------
    # Transformations
    # -------------------
    def scale(self, c: int | Fraction) -> Polyhedron:
        c = as_fraction(c)
        if c <= 0:
            raise InputError("facteur d'échelle strictement positif attendu", factor=str(c))
        return Polyhedron(
            self.dim,
            tuple(sorted(scale(c, v) for v in self.vertices)),
            self.rays,
            tuple(sorted((a, b * c) for a, b in self.inequalities)),
        )

    def reflect(self) -> Polyhedron:
        """−p."""
        return Polyhedron(
            self.dim,
            tuple(sorted(neg(v) for v in self.vertices)),
            tuple(sorted(neg(r) for r in self.rays)),
            tuple(sorted((neg(a), b) for a, b in self.inequalities)),
        )

    def image(self, fn: Callable[[Vec], Vec], target_dim: int) -> Polyhedron:
        """Image par une application linéaire."""
        return Polyhedron.from_vrep(
            [fn(v) for v in self.vertices], [fn(r) for r in self.rays], target_dim
        )

    def support_values(self, phi: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
        """(min, max) de φ sur un polyèdre compact."""
        values = [dot(phi, v) for v in self.vertices]
        return min(values), max(values)


# ============================================================
# OPÉRATIONS
# ============================================================

def polar(p: Polyhedron) -> Polyhedron:
    """p* = {φ : ⟨φ, x⟩ ≥ −1 ∀x ∈ p}."""
    if not p.contains(zero(p.dim)):
        raise OriginNotContained()
    ineqs = [(v, Fraction(-1)) for v in p.vertices] + [(r, Fraction(0)) for r in p.rays]
    return Polyhedron.from_hrep(ineqs, p.dim)


def support_min(p: Polyhedron, phi: Sequence[Fraction]) -> Fraction | float:
    """h_p(φ) = inf⟨φ, p⟩ ; −inf si φ est négatif sur un rayon."""
    if any(dot(phi, r) < 0 for r in p.rays):
        return NEG_INF
    return min(dot(phi, v) for v in p.vertices)


def minkowski_diff_self(p: Polyhedron) -> Polyhedron:
    """p − p."""
    diffs = [sub(v, w) for v in p.vertices for w in p.vertices]
    rays = list(p.rays) + [neg(r) for r in p.rays]
    return Polyhedron.from_vrep(diffs, rays, p.dim)


def lattice_points(lat: Lattice, p: Polyhedron, region: Region = "closure") -> list[Vec]:
    """Points de lat dans p (fermeture) ou dans son intérieur topologique."""
    if not p.is_compact:
        raise UnboundedInput()
    if lat.dim != p.dim:
        raise DimensionMismatch("réseau et polyèdre de dimensions différentes")
    if region == "interior" and not p.is_full_dimensional:
        return []
    if p.dim == 0:
        return [()]  # le seul point de ℝ^0

    coords = [lat.coords(v) for v in p.vertices]
    ranges = []
    for j in range(p.dim):
        lo = math.ceil(min(c[j] for c in coords))
        hi = math.floor(max(c[j] for c in coords))
        if hi < lo:
            return []
        ranges.append(range(lo, hi + 1))
    check_cell_budget(math.prod(len(r) for r in ranges))

    # inégalités en coordonnées du réseau : ⟨a, c·B⟩ = ⟨B·a, c⟩
    local = [(mat_vec(lat.basis, a), b) for a, b in p.inequalities]
    strict = region == "interior"
    hits = []
    for c in itertools.product(*ranges):
        ok = True
        for a, b in local:
            val = sum((x * y for x, y in zip(a, c) if y), Fraction(0))
            if val < b or (strict and val == b):
                ok = False
                break
        if ok:
            hits.append(lat.point(c))
    logger.debug("[LATTICE_POINTS] %s cellules, %s points (%s)", math.prod(len(r) for r in ranges), len(hits), region)
    return sorted(hits)


# ============================================================
# ASYMÉTRIE / PIKHURKO
# ============================================================

@dataclass(frozen=True)
class AsymmetryReport:
    point: Vec
    gamma: Fraction
    witness_vertex: Vec
    witness_boundary: Vec


def _require_body(p: Polyhedron) -> None:
    if not p.is_compact:
        raise UnboundedInput()
    if not p.is_full_dimensional or p.dim == 0:
        raise DegenerateDimension()


def asymmetry(point: Sequence[Fraction], p: Polyhedron) -> AsymmetryReport:
    """
    γ(P ∈ □) = ε/(1+ε), ε maximal avec P − ε(□ − P) ⊆ □.
    Le témoin v0 est le sommet qui réalise ε ; v′0 = (1+ε)P − εv0 ∈ ∂□.
    """
    _require_body(p)
    point = tuple(as_fraction(x) for x in point)
    if not p.contains(point):
        raise PointOutside(point=[str(x) for x in point])
    best: tuple[Fraction, Vec] | None = None
    for a, b in p.inequalities:
        slack = dot(a, point) - b
        base = dot(a, point)
        for v in p.vertices:
            gain = dot(a, v) - base
            if gain > 0:
                eps = slack / gain
                if best is None or eps < best[0]:
                    best = (eps, v)
    assert best is not None
    eps, v0 = best
    gamma = eps / (1 + eps)
    boundary = tuple((1 + eps) * x - eps * y for x, y in zip(point, v0))
    return AsymmetryReport(point, gamma, v0, boundary)


def simplex_gamma(point: Sequence[Fraction], simplex: Polyhedron) -> Fraction:
    """Pour un simplexe, γ(P ∈ □) est la plus petite coordonnée barycentrique."""
    _require_body(simplex)
    d = simplex.dim
    if len(simplex.vertices) != d + 1:
        raise InputError("simplexe attendu", vertices=len(simplex.vertices))
    rows = [tuple(v) + (Fraction(1),) for v in simplex.vertices]
    bary = solve_combination(rows, tuple(as_fraction(x) for x in point) + (Fraction(1),))
    if bary is None or min(bary) < 0:
        raise PointOutside()
    return min(bary)


def pikhurko_constant(lat: Lattice, p: Polyhedron) -> tuple[Fraction, Vec]:
    """γ(Λ, □) = max des γ(P ∈ □) sur les points intérieurs ; plus petit maximiseur lexicographique."""
    _require_body(p)
    points = lattice_points(lat, p, "interior")
    if not points:
        raise NoInteriorLatticePoint()
    best_gamma, best_point = Fraction(-1), points[0]
    for q in points:
        g = asymmetry(q, p).gamma
        if g > best_gamma:
            best_gamma, best_point = g, q
    return best_gamma, best_point


def interval_gamma_closed_form(lo: int | str | Fraction, hi: int | str | Fraction) -> Fraction:
    """
    Formule fermée sur ℤ : avec z le premier entier intérieur, α = z − lo,
    β = hi − (dernier entier intérieur) :
        nombre impair 2k+1 : (k + min(α, β)) / (2k + α + β)
        nombre pair 2k+2   : (k + max(α, β)) / (2k + 1 + α + β)
    """
    lo, hi = as_fraction(lo), as_fraction(hi)
    first = math.floor(lo) + 1
    last = math.ceil(hi) - 1
    if first > last:
        raise NoInteriorInteger(interval=[str(lo), str(hi)])
    alpha, beta = first - lo, hi - last
    count = last - first + 1
    if count % 2:
        k = (count - 1) // 2
        return (k + min(alpha, beta)) / (2 * k + alpha + beta)
    k = (count - 2) // 2
    return (k + max(alpha, beta)) / (2 * k + 1 + alpha + beta)


def projection_gamma_bounds(
    p: Polyhedron, point: Sequence[Fraction], proj: Sequence[Vec]
) -> tuple[Fraction, Fraction, Fraction]:
    """
    (γ0, γ′, γ) pour une projection linéaire `proj` (lignes) :
    γ0 dans la tranche p ∩ (P + Ker), γ′ = γ(π(P) ∈ π(p)), γ = γ(P ∈ p).
    """
    point = tuple(as_fraction(x) for x in point)
    gamma = asymmetry(point, p).gamma
    target = len(proj)
    image = p.image(lambda v: mat_vec(proj, v), target)
    image_point = mat_vec(proj, point)
    gamma_prime = asymmetry(image_point, image).gamma if target and image.is_full_dimensional else Fraction(1, 2)

    kernel = nullspace(list(proj), p.dim) if target else [unit(p.dim, i) for i in range(p.dim)]
    if not kernel:
        return Fraction(1, 2), gamma_prime, gamma
    # tranche en coordonnées y : P + Σ y_i k_i
    ineqs = [
        (tuple(dot(a, k) for k in kernel), b - dot(a, point))
        for a, b in p.inequalities
    ]
    fiber = Polyhedron.from_hrep(ineqs, len(kernel))
    gamma0 = asymmetry(zero(len(kernel)), fiber).gamma
    return gamma0, gamma_prime, gamma


# ============================================================
# MINIMA SUCCESSIFS / BORNITUDE
# ============================================================

def gauge(s: Polyhedron, x: Sequence[Fraction]) -> Fraction:
    """Jauge d'un corps compact contenant 0 à l'intérieur : min{t : x ∈ t·s}."""
    values = [dot(a, x) / b for a, b in s.inequalities if b < 0]
    return max(values + [Fraction(0)])


def successive_minimum(lat: Lattice, s: Polyhedron, i: int) -> tuple[Fraction, list[Vec]]:
    """
    λ_i(Λ, s) et i vecteurs indépendants qui le réalisent.

    Énumération exacte dans g_(i)·s, où g_(i) est la i-ème plus petite jauge
    des vecteurs de base (i vecteurs indépendants y sont déjà).
    Ordre des candidats : (jauge, première coordonnée non nulle positive, lexicographique).
    """
    _require_body(s)
    if s.reflect() != s:
        raise AsymmetricInput()
    d = lat.dim
    if not 1 <= i <= d:
        raise InputError("indice de minimum successif hors de [1, d]", index=i)

    radius = sorted(gauge(s, b) for b in lat.basis)[i - 1]
    candidates = [x for x in lattice_points(lat, s.scale(radius), "closure") if not is_zero(x)]
    candidates.sort(key=lambda x: (gauge(s, x), not positive_first(x), x))

    chosen: list[Vec] = []
    for x in candidates:
        if rank(chosen + [x], d) > len(chosen):
            chosen.append(x)
            if len(chosen) == i:
                break
    return gauge(s, chosen[-1]), chosen


@dataclass(frozen=True)
class BoundednessCertificate:
    dual_basis: tuple[Vec, ...]
    box_side: Fraction
    lambda_d: Fraction


def width(p: Polyhedron, phi: Sequence[Fraction]) -> Fraction:
    lo, hi = p.support_values(phi)
    return hi - lo


def _ext_gcd(values: Sequence[int]) -> tuple[int, list[int]]:
    """g = gcd(values) ≥ 0 et coefficients entiers k avec Σ k_i·values_i = g."""
    g, coeffs = 0, [0] * len(values)
    for idx, v in enumerate(values):
        # (g, coeffs) ← combinaison de (g, coeffs) et v
        old_r, r = g, v
        old_s, s_ = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s_ = s_, old_s - q * s_
            old_t, t = t, old_t - q * t
        coeffs = [c * old_s for c in coeffs]
        coeffs[idx] += old_t
        g = old_r
    if g < 0:
        g, coeffs = -g, [-c for c in coeffs]
    return g, coeffs


def mahler_completion(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """
    Base b_1..b_d de ℤ^d avec b_i ∈ ℤ^d ∩ span(w_1..w_i), coefficient de w_i
    positif minimal et coefficients sur w_j (j < i) dans [−1/2, 1/2].
    """
    d = len(vectors)
    w = [tuple(Fraction(x) for x in v) for v in vectors]
    basis: list[list[int]] = []
    for i in range(1, d + 1):
        span = w[:i]
        # saturation ℤ^d ∩ span(w_1..w_i)
        wt = [[int(span[r][c]) for r in range(i)] for c in range(d)]
        annihilator = integer_left_kernel(wt, d)
        if annihilator:
            at = [[annihilator[r][c] for r in range(len(annihilator))] for c in range(d)]
            saturated = integer_left_kernel(at, d)
        else:
            saturated = [[1 if a == b else 0 for b in range(d)] for a in range(d)]
        lead = []
        for x in saturated:
            coeffs = solve_combination(span, tuple(Fraction(c) for c in x))
            lead.append(coeffs[i - 1])
        den = lcm_denominators(lead)
        _, k = _ext_gcd([int(c * den) for c in lead])
        b = [sum(k[j] * saturated[j][c] for j in range(len(saturated))) for c in range(d)]
        coeffs = solve_combination(span, tuple(Fraction(c) for c in b))
        for j in range(i - 1):
            shift = math.floor(coeffs[j] + Fraction(1, 2))
            if shift:
                b = [x - shift * int(y) for x, y in zip(b, w[j])]
        basis.append(b)
    return basis


def boundedness_certificate(lat: Lattice, p: Polyhedron) -> BoundednessCertificate:
    """
    Base duale φ′_1..φ′_d de Λ* avec longueur φ′_i(□) ≤ d·λ_d(Λ*, (□−□)*) :
    témoins de λ_d puis complétion de Mahler.
    """
    _require_body(p)
    d = lat.dim
    dual = lat.dual()
    body = polar(minkowski_diff_self(p))
    lam, witnesses = successive_minimum(dual, body, d)
    completed = mahler_completion([dual.integer_coords(x) for x in witnesses])
    basis = tuple(dual.point(c) for c in completed)
    side = max(width(p, phi) for phi in basis)
    if side > d * lam:
        raise BoxSideExceedsBound(side=str(side), bound=str(d * lam))
    logger.debug("[BOUND] λ_d* = %s, côté = %s", lam, side)
    return BoundednessCertificate(basis, side, lam)


def lattice_width(lat: Lattice, p: Polyhedron) -> tuple[Fraction, Vec]:
    """Largeur de réseau : λ1(Λ*, (p−p)*) avec la forme qui la réalise."""
    _require_body(p)
    lam, witnesses = successive_minimum(lat.dual(), polar(minkowski_diff_self(p)), 1)
    return lam, witnesses[0]
