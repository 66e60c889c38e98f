"""
toriclab/services/oracle.py
===========================
Implémentations de référence par force brute.

Ne partage aucun code géométrique avec polyconv / toric_germ : seules les
données (Lattice, Vec, inégalités déjà calculées) transitent. L'élimination
de Gauss est refaite ici, en Fraction.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from toriclab.core.errors import (
    CapTooSmall,
    NoInteriorLatticePoint,
    NotRCartier,
)
from toriclab.core.limits import check_cell_budget, get_limit
from toriclab.services.exact_lattice import Lattice, Vec

logger = logging.getLogger(__name__)

PredicateKind = Literal["closure", "interior", "primitive"]
Box = tuple[tuple[int, int], ...]


# ============================================================
# ÉLIMINATION DE GAUSS (indépendante)
# ============================================================

def _solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """x avec rows·x = rhs ; variables libres à 0 ; None si incompatible."""
    m = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    ncols = len(m[0]) - 1 if m else 0
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        k = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if k is None:
            continue
        m[row], m[k] = m[k], m[row]
        p = m[row][col]
        m[row] = [x / p for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    if any(all(x == 0 for x in r[:-1]) and r[-1] != 0 for r in m):
        return None
    x = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        x[col] = m[i][-1]
    return x


def _rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows:
        return 0
    m = [list(map(Fraction, r)) for r in rows]
    r = 0
    for col in range(len(m[0])):
        k = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        for i in range(r + 1, len(m)):
            f = m[i][col] / m[r][col]
            m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    return r


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _coords(lat: Lattice, v: Sequence[Fraction]) -> list[Fraction]:
    """c avec c·basis = v."""
    d = lat.dim
    cols = [[lat.basis[i][j] for i in range(d)] for j in range(d)]
    c = _solve(cols, v)
    assert c is not None
    return c


def _point(lat: Lattice, c: Sequence[int]) -> Vec:
    d = lat.dim
    return tuple(sum((Fraction(c[i]) * lat.basis[i][j] for i in range(d)), Fraction(0)) for j in range(d))


# ============================================================
# SCAN DE BOÎTE
# ============================================================

@dataclass(frozen=True)
class ScanPredicate:
    """Prédicat de scan ; `inequalities` (⟨a, x⟩ ≥ b) pour closure / interior."""

    kind: PredicateKind
    inequalities: tuple[tuple[Vec, Fraction], ...] = ()

    def __call__(self, lat: Lattice, c: Sequence[int], x: Vec) -> bool:
        if self.kind == "primitive":
            return math.gcd(*c) == 1
        if self.kind == "closure":
            return all(_dot(a, x) >= b for a, b in self.inequalities)
        pairs = {(a, b) for a, b in self.inequalities}
        if any((tuple(-t for t in a), -b) in pairs for a, b in self.inequalities):
            return False  # pas de pleine dimension
        return all(_dot(a, x) > b for a, b in self.inequalities)


@dataclass(frozen=True)
class EnumerationRecord:
    box: Box
    lattice: Lattice
    predicate: ScanPredicate
    hits: tuple[Vec, ...]

    @property
    def cells(self) -> int:
        return math.prod(hi - lo + 1 for lo, hi in self.box)


def bounding_box(lat: Lattice, points: Sequence[Sequence[Fraction]]) -> Box:
    """Boîte entière (coordonnées du réseau) contenant les points."""
    coords = [_coords(lat, p) for p in points]
    return tuple(
        (math.floor(min(c[j] for c in coords)), math.ceil(max(c[j] for c in coords)))
        for j in range(lat.dim)
    )


def oracle_lattice_scan(lat: Lattice, box: Box, predicate: ScanPredicate) -> EnumerationRecord:
    """Balayage exhaustif exact ; hits triés lexicographiquement (ambiant)."""
    cells = math.prod(max(0, hi - lo + 1) for lo, hi in box)
    check_cell_budget(cells)
    hits = []
    for c in itertools.product(*(range(lo, hi + 1) for lo, hi in box)):
        x = _point(lat, c)
        if predicate(lat, c, x):
            hits.append(x)
    logger.debug("[ORACLE] scan %s cellules, %s hits (%s)", cells, len(hits), predicate.kind)
    return EnumerationRecord(box=tuple(box), lattice=lat, predicate=predicate, hits=tuple(sorted(hits)))


def replay(record: EnumerationRecord) -> bool:
    """Rejoue le scan et compare les hits."""
    return oracle_lattice_scan(record.lattice, record.box, record.predicate).hits == record.hits


# ============================================================
# mld DE RÉFÉRENCE
# ============================================================

def _cone_facets(rays: Sequence[Vec], dim: int) -> list[Vec]:
    """Normales intérieures des facettes d'un cône de pleine dimension (sous-ensembles de rayons)."""
    facets: set[Vec] = set()
    for subset in itertools.combinations(rays, dim - 1):
        if _rank(subset) != dim - 1:
            continue
        # normale : noyau des rayons du sous-ensemble
        for j in range(dim):
            rows = list(subset) + [tuple(Fraction(1 if k == j else 0) for k in range(dim))]
            n = _solve(rows, [Fraction(0)] * (dim - 1) + [Fraction(1)])
            if n is not None and _rank(rows) == dim:
                break
        else:
            continue
        values = [_dot(n, r) for r in rays]
        if all(v >= 0 for v in values):
            normal = tuple(n)
        elif all(v <= 0 for v in values):
            normal = tuple(-x for x in n)
        else:
            continue
        den = math.lcm(*(x.denominator for x in normal))
        g = math.gcd(*(int(x * den) for x in normal))
        facets.add(tuple(x * den / g for x in normal))
    return sorted(facets)


def _psi(vectors: Sequence[Vec], values: Sequence[Fraction], dim: int) -> list[Fraction] | None:
    psi = _solve(vectors, values)
    if psi is None or any(_dot(psi, v) != a for v, a in zip(vectors, values)):
        return None
    return psi


def oracle_mld(germ, cap: int | str | Fraction) -> Fraction:
    """
    min{−h_□(e) ; e ∈ N ∩ int|Δ| ∖ {0}} par scan direct de la boîte de cap·U,
    élargie de ORACLE_RADIUS le long des rayons à a_i = 0.
    −h_□(e) = max_σ ⟨ψ_σ, e⟩ pour e ∈ |Δ| (cas semi-ample).

    Quand U n'est pas compact, l'élargissement est un rayon fixe et non une
    borne prouvée : un minimiseur plus loin le long de σ0 peut être manqué. La
    valeur rendue est alors seulement un majorant du mld ; augmenter
    TORICLAB_ORACLE_RADIUS pour élargir le scan.
    """
    cap = Fraction(cap)
    d = germ.N.dim
    rays = [r.e for r in germ.rays]
    psis = []
    for k, cone in enumerate(germ.fan):
        psi = _psi([rays[i] for i in cone], [germ.rays[i].a for i in cone], d)
        if psi is None:
            raise NotRCartier(cone=k)
        psis.append(psi)

    # σ̄ de pleine dimension (sinon aucun point intérieur) ; base ponctuelle : tout N_ℝ
    p = germ.Nbar.dim
    bar_rays = list(germ.sigma_bar.rays)
    facets = _cone_facets(bar_rays, p) if p and _rank(bar_rays) == p else []
    full = p == 0 or bool(facets)
    pi_rows = germ.pi.linear()

    def in_interior(e: Vec) -> bool:
        y = [_dot(row, e) for row in pi_rows]
        return full and all(_dot(n, y) > 0 for n in facets)

    radius = get_limit("oracle_radius")
    points = [tuple(Fraction(0) for _ in range(d))]
    points += [tuple(cap * x / r.a for x in r.e) for r in germ.rays if r.a > 0]
    for r in germ.rays:
        if r.a == 0:
            points += [tuple(x + radius * y for x, y in zip(pt, r.e)) for pt in list(points)]
    box = bounding_box(germ.N, points)
    check_cell_budget(math.prod(hi - lo + 1 for lo, hi in box))

    best: Fraction | None = None
    for c in itertools.product(*(range(lo, hi + 1) for lo, hi in box)):
        if not any(c):
            continue
        e = _point(germ.N, c)
        if not in_interior(e):
            continue
        value = max(_dot(psi, e) for psi in psis)
        if value <= cap and (best is None or value < best):
            best = value
    if best is None:
        raise CapTooSmall(cap=str(cap))
    logger.debug("[ORACLE] mld de référence = %s (cap %s)", best, cap)
    return best


# ============================================================
# γ DE RÉFÉRENCE
# ============================================================

def oracle_gamma(lat: Lattice, polytope) -> Fraction:
    """
    max sur les points intérieurs P de min_k slack_k / largeur_k, où pour
    chaque facette ⟨a_k, x⟩ ≥ b_k : slack = ⟨a_k, P⟩ − b_k et
    largeur = max⟨a_k, □⟩ − b_k.
    """
    ineqs = list(polytope.inequalities)
    vertices = list(polytope.vertices)
    widths = [max(_dot(a, v) for v in vertices) - b for a, b in ineqs]
    box = bounding_box(lat, vertices)
    record = oracle_lattice_scan(lat, box, ScanPredicate("interior", tuple(ineqs)))
    if not record.hits:
        raise NoInteriorLatticePoint()
    return max(
        min((_dot(a, x) - b) / w for (a, b), w in zip(ineqs, widths))
        for x in record.hits
    )
