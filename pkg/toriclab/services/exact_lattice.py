"""
toriclab/services/exact_lattice.py
==================================
Algèbre linéaire exacte sur les réseaux : formes normales (HNF/SNF),
primitivité, quotients, duaux.

Conventions :
    - un vecteur est un tuple de Fraction (`Vec`) dans l'ambiant ℚ^d ;
    - un réseau est donné par une base (lignes) dans ℚ^d, donc les
      sous-réseaux ℤ^d ≤ N ≤ ℚ^d sont naturels ;
    - l'accouplement N × M → ℚ est le produit scalaire standard.

Les calculs rationnels (rang, résolution, noyau) et la SNF passent par
sympy ; la HNF est faite à la main pour garder la transformation u.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Iterable, Sequence

import sympy
from sympy.matrices.normalforms import smith_normal_decomp

from toriclab.core.errors import (
    DimensionMismatch,
    InputError,
    NotInLattice,
    NotPrimitive,
    ZeroVector,
)

logger = logging.getLogger(__name__)

Vec = tuple[Fraction, ...]
IntMatrix = list[list[int]]


# ============================================================
# VECTEURS
# ============================================================

def as_fraction(x: int | str | Fraction) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(*xs: int | str | Fraction) -> Vec:
    """vec(1, "1/2") -> (Fraction(1), Fraction(1, 2))"""
    return tuple(as_fraction(x) for x in xs)


def to_vec(xs: Iterable[int | str | Fraction]) -> Vec:
    return tuple(as_fraction(x) for x in xs)


def zero(d: int) -> Vec:
    return (Fraction(0),) * d


def unit(d: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(d))


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatch(f"produit scalaire {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def scale(c: Fraction | int, v: Vec) -> Vec:
    return tuple(c * a for a in v)


def neg(v: Vec) -> Vec:
    return tuple(-a for a in v)


def is_zero(v: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in v)


def lcm_denominators(values: Iterable[Fraction]) -> int:
    return reduce(lcm, (as_fraction(x).denominator for x in values), 1)


def primitive_integer(v: Sequence[Fraction]) -> Vec:
    """Multiple positif de v à coordonnées entières premières entre elles."""
    if is_zero(v):
        return tuple(Fraction(0) for _ in v)
    den = lcm_denominators(v)
    ints = [int(a * den) for a in v]
    g = reduce(gcd, (abs(x) for x in ints))
    return tuple(Fraction(x // g) for x in ints)


def positive_first(v: Vec) -> bool:
    """Première coordonnée non nulle strictement positive."""
    for a in v:
        if a != 0:
            return a > 0
    return False


# ============================================================
# PONT SYMPY (algèbre rationnelle)
# ============================================================

def _to_sympy(rows: Sequence[Sequence[Fraction]], ncols: int) -> sympy.Matrix:
    if not rows:
        return sympy.zeros(0, ncols)
    return sympy.Matrix(
        [[sympy.Rational(a.numerator, a.denominator) for a in row] for row in rows]
    )


def _from_sympy_entry(x: sympy.Expr) -> Fraction:
    r = sympy.Rational(x)
    return Fraction(int(r.p), int(r.q))


def _from_sympy(m: sympy.Matrix) -> list[Vec]:
    return [tuple(_from_sympy_entry(m[i, j]) for j in range(m.cols)) for i in range(m.rows)]


def rank(rows: Sequence[Vec], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return _to_sympy(rows, ncols or len(rows[0])).rank()


def rref(rows: Sequence[Vec], ncols: int) -> list[Vec]:
    """Lignes non nulles de la forme échelonnée réduite."""
    if not rows:
        return []
    m, _ = _to_sympy(rows, ncols).rref()
    return [r for r in _from_sympy(m) if not is_zero(r)]


def solve_combination(rows: Sequence[Vec], target: Vec) -> Vec | None:
    """x tel que Σ x_i·rows_i = target, ou None si incompatible (paramètres libres à 0)."""
    if not rows:
        return () if is_zero(target) else None
    a = _to_sympy(rows, len(target)).T
    b = _to_sympy([target], len(target)).T
    try:
        sol, params = a.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.rows:
        sol = sol.subs({p: 0 for p in params})
    return tuple(_from_sympy_entry(sol[i, 0]) for i in range(sol.rows))


def nullspace(rows: Sequence[Vec], ncols: int) -> list[Vec]:
    """Base de {x : rows·x = 0}."""
    if not rows:
        return [unit(ncols, i) for i in range(ncols)]
    return [
        tuple(_from_sympy_entry(c[i, 0]) for i in range(c.rows))
        for c in _to_sympy(rows, ncols).nullspace()
    ]


def inverse(rows: Sequence[Vec]) -> list[Vec]:
    if not rows:
        return []
    return _from_sympy(_to_sympy(rows, len(rows)).inv())


def projection_coefficients(v: Vec, span: Sequence[Vec]) -> Vec:
    """λ tel que Σ λ_i·span_i soit la projection orthogonale de v sur span (base libre)."""
    if not span:
        return ()
    lm = _to_sympy(span, len(v))
    x = _to_sympy([v], len(v)).T
    coeffs = (lm * lm.T).inv() * (lm * x)
    return tuple(_from_sympy_entry(coeffs[i, 0]) for i in range(coeffs.rows))


def project_orthogonal(v: Vec, span: Sequence[Vec]) -> Vec:
    """Projection orthogonale de v sur le complément de span (base libre)."""
    if not span:
        return v
    out = list(v)
    for lam, s in zip(projection_coefficients(v, span), span):
        if lam:
            for i, a in enumerate(s):
                out[i] -= lam * a
    return tuple(out)


def mat_vec(m: Sequence[Sequence[Fraction | int]], v: Sequence[Fraction]) -> Vec:
    return tuple(sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in m)


def vec_mat(v: Sequence[Fraction], m: Sequence[Sequence[Fraction | int]], ncols: int) -> Vec:
    """Produit ligne v·m (m a len(v) lignes et ncols colonnes)."""
    out = [Fraction(0)] * ncols
    for a, row in zip(v, m):
        if a:
            for j in range(ncols):
                out[j] += a * row[j]
    return tuple(out)


# ============================================================
# FORMES NORMALES ENTIÈRES
# ============================================================

def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _check_integer(m: Sequence[Sequence[int | Fraction]]) -> IntMatrix:
    out = []
    for row in m:
        r = []
        for x in row:
            f = as_fraction(x)
            if f.denominator != 1:
                raise InputError("matrice entière attendue", entry=str(f))
            r.append(int(f))
        out.append(r)
    return out


def hnf(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """
    Forme normale de Hermite par lignes : u·m = h, u unimodulaire.
    Pivots > 0, coefficients au-dessus d'un pivot réduits dans [0, pivot).
    Les lignes nulles sont en bas.
    """
    h = _check_integer(m)
    r = len(h)
    c = len(h[0]) if r else 0
    u = _identity(r)

    def swap(i: int, j: int) -> None:
        h[i], h[j] = h[j], h[i]
        u[i], u[j] = u[j], u[i]

    def axpy(i: int, q: int, j: int) -> None:
        # ligne_i -= q * ligne_j
        h[i] = [a - q * b for a, b in zip(h[i], h[j])]
        u[i] = [a - q * b for a, b in zip(u[i], u[j])]

    row = 0
    for col in range(c):
        if row == r:
            break
        if all(h[i][col] == 0 for i in range(row, r)):
            continue
        while True:
            k = min((i for i in range(row, r) if h[i][col]), key=lambda i: abs(h[i][col]))
            swap(row, k)
            for i in range(row + 1, r):
                if h[i][col]:
                    axpy(i, h[i][col] // h[row][col], row)
            if all(h[i][col] == 0 for i in range(row + 1, r)):
                break
        if h[row][col] < 0:
            h[row] = [-a for a in h[row]]
            u[row] = [-a for a in u[row]]
        for i in range(row):
            q = h[i][col] // h[row][col]
            if q:
                axpy(i, q, row)
        row += 1
    return h, u


def snf(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Forme normale de Smith : u·m·v = s, s diagonale (même forme que m),
    s_i | s_{i+1}, s_i ≥ 0. Délègue à sympy (transformations comprises).
    """
    s = _check_integer(m)
    r = len(s)
    c = len(s[0]) if r else 0
    if r == 0 or c == 0:
        return s, _identity(r), _identity(c)
    smf, u, v = smith_normal_decomp(sympy.Matrix(s), domain=sympy.ZZ)
    s, u, v = ([[int(x) for x in row] for row in a.tolist()] for a in (smf, u, v))
    for i in range(min(r, c)):
        if s[i][i] < 0:
            s[i][i] = -s[i][i]
            u[i] = [-a for a in u[i]]
    return s, u, v


def integer_left_kernel(m: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
    """Base (lignes) de {x ∈ ℤ^nrows : x·m = 0}."""
    if not m or not m[0]:
        return _identity(nrows)
    h, u = hnf(m)
    return [u[i] for i in range(nrows) if all(a == 0 for a in h[i])]


# ============================================================
# RÉSEAUX
# ============================================================

@dataclass(frozen=True)
class Lattice:
    """Réseau de rang plein dans ℚ^d, engendré par les lignes de `basis`."""

    basis: tuple[Vec, ...]

    def __post_init__(self) -> None:
        d = len(self.basis)
        if any(len(row) != d for row in self.basis):
            raise InputError("la base d'un réseau doit être carrée", rows=d)
        if d and rank(list(self.basis), d) != d:
            raise InputError("base de réseau singulière")

    @classmethod
    def standard(cls, d: int) -> Lattice:
        return cls(tuple(unit(d, i) for i in range(d)))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int | str | Fraction]]) -> Lattice:
        return cls(tuple(to_vec(r) for r in rows))

    @classmethod
    def from_generators(cls, gens: Sequence[Vec], d: int) -> Lattice:
        """Réseau engendré par des vecteurs rationnels (doit être de rang d)."""
        den = lcm_denominators(a for g in gens for a in g)
        h, _ = hnf([[int(a * den) for a in g] for g in gens])
        rows = [tuple(Fraction(a, den) for a in row) for row in h if any(row)]
        if len(rows) != d:
            raise InputError("les générateurs n'engendrent pas un réseau de rang plein")
        return cls(tuple(rows))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def _inverse(self) -> list[Vec]:
        return inverse(list(self.basis))

    def coords(self, v: Sequence[Fraction]) -> Vec:
        """Coordonnées (rationnelles) de v dans la base."""
        if len(v) != self.dim:
            raise DimensionMismatch(f"vecteur de dimension {len(v)} pour un réseau de rang {self.dim}")
        return vec_mat(v, self._inverse, self.dim)

    def point(self, c: Sequence[Fraction | int]) -> Vec:
        return vec_mat([Fraction(x) for x in c], self.basis, self.dim)

    def contains(self, v: Sequence[Fraction]) -> bool:
        return all(a.denominator == 1 for a in self.coords(v))

    def integer_coords(self, v: Sequence[Fraction]) -> tuple[int, ...]:
        c = self.coords(v)
        if any(a.denominator != 1 for a in c):
            raise NotInLattice(vector=[str(a) for a in v])
        return tuple(int(a) for a in c)

    def dual(self) -> Lattice:
        """M = {m : ⟨m, n⟩ ∈ ℤ ∀n ∈ N} ; base = transposée de l'inverse."""
        inv = self._inverse
        d = self.dim
        return Lattice(tuple(tuple(inv[j][i] for j in range(d)) for i in range(d)))

    def canonical(self) -> Lattice:
        return Lattice.from_generators(list(self.basis), self.dim) if self.dim else self

    def same_as(self, other: Lattice) -> bool:
        return self.dim == other.dim and self.canonical().basis == other.canonical().basis

    def is_standard(self) -> bool:
        return self.same_as(Lattice.standard(self.dim))


@dataclass(frozen=True)
class LatticeMap:
    """
    Homomorphisme source → target ; `matrix` (p×d, entière) envoie les
    coordonnées source sur les coordonnées target.
    """

    matrix: tuple[tuple[int, ...], ...]
    source: Lattice
    target: Lattice

    def __post_init__(self) -> None:
        if len(self.matrix) != self.target.dim or any(len(r) != self.source.dim for r in self.matrix):
            raise DimensionMismatch(
                "matrice de taille incompatible",
                rows=len(self.matrix),
                source=self.source.dim,
                target=self.target.dim,
            )

    @classmethod
    def identity(cls, lat: Lattice) -> LatticeMap:
        return cls(tuple(tuple(1 if i == j else 0 for j in range(lat.dim)) for i in range(lat.dim)), lat, lat)

    @cached_property
    def _row_matrix(self) -> list[Vec]:
        """K (d×p) tel que Φ(x) = x·K dans les ambiants."""
        d, p = self.source.dim, self.target.dim
        mt = [[Fraction(self.matrix[k][j]) for k in range(p)] for j in range(d)]
        left = [vec_mat(row, mt, p) for row in self.source._inverse]
        return [vec_mat(row, self.target.basis, p) for row in left]

    def linear(self) -> list[Vec]:
        """Matrice ambiante A (p×d) : Φ(x) = A·x."""
        k = self._row_matrix
        return [tuple(k[j][i] for j in range(self.source.dim)) for i in range(self.target.dim)]

    def apply(self, x: Sequence[Fraction]) -> Vec:
        return vec_mat(x, self._row_matrix, self.target.dim)

    def pullback(self, m: Sequence[Fraction]) -> Vec:
        """Φ*(m) = m ∘ Φ, dans l'ambiant dual de la source."""
        return tuple(dot(row, m) for row in self._row_matrix)

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.matrix for a in row)

    def is_surjective(self) -> bool:
        p = self.target.dim
        if p == 0:
            return True
        if self.source.dim < p:
            return False
        s, _, _ = snf([list(r) for r in self.matrix])
        return all(s[i][i] == 1 for i in range(p))

    def compose(self, inner: LatticeMap) -> LatticeMap:
        """self ∘ inner."""
        change = [self.source.integer_coords(b) for b in inner.target.basis]
        # change[j] = coordonnées (dans self.source) du j-ième vecteur de base de inner.target
        p, k, d = self.target.dim, inner.target.dim, inner.source.dim
        mid = [[sum(self.matrix[i][a] * change[j][a] for a in range(self.source.dim)) for j in range(k)] for i in range(p)]
        out = tuple(tuple(sum(mid[i][j] * inner.matrix[j][c] for j in range(k)) for c in range(d)) for i in range(p))
        return LatticeMap(out, inner.source, self.target)

    def lift(self, y: Sequence[Fraction]) -> Vec:
        """Un antécédent entier de y (exige y dans l'image du réseau source)."""
        yc = self.target.integer_coords(y)
        p, d = self.target.dim, self.source.dim
        if p == 0:
            return zero(d)
        s, u, v = snf([list(r) for r in self.matrix])
        rhs = [sum(u[i][j] * yc[j] for j in range(p)) for i in range(p)]
        z = [0] * d
        for i in range(p):
            if i < d and s[i][i]:
                if rhs[i] % s[i][i]:
                    raise NotInLattice("y n'est pas dans l'image", vector=[str(a) for a in y])
                z[i] = rhs[i] // s[i][i]
            elif rhs[i]:
                raise NotInLattice("y n'est pas dans l'image", vector=[str(a) for a in y])
        c = [sum(v[i][j] * z[j] for j in range(d)) for i in range(d)]
        return self.source.point(c)


# ============================================================
# OPÉRATIONS
# ============================================================

def primitive_decompose(v: Sequence[Fraction], lat: Lattice) -> tuple[Vec, Fraction]:
    """v = q·e avec e primitif dans lat et q > 0 (q entier si v ∈ lat)."""
    if is_zero(v):
        raise ZeroVector()
    c = lat.coords(v)
    den = lcm_denominators(c)
    g = reduce(gcd, (abs(int(a * den)) for a in c))
    q = Fraction(g, den)
    e = tuple(a / q for a in v)
    return e, q


def quotient_by_span(lat: Lattice, vectors: Sequence[Vec]) -> tuple[Lattice, LatticeMap]:
    """
    Quotient de lat par le sous-réseau saturé lat ∩ span(vectors).

    La projection est donnée par une base (HNF) des formes entières qui
    s'annulent sur span(vectors) ; le but est ℤ^(d−r) standard.
    """
    d = lat.dim
    w = []
    for x in vectors:
        c = lat.coords(x)
        if not is_zero(c):
            den = lcm_denominators(c)
            w.append([int(a * den) for a in c])
    if w:
        # formes f ∈ ℤ^d avec W·f = 0 : noyau à gauche de W^T
        wt = [[w[i][j] for i in range(len(w))] for j in range(d)]
        kernel = integer_left_kernel(wt, d)
        rows = [row for row in hnf(kernel)[0] if any(row)] if kernel else []
    else:
        rows = _identity(d)
    target = Lattice.standard(len(rows))
    proj = LatticeMap(tuple(tuple(r) for r in rows), lat, target)
    logger.debug("[LATTICE] quotient de rang %s -> %s", d, len(rows))
    return target, proj


def lattice_quotient(lat: Lattice, b: Sequence[Fraction]) -> tuple[Lattice, LatticeMap]:
    """Λ → Λ/ℤb pour b primitif."""
    if is_zero(b):
        raise ZeroVector()
    c = lat.coords(b)
    if any(a.denominator != 1 for a in c) or reduce(gcd, (abs(int(a)) for a in c)) != 1:
        raise NotPrimitive(vector=[str(a) for a in b])
    return quotient_by_span(lat, [tuple(b)])
