"""
toriclab/schemas/common.py
==========================
Briques communes des schémas : rationnels "p/q" et objets géométriques
(réseaux, applications, polyèdres, enregistrements de balayage).

Chaque modèle sait se construire depuis l'objet métier (`from_domain`) et
le reconstruire (`to_domain`) ; les polyèdres relus repassent par la double
description, donc sortent canoniques.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Annotated, Any, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field

from toriclab.services.exact_lattice import Lattice, LatticeMap, Vec
from toriclab.services.oracle import EnumerationRecord, ScanPredicate
from toriclab.services.polyconv import BoundednessCertificate, Polyhedron

RATIONAL_REGEX = re.compile(r"^-?\d+(/\d+)?$")


# =========================
# RATIONNELS
# =========================

def parse_rational(value: Any) -> str:
    """
    Accepte un entier ou une chaîne "p/q" ; rend la forme canonique
    str(Fraction). Lève ValueError sinon (les flottants sont refusés).
    """
    if isinstance(value, bool):
        raise ValueError("booléen reçu à la place d'un rationnel")
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    if isinstance(value, str) and RATIONAL_REGEX.match(value.strip()):
        num, _, den = value.strip().partition("/")
        if den and int(den) == 0:
            raise ValueError("dénominateur nul")
        return str(Fraction(int(num), int(den or 1)))
    raise ValueError(f"rationnel attendu sous la forme \"p/q\", reçu {value!r}")


Rational = Annotated[str, BeforeValidator(parse_rational)]
RationalVec = list[Rational]


def rat(x: Fraction | int) -> str:
    return str(Fraction(x))


def vec_out(v: Vec) -> list[str]:
    return [rat(x) for x in v]


def vec_in(v: list[str]) -> Vec:
    return tuple(Fraction(x) for x in v)


def matrix_in(rows: list[list[str]]) -> list[Vec]:
    return [vec_in(r) for r in rows]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# =========================
# RÉSEAUX
# =========================

class LatticeIO(StrictModel):
    basis: list[RationalVec]

    @classmethod
    def from_domain(cls, lat: Lattice) -> LatticeIO:
        return cls(basis=[vec_out(b) for b in lat.basis])

    def to_domain(self) -> Lattice:
        return Lattice(tuple(matrix_in(self.basis)))


class LatticeMapIO(StrictModel):
    matrix: list[list[int]]
    source: LatticeIO
    target: LatticeIO

    @classmethod
    def from_domain(cls, phi: LatticeMap) -> LatticeMapIO:
        return cls(
            matrix=[list(r) for r in phi.matrix],
            source=LatticeIO.from_domain(phi.source),
            target=LatticeIO.from_domain(phi.target),
        )

    def to_domain(self) -> LatticeMap:
        return LatticeMap(
            tuple(tuple(r) for r in self.matrix),
            self.source.to_domain(),
            self.target.to_domain(),
        )


# =========================
# POLYÈDRES
# =========================

class InequalityIO(StrictModel):
    """⟨a, x⟩ ≥ b."""

    a: RationalVec
    b: Rational


class PolyhedronIO(StrictModel):
    dim: int = Field(ge=0)
    vertices: list[RationalVec]
    rays: list[RationalVec] = []
    inequalities: list[InequalityIO] = []

    @classmethod
    def from_domain(cls, p: Polyhedron) -> PolyhedronIO:
        return cls(
            dim=p.dim,
            vertices=[vec_out(v) for v in p.vertices],
            rays=[vec_out(r) for r in p.rays],
            inequalities=[InequalityIO(a=vec_out(a), b=rat(b)) for a, b in p.inequalities],
        )

    def to_domain(self) -> Polyhedron:
        return Polyhedron.from_vrep(matrix_in(self.vertices), matrix_in(self.rays), self.dim)


# =========================
# CERTIFICATS ÉLÉMENTAIRES
# =========================

class ScanPredicateIO(StrictModel):
    kind: Literal["closure", "interior", "primitive"]
    inequalities: list[InequalityIO] = []


class EnumerationRecordIO(StrictModel):
    box: list[tuple[int, int]]
    lattice: LatticeIO
    predicate: ScanPredicateIO
    hits: list[RationalVec]
    cells: int | None = None

    @classmethod
    def from_domain(cls, rec: EnumerationRecord) -> EnumerationRecordIO:
        return cls(
            box=[tuple(b) for b in rec.box],
            lattice=LatticeIO.from_domain(rec.lattice),
            predicate=ScanPredicateIO(
                kind=rec.predicate.kind,
                inequalities=[InequalityIO(a=vec_out(a), b=rat(b)) for a, b in rec.predicate.inequalities],
            ),
            hits=[vec_out(h) for h in rec.hits],
            cells=rec.cells,
        )

    def to_domain(self) -> EnumerationRecord:
        predicate = ScanPredicate(
            kind=self.predicate.kind,
            inequalities=tuple((vec_in(i.a), Fraction(i.b)) for i in self.predicate.inequalities),
        )
        return EnumerationRecord(
            box=tuple(tuple(b) for b in self.box),
            lattice=self.lattice.to_domain(),
            predicate=predicate,
            hits=tuple(matrix_in(self.hits)),
        )


class BoundIO(StrictModel):
    dual_basis: list[RationalVec]
    box_side: Rational
    lambda_d: Rational

    @classmethod
    def from_domain(cls, bound: BoundednessCertificate) -> BoundIO:
        return cls(
            dual_basis=[vec_out(v) for v in bound.dual_basis],
            box_side=rat(bound.box_side),
            lambda_d=rat(bound.lambda_d),
        )

    def to_domain(self) -> BoundednessCertificate:
        return BoundednessCertificate(
            dual_basis=tuple(matrix_in(self.dual_basis)),
            box_side=Fraction(self.box_side),
            lambda_d=Fraction(self.lambda_d),
        )
