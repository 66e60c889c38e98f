"""
toriclab/schemas/germs.py
=========================
JSON des germes de fibrations toriques et réponses des analyses de base.

Format canonique d'un germe :
    {"N": base, "Nbar": base, "pi": matrice entière, "sigma_bar": rayons,
     "fan": [[indices de rayons par cône maximal]], "rays": [{"e": ..., "a": "p/q"}]}
Rayons triés lexicographiquement, cônes triés ; émission par
json.dumps(sort_keys=True, indent=2).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Literal

from pydantic import Field, ValidationError

from toriclab.core.errors import InputError
from toriclab.schemas.common import (
    PolyhedronIO,
    Rational,
    RationalVec,
    StrictModel,
    matrix_in,
    rat,
    vec_in,
    vec_out,
)
from toriclab.services.exact_lattice import Lattice, LatticeMap
from toriclab.services.polyconv import Polyhedron
from toriclab.services.toric_germ import (
    CtResult,
    DiscrepancyQuery,
    FibrationGerm,
    GermRay,
    MomentData,
    validate_germ,
)


# =========================
# INPUT SCHEMAS
# =========================

class GermRayIn(StrictModel):
    e: RationalVec
    a: Rational


class GermIn(StrictModel):
    N: list[RationalVec]
    Nbar: list[RationalVec] = []
    pi: list[list[int]] = []
    sigma_bar: list[RationalVec] = []
    fan: list[list[int]] = Field(min_length=1)
    rays: list[GermRayIn] = Field(min_length=1)

    @classmethod
    def from_domain(cls, g: FibrationGerm) -> GermIn:
        return cls(
            N=[vec_out(b) for b in g.N.basis],
            Nbar=[vec_out(b) for b in g.Nbar.basis],
            pi=[list(r) for r in g.pi.matrix],
            sigma_bar=[vec_out(r) for r in g.sigma_bar.rays],
            fan=[list(c) for c in g.fan],
            rays=[GermRayIn(e=vec_out(r.e), a=rat(r.a)) for r in g.rays],
        )

    def to_domain(self) -> FibrationGerm:
        """Construit puis valide le germe (rayons renormalisés)."""
        n = Lattice(tuple(matrix_in(self.N)))
        nbar = Lattice(tuple(matrix_in(self.Nbar)))
        germ = FibrationGerm(
            N=n,
            Nbar=nbar,
            pi=LatticeMap(tuple(tuple(r) for r in self.pi), n, nbar),
            sigma_bar=Polyhedron.cone(matrix_in(self.sigma_bar), nbar.dim),
            fan=tuple(tuple(c) for c in self.fan),
            rays=tuple(GermRay(vec_in(r.e), Fraction(r.a)) for r in self.rays),
        )
        return validate_germ(germ)


def _validation_detail(err: ValidationError) -> dict:
    first = err.errors()[0]
    return {"field": ".".join(str(x) for x in first["loc"]), "reason": first["msg"]}


def parse_germ(data: dict) -> FibrationGerm:
    try:
        model = GermIn.model_validate(data)
    except ValidationError as err:
        raise InputError("germe invalide", **_validation_detail(err)) from err
    return model.to_domain()


def load_germ(text: str) -> FibrationGerm:
    """Texte JSON -> germe validé ; diagnostic ligne/colonne ou champ."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"JSON invalide : {err.msg}", line=err.lineno, column=err.colno) from err
    return parse_germ(data)


def dump_germ(g: FibrationGerm) -> str:
    return json.dumps(GermIn.from_domain(g).model_dump(mode="json"), sort_keys=True, indent=2)


# =========================
# REQUEST BODIES (API)
# =========================

class GermRequest(StrictModel):
    germ: GermIn
    cap_cells: int | None = Field(default=None, ge=1)
    cap_index: int | None = Field(default=None, ge=1)


class TRequest(GermRequest):
    t: Rational


class MldRequest(GermRequest):
    scope: Literal["fiber", "total"] = "fiber"


class DiscrepancyRequest(GermRequest):
    e: RationalVec


# =========================
# OUTPUT SCHEMAS
# =========================

class ValidateOut(StrictModel):
    germ: GermIn
    dim: int
    base_dim: int
    cones: int
    affine: bool


class MomentOut(StrictModel):
    box: PolyhedronIO
    u: PolyhedronIO
    sigma0: PolyhedronIO
    u_compact: bool
    psi: list[RationalVec] | None = None

    @classmethod
    def from_domain(cls, data: MomentData, psi=None) -> MomentOut:
        return cls(
            box=PolyhedronIO.from_domain(data.box),
            u=PolyhedronIO.from_domain(data.u),
            sigma0=PolyhedronIO.from_domain(data.sigma0),
            u_compact=data.u.is_compact,
            psi=[vec_out(p) for p in psi] if psi is not None else None,
        )


class MldOut(StrictModel):
    scope: Literal["fiber", "total"]
    mld: Rational
    minimizer: RationalVec


class DiscrepancyOut(StrictModel):
    e: RationalVec
    value: str
    over_fiber: bool

    @classmethod
    def from_domain(cls, q: DiscrepancyQuery) -> DiscrepancyOut:
        value = "inf" if isinstance(q.value, float) else rat(q.value)
        return cls(e=vec_out(q.e), value=value, over_fiber=q.over_fiber)


class CtOut(StrictModel):
    t: Rational
    holds: bool
    mld: Rational
    witness: RationalVec | None = None
    reason: str | None = None

    @classmethod
    def from_domain(cls, res: CtResult) -> CtOut:
        return cls(
            t=rat(res.t),
            holds=res.holds,
            mld=rat(res.mld),
            witness=vec_out(res.witness) if res.witness is not None else None,
            reason=res.reason,
        )
