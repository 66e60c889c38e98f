"""
toriclab/schemas/reductions.py
==============================
Certificats de réduction t-lc, germe image a-lc et groupes de séries.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Literal

from pydantic import Field

from toriclab.schemas.common import (
    BoundIO,
    EnumerationRecordIO,
    LatticeIO,
    LatticeMapIO,
    PolyhedronIO,
    Rational,
    RationalVec,
    StrictModel,
    rat,
    vec_in,
    vec_out,
)
from toriclab.schemas.germs import GermIn, GermRequest
from toriclab.services.reduction import (
    GermImage,
    GroupRep,
    ProjectionStep,
    QFactorialGroup,
    ReductionCertificate,
)


# =========================
# CERTIFICAT DE RÉDUCTION
# =========================

class ProjectionStepIO(StrictModel):
    b: RationalVec
    tau: Rational

    @classmethod
    def from_domain(cls, step: ProjectionStep) -> ProjectionStepIO:
        return cls(b=vec_out(step.b), tau=rat(step.tau))

    def to_domain(self) -> ProjectionStep:
        return ProjectionStep(b=vec_in(self.b), tau=Fraction(self.tau))


class ReductionCertificateIO(StrictModel):
    kind: Literal["reduction"] = "reduction"
    t: Rational
    phi: LatticeMapIO
    projection_chain: list[ProjectionStepIO]
    u_prime: PolyhedronIO
    emptiness_witness: EnumerationRecordIO
    bound: BoundIO
    stop_step: ProjectionStepIO | None = None
    stop_gamma: Rational | None = None

    @classmethod
    def from_domain(cls, cert: ReductionCertificate) -> ReductionCertificateIO:
        return cls(
            t=rat(cert.t),
            phi=LatticeMapIO.from_domain(cert.phi),
            projection_chain=[ProjectionStepIO.from_domain(s) for s in cert.projection_chain],
            u_prime=PolyhedronIO.from_domain(cert.u_prime),
            emptiness_witness=EnumerationRecordIO.from_domain(cert.emptiness_witness),
            bound=BoundIO.from_domain(cert.bound),
            stop_step=ProjectionStepIO.from_domain(cert.stop_step) if cert.stop_step else None,
            stop_gamma=rat(cert.stop_gamma) if cert.stop_gamma is not None else None,
        )

    def to_domain(self) -> ReductionCertificate:
        return ReductionCertificate(
            t=Fraction(self.t),
            phi=self.phi.to_domain(),
            projection_chain=tuple(s.to_domain() for s in self.projection_chain),
            u_prime=self.u_prime.to_domain(),
            emptiness_witness=self.emptiness_witness.to_domain(),
            bound=self.bound.to_domain(),
            stop_step=self.stop_step.to_domain() if self.stop_step else None,
            stop_gamma=Fraction(self.stop_gamma) if self.stop_gamma is not None else None,
        )


# =========================
# GERME IMAGE (a-lc)
# =========================

class ImageRayOut(StrictModel):
    e: RationalVec
    a: Rational
    source: int
    q: Rational


class GermImageOut(StrictModel):
    n_prime: LatticeIO
    sigma_prime: PolyhedronIO
    psi_prime: RationalVec
    rays_prime: list[ImageRayOut]
    germ: GermIn
    certificate: ReductionCertificateIO
    mld: Rational

    @classmethod
    def from_domain(cls, img: GermImage) -> GermImageOut:
        return cls(
            n_prime=LatticeIO.from_domain(img.n_prime),
            sigma_prime=PolyhedronIO.from_domain(img.sigma_prime),
            psi_prime=vec_out(img.psi_prime),
            rays_prime=[
                ImageRayOut(e=vec_out(r.e), a=rat(r.a), source=r.source, q=rat(r.q))
                for r in img.rays_prime
            ],
            germ=GermIn.from_domain(img.germ),
            certificate=ReductionCertificateIO.from_domain(img.certificate),
            mld=rat(img.mld),
        )


# =========================
# SÉRIES (cas ℚ-factoriel)
# =========================

class GroupRepIO(StrictModel):
    """G = {x : ⟨g_j, x⟩ ∈ ℤ} en coordonnées rayons."""

    kind: Literal["series"] = "series"
    d: int = Field(ge=1)
    dual_generators: list[list[int]]

    @classmethod
    def from_domain(cls, grp: GroupRep) -> GroupRepIO:
        return cls(d=grp.d, dual_generators=[list(r) for r in grp.dual_generators])

    def to_domain(self) -> GroupRep:
        return GroupRep(d=self.d, dual_generators=tuple(tuple(r) for r in self.dual_generators))


class SeriesCheck(StrictModel):
    t: Rational
    series: bool
    ct: bool


class QFactorialOut(StrictModel):
    ray_basis: list[RationalVec]
    lattice: LatticeIO
    invariants: list[int]
    generators: list[RationalVec]
    group: GroupRepIO
    u: PolyhedronIO
    checks: list[SeriesCheck] = []
    reduction_group: GroupRepIO | None = None

    @classmethod
    def from_domain(cls, ctx: QFactorialGroup, **extra) -> QFactorialOut:
        return cls(
            ray_basis=[vec_out(v) for v in ctx.ray_basis],
            lattice=LatticeIO.from_domain(ctx.lattice),
            invariants=list(ctx.invariants),
            generators=[vec_out(v) for v in ctx.generators],
            group=GroupRepIO.from_domain(ctx.group),
            u=PolyhedronIO.from_domain(ctx.u),
            **extra,
        )


# =========================
# REQUEST BODIES (API)
# =========================

class SeriesRequest(GermRequest):
    ts: list[Rational] = Field(default_factory=lambda: ["1/2", "1", "3/2"], min_length=1)

