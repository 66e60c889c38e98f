from __future__ import annotations

from fastapi import APIRouter

from toriclab.routers.germs import germ_from, guarded
from toriclab.schemas.complements import (
    ComplementCertificateIO,
    ComplementRequest,
    HyperplaneCertificateIO,
    HyperplaneRequest,
    VerifyOut,
    VerifyRequest,
    certificate_from_json,
)
from toriclab.services.complement import (
    global_complement,
    hyperplane_sections,
    local_complement,
    verify_certificate,
)
from toriclab.services.reduction import germ_reduce

router = APIRouter(prefix="/complements", tags=["complements"])


@router.post("/local", response_model=ComplementCertificateIO)
def local(payload: ComplementRequest):
    with guarded(payload):
        cert = local_complement(germ_from(payload), payload.t, payload.r)
        return ComplementCertificateIO.from_domain(cert)


@router.post("/global", response_model=ComplementCertificateIO)
def global_(payload: ComplementRequest):
    with guarded(payload):
        cert = global_complement(germ_from(payload), payload.t, payload.r)
        return ComplementCertificateIO.from_domain(cert)


@router.post("/hyperplane", response_model=list[HyperplaneCertificateIO])
def hyperplane(payload: HyperplaneRequest):
    with guarded(payload):
        g = germ_from(payload)
        red = payload.certificate.to_domain() if payload.certificate else germ_reduce(g, payload.t)
        return [HyperplaneCertificateIO.from_domain(s) for s in hyperplane_sections(g, payload.t, red)]


@router.post("/verify", response_model=VerifyOut)
def verify(payload: VerifyRequest):
    with guarded():
        g = payload.germ.to_domain()
        kind, cert = certificate_from_json(payload.certificate)
        ok, clause = verify_certificate(g, kind, cert, payload.t)
        return VerifyOut(kind=kind, ok=ok, clause=clause)
