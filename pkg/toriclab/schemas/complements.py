"""
toriclab/schemas/complements.py
===============================
Certificats de complément et de section hyperplane ; relecture générique
des certificats (`certificate_from_json`) pour la re-vérification.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Literal

from pydantic import Field, ValidationError

from toriclab.core.errors import InputError
from toriclab.schemas.common import Rational, RationalVec, StrictModel, matrix_in, rat, vec_in, vec_out
from toriclab.schemas.germs import GermIn, GermRequest
from toriclab.schemas.reductions import GroupRepIO, ReductionCertificateIO
from toriclab.services.complement import ComplementCertificate, HyperplaneCertificate
from toriclab.services.reduction import GroupRep, ReductionCertificate


# =========================
# CERTIFICATS
# =========================

class ComplementCertificateIO(StrictModel):
    kind: Literal["complement"] = "complement"
    n: int = Field(ge=1)
    characters: list[RationalVec]
    bplus_coeffs: list[Rational]
    verified_mld: Rational
    scope: Literal["fiber", "total"]
    t: Rational
    r: int = Field(default=1, ge=1)
    premise_mld: Rational | None = None

    @classmethod
    def from_domain(cls, cert: ComplementCertificate) -> ComplementCertificateIO:
        return cls(
            n=cert.n,
            characters=[vec_out(m) for m in cert.characters],
            bplus_coeffs=[rat(b) for b in cert.bplus_coeffs],
            verified_mld=rat(cert.verified_mld),
            scope=cert.scope,
            t=rat(cert.t),
            r=cert.r,
            premise_mld=rat(cert.premise_mld) if cert.premise_mld is not None else None,
        )

    def to_domain(self) -> ComplementCertificate:
        return ComplementCertificate(
            n=self.n,
            characters=tuple(matrix_in(self.characters)),
            bplus_coeffs=tuple(Fraction(b) for b in self.bplus_coeffs),
            verified_mld=Fraction(self.verified_mld),
            scope=self.scope,
            t=Fraction(self.t),
            r=self.r,
            premise_mld=Fraction(self.premise_mld) if self.premise_mld is not None else None,
        )


class HyperplaneCertificateIO(StrictModel):
    kind: Literal["hyperplane"] = "hyperplane"
    m_bar: RationalVec
    m_prime: RationalVec
    gamma_h: Rational

    @classmethod
    def from_domain(cls, cert: HyperplaneCertificate) -> HyperplaneCertificateIO:
        return cls(m_bar=vec_out(cert.m_bar), m_prime=vec_out(cert.m_prime), gamma_h=rat(cert.gamma_h))

    def to_domain(self) -> HyperplaneCertificate:
        return HyperplaneCertificate(
            m_bar=vec_in(self.m_bar), m_prime=vec_in(self.m_prime), gamma_h=Fraction(self.gamma_h)
        )


CERTIFICATE_MODELS = {
    "reduction": ReductionCertificateIO,
    "complement": ComplementCertificateIO,
    "hyperplane": HyperplaneCertificateIO,
    "series": GroupRepIO,
}


def certificate_from_json(data: str | dict[str, Any]):
    """
    JSON (texte ou dict) -> (kind, objet métier). Le champ "kind" choisit
    le modèle ; les polyèdres sont reconstruits par double description.
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as err:
            raise InputError(f"JSON invalide : {err.msg}", line=err.lineno, column=err.colno) from err
    if not isinstance(data, dict):
        raise InputError("certificat : objet JSON attendu")
    kind = data.get("kind")
    model = CERTIFICATE_MODELS.get(kind)
    if model is None:
        raise InputError("type de certificat inconnu", kind=kind, expected=sorted(CERTIFICATE_MODELS))
    try:
        parsed = model.model_validate(data)
    except ValidationError as err:
        first = err.errors()[0]
        raise InputError(
            "certificat invalide",
            field=".".join(str(x) for x in first["loc"]),
            reason=first["msg"],
        ) from err
    return kind, parsed.to_domain()


def certificate_to_json(cert) -> dict[str, Any]:
    for domain, model in (
        (ReductionCertificate, ReductionCertificateIO),
        (ComplementCertificate, ComplementCertificateIO),
        (HyperplaneCertificate, HyperplaneCertificateIO),
        (GroupRep, GroupRepIO),
    ):
        if isinstance(cert, domain):
            return model.from_domain(cert).model_dump(mode="json")
    raise TypeError(f"certificat non sérialisable : {type(cert).__name__}")


# =========================
# REQUEST BODIES (API)
# =========================

class ComplementRequest(GermRequest):
    t: Rational
    r: int = Field(default=1, ge=1)


class HyperplaneRequest(GermRequest):
    t: Rational
    certificate: ReductionCertificateIO | None = None


class VerifyRequest(StrictModel):
    germ: GermIn
    certificate: dict[str, Any]
    t: Rational | None = None


# =========================
# OUTPUT SCHEMAS
# =========================

class VerifyOut(StrictModel):
    kind: str
    ok: bool
    clause: str | None = None
