from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator

from fastapi import APIRouter, HTTPException

from toriclab.core.errors import (
    EXIT_CAP,
    EXIT_INPUT,
    EXIT_INTERNAL,
    EXIT_NEGATIVE,
    NotRCartier,
    NotSemiample,
    ToricLabError,
)
from toriclab.core.limits import use_caps
from toriclab.schemas.common import vec_in, vec_out
from toriclab.schemas.germs import (
    CtOut,
    DiscrepancyOut,
    DiscrepancyRequest,
    GermIn,
    GermRequest,
    MldOut,
    MldRequest,
    MomentOut,
    TRequest,
    ValidateOut,
)
from toriclab.services.toric_germ import (
    FibrationGerm,
    base_is_point,
    check_Ct,
    check_semiample,
    log_discrepancy,
    mld_fiber,
    mld_total,
    moment_data,
)

router = APIRouter(prefix="/germs", tags=["germs"])

STATUS_BY_EXIT = {
    EXIT_NEGATIVE: 409,
    EXIT_INPUT: 422,
    EXIT_CAP: 413,
    EXIT_INTERNAL: 500,
}


# =========================================================
# Helpers (partagés par les autres routers)
# =========================================================
@contextmanager
def guarded(payload: GermRequest | None = None) -> Iterator[None]:
    """Plafonds de la requête + traduction ToricLabError -> HTTPException."""
    caps = {}
    if payload is not None:
        caps = {"cap_cells": payload.cap_cells, "cap_index": payload.cap_index}
    try:
        with use_caps(**caps):
            yield
    except ToricLabError as err:
        raise HTTPException(STATUS_BY_EXIT[err.exit_code], detail=err.to_detail()) from err


def germ_from(payload: GermRequest) -> FibrationGerm:
    return payload.germ.to_domain()


# =========================================================
# Endpoints
# =========================================================
@router.post("/validate", response_model=ValidateOut)
def validate(payload: GermRequest):
    with guarded(payload):
        g = germ_from(payload)
        return ValidateOut(
            germ=GermIn.from_domain(g),
            dim=g.dim,
            base_dim=g.Nbar.dim,
            cones=len(g.fan),
            affine=g.is_affine,
        )


@router.post("/moment", response_model=MomentOut)
def moment(payload: GermRequest):
    with guarded(payload):
        g = germ_from(payload)
        data = moment_data(g)
        try:
            psi = check_semiample(g).psi
        except (NotRCartier, NotSemiample):
            psi = None
        return MomentOut.from_domain(data, psi)


@router.post("/mld", response_model=MldOut)
def mld(payload: MldRequest):
    with guarded(payload):
        g = germ_from(payload)
        value, e = mld_fiber(g) if payload.scope == "fiber" else mld_total(g)
        return MldOut(scope=payload.scope, mld=str(value), minimizer=vec_out(e))


@router.post("/check-ct", response_model=CtOut)
def check_ct(payload: TRequest):
    with guarded(payload):
        g = germ_from(payload)
        return CtOut.from_domain(check_Ct(g, payload.t))


@router.post("/discrepancy", response_model=DiscrepancyOut)
def discrepancy(payload: DiscrepancyRequest):
    with guarded(payload):
        g = germ_from(payload)
        return DiscrepancyOut.from_domain(log_discrepancy(g, vec_in(payload.e)))


@router.post("/base-is-point")
def base_point(payload: GermRequest):
    with guarded(payload):
        return {"base_is_point": base_is_point(germ_from(payload))}
