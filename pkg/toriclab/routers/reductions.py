from __future__ import annotations

from fastapi import APIRouter

from toriclab.routers.germs import germ_from, guarded
from toriclab.schemas.germs import GermRequest, TRequest
from toriclab.schemas.reductions import (
    GermImageOut,
    GroupRepIO,
    QFactorialOut,
    ReductionCertificateIO,
    SeriesCheck,
    SeriesRequest,
)
from toriclab.services.reduction import alc_reduce_germ, germ_reduce, series_dictionary

router = APIRouter(prefix="/reductions", tags=["reductions"])


@router.post("/reduce", response_model=ReductionCertificateIO)
def reduce(payload: TRequest):
    with guarded(payload):
        g = germ_from(payload)
        return ReductionCertificateIO.from_domain(germ_reduce(g, payload.t))


@router.post("/alc", response_model=GermImageOut)
def alc(payload: GermRequest):
    with guarded(payload):
        return GermImageOut.from_domain(alc_reduce_germ(germ_from(payload)))


@router.post("/series", response_model=QFactorialOut)
def series(payload: SeriesRequest):
    with guarded(payload):
        report = series_dictionary(germ_from(payload), payload.ts)
        group = report.reduction_group
        return QFactorialOut.from_domain(
            report.context,
            checks=[SeriesCheck(t=str(t), series=s, ct=c) for t, s, c in report.checks],
            reduction_group=GroupRepIO.from_domain(group) if group else None,
        )
