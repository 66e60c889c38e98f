from fastapi import APIRouter

from toriclab import __version__
from toriclab.core.config import settings
from toriclab.core.limits import get_limits

router = APIRouter(prefix="/meta", tags=["meta"])


@router.get("/health")
def health():
    return {"status": "ok", "name": settings.APP_NAME, "version": __version__}


@router.get("/limits")
def limits():
    """Plafonds d'énumération effectifs (surchargés par requête via cap_cells / cap_index)."""
    return get_limits()
