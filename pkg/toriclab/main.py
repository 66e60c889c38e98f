from contextlib import asynccontextmanager
import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from toriclab.core.config import settings
from toriclab.core.limits import get_limits
from toriclab.routers.germs import router as germs_router
from toriclab.routers.reductions import router as reductions_router
from toriclab.routers.complements import router as complements_router
from toriclab.routers.meta import router as meta_router

logging.basicConfig(
    level=settings.LOG_LEVEL.upper(),
    format="%(asctime)s %(levelname)s %(name)s %(message)s",
)


# ============================================================
# Lifespan (startup / shutdown)
# ============================================================

@asynccontextmanager
async def lifespan(app: FastAPI):
    print(f"🚀 Startup: {settings.APP_NAME} {settings.APP_VERSION}")
    print(f"🚀 Startup: plafonds {get_limits()}")
    yield
    print("👋 Shutdown")


app = FastAPI(title=settings.APP_NAME, version=settings.APP_VERSION, lifespan=lifespan)

# ============================================================
# CORS
# ============================================================
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# ============================================================
# Routers
# ============================================================
app.include_router(meta_router)
app.include_router(germs_router)
app.include_router(reductions_router)
app.include_router(complements_router)


@app.get("/")
def root():
    return {"status": "ok", "service": settings.APP_NAME}
