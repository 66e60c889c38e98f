"""
toriclab/core/config.py
=======================
Configuration unique du projet (variables d'environnement + .env).

Toutes les variables sont préfixées par TORICLAB_ :
    TORICLAB_CAP_CELLS      : plafond de cellules pour un balayage de boîte (défaut 10^7)
    TORICLAB_CAP_INDEX      : plafond de l'indice n des compléments (défaut 10^4)
    TORICLAB_FIXTURES       : racine des fichiers golden (défaut tests/fixtures)
    TORICLAB_ORACLE_RADIUS  : rayon de balayage le long de σ0 dans oracle_mld
"""

from __future__ import annotations

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


def _split_csv(value: str) -> list[str]:
    return [x.strip() for x in value.split(",") if x.strip()]


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="TORICLAB_", env_file=".env", extra="ignore")

    # ============================================================
    # App
    # ============================================================
    APP_NAME: str = "TORICLAB API"
    APP_VERSION: str = "0.1.0"
    CORS_ORIGINS: str = ""
    LOG_LEVEL: str = "WARNING"

    # ============================================================
    # Plafonds d'énumération
    # ============================================================
    CAP_CELLS: int = 10_000_000
    CAP_INDEX: int = 10_000
    ORACLE_RADIUS: int = 3

    # ============================================================
    # Fichiers golden
    # ============================================================
    FIXTURES: Path = Path("tests/fixtures")

    @property
    def cors_origins(self) -> list[str]:
        return _split_csv(self.CORS_ORIGINS)

    @property
    def golden_dir(self) -> Path:
        return self.FIXTURES / "golden"


settings = Settings()
