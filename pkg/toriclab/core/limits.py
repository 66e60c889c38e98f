"""
toriclab/core/limits.py
=======================
Source de vérité des plafonds d'énumération.

    cap_cells  : nombre max de cellules d'une boîte de réseau balayée
    cap_index  : indice n max essayé par global_complement

Les valeurs par défaut viennent de `settings` ; un run (CLI, requête HTTP)
peut les surcharger localement avec `use_caps(...)`.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Iterator

from toriclab.core.config import settings
from toriclab.core.errors import BoxTooLarge, CapExceeded

logger = logging.getLogger(__name__)


# ============================================================
# LIMITES
# ============================================================

ENUMERATION_LIMITS: dict[str, int] = {
    "cap_cells": settings.CAP_CELLS,
    "cap_index": settings.CAP_INDEX,
    "oracle_radius": settings.ORACLE_RADIUS,
}

_overrides: ContextVar[dict[str, int]] = ContextVar("toriclab_caps", default={})


# ============================================================
# ACCESSEURS
# ============================================================

def get_limits() -> dict[str, int]:
    """Plafonds effectifs (défauts + surcharges du contexte courant)."""
    return {**ENUMERATION_LIMITS, **_overrides.get()}


def get_limit(key: str) -> int:
    return get_limits()[key]


@contextmanager
def use_caps(**caps: Any) -> Iterator[dict[str, int]]:
    """Surcharge temporaire ; les valeurs None sont ignorées."""
    update = {k: int(v) for k, v in caps.items() if v is not None}
    unknown = set(update) - set(ENUMERATION_LIMITS)
    if unknown:
        raise KeyError(f"plafonds inconnus : {sorted(unknown)}")
    token = _overrides.set({**_overrides.get(), **update})
    try:
        yield get_limits()
    finally:
        _overrides.reset(token)


# ============================================================
# HELPERS DE VÉRIFICATION
# ============================================================

def check_cell_budget(cells: int) -> None:
    limit = get_limit("cap_cells")
    if cells > limit:
        raise BoxTooLarge(
            f"Boîte de {cells} cellules au-delà du plafond {limit}.",
            limit=limit,
            requested=cells,
        )
    if cells > limit // 10:
        logger.warning("[LIMITS] boîte de %s cellules (plafond %s)", cells, limit)


def check_index_budget(n: int) -> None:
    limit = get_limit("cap_index")
    if n > limit:
        raise CapExceeded(
            f"Indice {n} au-delà du plafond {limit}.",
            limit=limit,
            requested=n,
        )
