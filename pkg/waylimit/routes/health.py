from __future__ import annotations

from fastapi import APIRouter

from waylimit.core.config import settings

router = APIRouter(tags=["health"])


@router.get("/health")
def health() -> dict:
    """Liveness plus the tolerances bound checks in this process are judged against."""
    return {
        "status": "ok",
        "environment": settings.environment,
        "seed": settings.seed,
        "bound_slack": settings.bound_slack,
        "fidelity_grid": [settings.fidelity_grid_zeta, settings.fidelity_grid_delta],
    }
