from __future__ import annotations

from fastapi import APIRouter, HTTPException, status

from waylimit.core.logger import log_info
from waylimit.domain.bound_domain import BoundReport, BoundsRequest, SweepRequest, SweepRow
from waylimit.services.bounds_service import BoundsService

router = APIRouter(prefix="/bounds", tags=["bounds"])

service = BoundsService()


@router.post("", status_code=status.HTTP_200_OK, response_model=BoundReport)
def evaluate_bounds(payload: BoundsRequest) -> BoundReport:
    log_info("bounds request", theta=payload.theta, psi=payload.psi, sigma=payload.sigma)
    return service.report(payload.theta, payload.psi, payload.sigma)


@router.post("/sweep", status_code=status.HTTP_200_OK, response_model=list[SweepRow])
def sweep_bounds(payload: SweepRequest) -> list[SweepRow]:
    log_info("sweep request", theta=payload.theta, sigma=payload.sigma, points=payload.points)
    try:
        return service.sweep(payload.theta, payload.sigma, payload.points)
    except ValueError as e:
        if str(e) == "points_too_small":
            raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail="points must be at least 2")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail="failed to build sweep")
