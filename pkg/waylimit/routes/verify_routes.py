from __future__ import annotations

from fastapi import APIRouter, HTTPException, status

from waylimit.core.logger import log_info
from waylimit.domain.experiment_domain import VerificationReport, VerifyRequest
from waylimit.services.verification_service import VerificationService

router = APIRouter(prefix="/verify", tags=["verify"])

service = VerificationService()


@router.post("", status_code=status.HTTP_200_OK, response_model=VerificationReport)
def run_suite(payload: VerifyRequest) -> VerificationReport:
    """Run one property suite; a failed property is reported in `passed`, not as an HTTP error."""
    log_info("verify request", suite=payload.suite, samples=payload.samples, seed=payload.seed)
    try:
        return service.run(payload.suite, payload.samples, payload.seed)
    except ValueError as e:
        if str(e) in ("unknown_suite", "points_too_small"):
            raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail="verification failed")
