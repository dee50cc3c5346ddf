from __future__ import annotations

import time

from fastapi import FastAPI, Request

from waylimit.core.config import settings
from waylimit.core.logger import log_info, log_warning
from waylimit.routes.bounds_routes import router as bounds_router
from waylimit.routes.health import router as health_router
from waylimit.routes.verify_routes import router as verify_router


app = FastAPI(title="Waylimit Bound Service", version="0.1.0")


# Root endpoint
@app.get("/")
def read_root():
    """Root endpoint - API information."""
    return {
        "message": "Waylimit API",
        "version": "0.1.0",
        "status": "running",
        "environment": settings.environment,
        "endpoints": {
            "docs": "/docs",
            "bounds": "/bounds",
            "sweep": "/bounds/sweep",
            "verify": "/verify",
        },
    }


# Include routers
app.include_router(health_router)
app.include_router(bounds_router)
app.include_router(verify_router)


@app.middleware("http")
async def logging_middleware(request: Request, call_next):
    start = time.perf_counter()
    response = await call_next(request)
    log = log_warning if response.status_code >= 400 else log_info
    log(
        "http request",
        method=request.method,
        path=request.url.path,
        status_code=response.status_code,
        duration_ms=round(1000.0 * (time.perf_counter() - start), 3),
    )
    return response
