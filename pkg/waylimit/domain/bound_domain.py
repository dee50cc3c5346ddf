from __future__ import annotations

import math

from pydantic import BaseModel, Field, model_validator


class BoundReport(BaseModel):
    """All closed-form infidelity lower bounds for one (θ, Ψ, σ) configuration."""

    theta: float
    psi: float
    sigma: float = Field(ge=0.0)
    bound_main: float = Field(ge=0.0, le=1.0)
    bound_alt: float = Field(ge=0.0, le=1.0)
    bound_alt_simplified: float = Field(ge=0.0, le=1.0)
    v_norm: float = Field(ge=0.0, le=1.0 + 1e-12)
    w_norm: float = Field(ge=0.0, le=1.0 + 1e-12)
    two_gamma: float = Field(ge=0.0, le=math.pi)

    @model_validator(mode="after")
    def _simplified_is_weaker(self) -> "BoundReport":
        if self.bound_alt_simplified > self.bound_alt + 1e-12:
            raise ValueError("bound_alt_simplified exceeds bound_alt")
        return self


class SweepRow(BaseModel):
    psi: float
    bound_main: float
    bound_alt: float
    bound_alt_simplified: float


class BoundsRequest(BaseModel):
    theta: float = Field(ge=0.0, le=math.pi)
    psi: float = Field(ge=0.0, le=math.pi)
    sigma: float = Field(ge=0.0)


class SweepRequest(BaseModel):
    theta: float = Field(ge=0.0, le=math.pi)
    sigma: float = Field(ge=0.0)
    points: int = Field(default=101, ge=2)
