from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, field_serializer

from waylimit.core.config import settings


SuiteName = Literal["normformula", "robertson", "deviation", "appendix", "dominance"]
OutputFormat = Literal["json", "csv"]


class RunConfig(BaseModel):
    """Per-invocation CLI settings; tolerance overrides never touch the global settings."""

    seed: int = Field(default_factory=lambda: settings.seed)
    output_path: str | None = None  # None → stdout
    format: OutputFormat = "json"
    tol_bound: float = Field(default_factory=lambda: settings.bound_slack, gt=0.0)
    tol_fidelity: float = Field(default_factory=lambda: settings.fidelity_tol, gt=0.0)


class PropertyCheck(BaseModel):
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    samples: int


class VerificationReport(BaseModel):
    suite: SuiteName
    samples: int
    seed: int
    checks: list[PropertyCheck]
    passed: bool


class VerifyRequest(BaseModel):
    suite: SuiteName
    samples: int = Field(default=100, ge=1)
    seed: int = Field(default_factory=lambda: settings.seed)


class JCExperimentRecord(BaseModel):
    gate: str
    alpha: complex
    n_max: int
    detuning: float
    coupling: float
    time: float
    psi: float
    worst_fidelity: float
    infidelity: float
    sigma_ancilla: float
    bound_main: float
    bound_alt: float
    conservation_residual: float
    bound_respected: bool

    @field_serializer("alpha")
    def _serialize_alpha(self, value: complex) -> list[float]:
        return [value.real, value.imag]


class SpinExperimentRecord(BaseModel):
    big_n: int
    gate: str
    restarts: int
    seed: int
    worst_fidelity: float
    infidelity: float
    bound_rotational: float
    gap_to_bound: float
    phase_scan_min_infidelity: float
    phase_scan_points: int
    best_restart: int
    total_evaluations: int
    conservation_residual: float
    bound_respected: bool


class OptimizeExperimentRecord(BaseModel):
    law: str
    gate: str
    ancilla_dim: int
    restarts: int
    seed: int
    psi: float
    worst_fidelity: float
    infidelity: float
    sigma_ancilla: float
    bound_main: float
    bound_alt: float
    gap_to_bound: float
    best_restart: int
    total_evaluations: int
    conservation_residual: float
    bound_respected: bool
