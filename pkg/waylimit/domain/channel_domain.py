from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from waylimit.core.config import settings
from waylimit.domain.gate_domain import ConservedLaw
from waylimit.services import linalg


class Implementation(BaseModel):
    """α = (ρ_A, U): ancilla state (pure vector or density matrix) and joint unitary on S⊗A."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ancilla_dim: int = Field(ge=1)
    ancilla_state: np.ndarray
    joint_unitary: np.ndarray

    @field_validator("ancilla_state", "joint_unitary", mode="before")
    @classmethod
    def _as_array(cls, value: object) -> np.ndarray:
        arr = np.array(value, dtype=complex)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check(self) -> "Implementation":
        d = self.ancilla_dim
        if self.joint_unitary.shape != (2 * d, 2 * d):
            raise ValueError("joint_unitary must act on a qubit times the ancilla")
        if not linalg.is_unitary(self.joint_unitary, settings.unitary_tol):
            raise ValueError("joint_unitary is not unitary")
        state = self.ancilla_state
        if state.ndim == 1:
            if state.shape != (d,) or abs(np.linalg.norm(state) - 1.0) > settings.state_tol:
                raise ValueError("ancilla vector must have unit norm and length ancilla_dim")
        elif state.ndim == 2:
            if state.shape != (d, d) or not linalg.is_hermitian(state, settings.density_tol):
                raise ValueError("ancilla density matrix must be Hermitian of size ancilla_dim")
            if abs(np.trace(state).real - 1.0) > settings.state_tol:
                raise ValueError("ancilla density matrix must have unit trace")
            if np.linalg.eigvalsh(0.5 * (state + linalg.dagger(state)))[0] < -settings.density_tol:
                raise ValueError("ancilla density matrix must be positive")
        else:
            raise ValueError("ancilla_state must be a vector or a matrix")
        return self

    @property
    def is_pure(self) -> bool:
        return self.ancilla_state.ndim == 1

    def ancilla_density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.ancilla_state, np.conj(self.ancilla_state))
        return np.array(self.ancilla_state)


class FidelityOptions(BaseModel):
    grid_zeta: int = Field(default_factory=lambda: settings.fidelity_grid_zeta, ge=2)
    grid_delta: int = Field(default_factory=lambda: settings.fidelity_grid_delta, ge=1)
    tolerance: float = Field(default_factory=lambda: settings.fidelity_tol, gt=0.0)
    max_refinements: int = Field(default_factory=lambda: settings.fidelity_max_refinements, ge=0)
    starts: int = Field(default_factory=lambda: settings.fidelity_refine_starts, ge=1)
    refine: bool = True


class ArgminState(BaseModel):
    """|ψ⟩ = cos ζ|0⟩ + e^{iδ} sin ζ|1⟩."""

    zeta: float = Field(ge=0.0, le=math.pi / 2)
    delta: float = Field(ge=0.0, lt=2 * math.pi)

    def vector(self) -> np.ndarray:
        return np.array([math.cos(self.zeta), np.exp(1j * self.delta) * math.sin(self.zeta)])


class FidelityResult(BaseModel):
    worst_fidelity: float = Field(ge=0.0, le=1.0)
    argmin_state: ArgminState
    grid_resolution: tuple[int, int]
    refinement_iterations: int
    certified_gap: float = Field(ge=0.0)

    @property
    def infidelity(self) -> float:
        return 1.0 - self.worst_fidelity**2


class DeviationReport(BaseModel):
    mean_square: float = Field(ge=0.0)
    variance: float = Field(ge=0.0)
    commutator_expectation: complex
    robertson_slack: float

    @field_serializer("commutator_expectation")
    def _serialize_complex(self, value: complex) -> list[float]:
        return [value.real, value.imag]


class LeakageReport(BaseModel):
    """‖A^j_i‖² for the basis ξ_j = U_S†χ_j, alongside the fidelities F(ξ_j)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    leak_01: float = Field(ge=0.0)  # ‖A⁰₁‖²
    leak_10: float = Field(ge=0.0)  # ‖A¹₀‖²
    fidelity_xi0: float
    fidelity_xi1: float
    xi0: np.ndarray
    xi1: np.ndarray


class RotatedDeviations(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    d1: np.ndarray
    d2: np.ndarray
    identity_residuals: tuple[float, float]
    v: tuple[float, float, float]
    w: tuple[float, float, float]


class PurifiedState(BaseModel):
    """|A′⟩ on A⊗B with Tr_B |A′⟩⟨A′| = ρ_A."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    vector: np.ndarray
    ancilla_dim: int
    aux_dim: int


class ExtendedImplementation(BaseModel):
    implementation: Implementation
    law: ConservedLaw | None = None
    aux_dim: int
