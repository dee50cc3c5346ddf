from __future__ import annotations

import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from waylimit.services import linalg


Vector3 = tuple[float, float, float]

CONVENTION_AXIS: Vector3 = (0.0, 0.0, 1.0)


class GateSpec(BaseModel):
    """U_S = e^{iφ}(cos(θ/2)I + i sin(θ/2) u·σ)."""

    model_config = ConfigDict(frozen=True)

    phi: float = Field(ge=0.0, lt=2 * math.pi)
    theta: float = Field(ge=0.0, le=math.pi)
    axis: Vector3 = CONVENTION_AXIS

    @model_validator(mode="before")
    @classmethod
    def _identity_axis(cls, data: Any) -> Any:
        # a θ = 0 gate has no rotation axis of its own
        if isinstance(data, dict) and data.get("theta") == 0:
            data = {**data, "axis": CONVENTION_AXIS}
        return data

    @model_validator(mode="after")
    def _check_axis(self) -> "GateSpec":
        if abs(float(np.linalg.norm(self.axis)) - 1.0) > 1e-12:
            raise ValueError("axis must be a unit vector")
        return self

    @property
    def axis_vector(self) -> np.ndarray:
        return np.array(self.axis, dtype=float)


class ConservedLaw(BaseModel):
    """Qubit conserved quantity in standard form (b, c, l) plus the ancilla operator L_A."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    b: float
    c: float = Field(gt=0.0)
    direction: Vector3
    ancilla_operator: np.ndarray

    @field_validator("ancilla_operator", mode="before")
    @classmethod
    def _as_hermitian(cls, value: object) -> np.ndarray:
        arr = np.array(value, dtype=complex)
        if arr.ndim != 2 or not linalg.is_hermitian(arr):
            raise ValueError("ancilla_operator must be a Hermitian matrix")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_direction(self) -> "ConservedLaw":
        if abs(float(np.linalg.norm(self.direction)) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        return self

    @property
    def direction_vector(self) -> np.ndarray:
        return np.array(self.direction, dtype=float)

    @property
    def ancilla_dim(self) -> int:
        return int(self.ancilla_operator.shape[0])

    def qubit_operator(self) -> np.ndarray:
        """L_S = (b−c)I + c(l·σ)."""
        return (self.b - self.c) * linalg.PAULI_I + self.c * linalg.pauli_vector_operator(self.direction)

    def total_operator(self) -> np.ndarray:
        """L = L_S⊗I_A + I_S⊗L_A."""
        identity_a = np.eye(self.ancilla_dim, dtype=complex)
        return np.kron(self.qubit_operator(), identity_a) + np.kron(linalg.PAULI_I, self.ancilla_operator)


class GeometryReport(BaseModel):
    psi: float = Field(ge=0.0, le=math.pi)
    two_gamma: float = Field(ge=0.0, le=math.pi)
    s: float = Field(ge=0.0, le=1.0)


class RotatedFrame(BaseModel):
    """Pauli operators σ′ = (l1, l2, l3) in the frame where l3 = l·σ and u′ has no second component."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    l1: np.ndarray
    l2: np.ndarray
    l3: np.ndarray
    u_prime: Vector3

    def operator(self, a: np.ndarray) -> np.ndarray:
        """a·σ′."""
        a1, a2, a3 = np.asarray(a, dtype=float)
        return a1 * self.l1 + a2 * self.l2 + a3 * self.l3
