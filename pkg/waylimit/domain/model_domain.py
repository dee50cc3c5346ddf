from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from waylimit.core.config import settings
from waylimit.core.logger import log_error
from waylimit.domain.channel_domain import FidelityResult, Implementation


class EigenCluster(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: float
    basis: np.ndarray  # orthonormal columns spanning the eigenspace

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])


class CommutantStructure(BaseModel):
    """Eigenspaces of the total conserved quantity; [U, L] = 0 iff U is block diagonal here."""

    model_config = ConfigDict(frozen=True)

    clusters: list[EigenCluster]
    total_dim: int

    @property
    def block_dims(self) -> list[int]:
        return [cluster.dim for cluster in self.clusters]


class JCParams(BaseModel):
    detuning: float = 0.0
    coupling: float = Field(default=1.0, ge=0.0)
    time: float = 0.0
    n_max: int = Field(default=8, ge=1)


class SpinAncilla(BaseModel):
    big_n: int = Field(ge=1)
    direction: tuple[float, float, float] = (0.0, 0.0, 1.0)


class ImplementationFactory(BaseModel):
    """Joint unitary waiting for an ancilla state.

    ``tail_levels`` > 0 rejects states with weight above ``tail_tolerance`` on the
    top ``tail_levels`` basis states (truncated Fock spaces).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    joint_unitary: np.ndarray
    ancilla_dim: int
    tail_levels: int = 0
    tail_tolerance: float = Field(default_factory=lambda: settings.jc_tail_tol)

    @field_validator("joint_unitary", mode="before")
    @classmethod
    def _as_array(cls, value: object) -> np.ndarray:
        arr = np.array(value, dtype=complex)
        arr.setflags(write=False)
        return arr

    def __call__(self, ancilla_state: np.ndarray) -> Implementation:
        state = np.asarray(ancilla_state, dtype=complex)
        if self.tail_levels > 0:
            top = slice(self.ancilla_dim - self.tail_levels, self.ancilla_dim)
            weights = np.abs(state[top]) ** 2 if state.ndim == 1 else np.diag(state)[top].real
            if float(np.sum(weights)) > self.tail_tolerance:
                log_error("ancilla state reaches the truncation edge", tail_weight=float(np.sum(weights)))
                raise ValueError("truncation_tail")
        return Implementation(
            ancilla_dim=self.ancilla_dim, ancilla_state=state, joint_unitary=self.joint_unitary
        )


class OptimizerOptions(BaseModel):
    restarts: int = Field(default=8, ge=1)
    seed: int = Field(default_factory=lambda: settings.seed)
    budget: int = Field(default_factory=lambda: settings.optimizer_budget, ge=1)
    initial_step: float = Field(default_factory=lambda: settings.optimizer_initial_step, gt=0.0)
    shrink: float = Field(default_factory=lambda: settings.optimizer_shrink, gt=0.0, lt=1.0)
    min_step: float = Field(default_factory=lambda: settings.optimizer_min_step, gt=0.0)
    search_grid: tuple[int, int] = Field(
        default_factory=lambda: (settings.optimizer_search_grid_zeta, settings.optimizer_search_grid_delta)
    )
    workers: int = Field(default_factory=lambda: settings.optimizer_workers, ge=1)


class DescentResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: np.ndarray
    value: float
    evaluations: int
    final_step: float


class RestartSummary(BaseModel):
    index: int
    search_fidelity: float
    worst_fidelity: float
    evaluations: int


class OptimizationResult(BaseModel):
    best: Implementation
    fidelity: FidelityResult
    best_restart: int
    restarts: list[RestartSummary]
    total_evaluations: int
