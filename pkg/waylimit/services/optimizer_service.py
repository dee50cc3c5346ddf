from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from waylimit.core.logger import log_error, log_info
from waylimit.domain.channel_domain import FidelityOptions, Implementation
from waylimit.domain.gate_domain import ConservedLaw, GateSpec
from waylimit.domain.model_domain import (
    CommutantStructure,
    DescentResult,
    OptimizationResult,
    OptimizerOptions,
    RestartSummary,
)
from waylimit.services import linalg
from waylimit.services.channel_service import ChannelService
from waylimit.services.model_service import ModelService


Objective = Callable[[np.ndarray], float]


def _hermitian_from_params(params: np.ndarray, k: int) -> np.ndarray:
    """k² reals → Hermitian k×k: diagonal first, then (re, im) of the upper triangle."""
    h = np.diag(params[:k]).astype(complex)
    rows, cols = np.triu_indices(k, 1)
    off = params[k:].reshape(-1, 2)
    h[rows, cols] = off[:, 0] + 1j * off[:, 1]
    h[cols, rows] = off[:, 0] - 1j * off[:, 1]
    return h


def _normalized_state(params: np.ndarray) -> np.ndarray:
    vec = params[0::2] + 1j * params[1::2]
    norm = np.linalg.norm(vec)
    if norm < 1e-12:
        vec = np.zeros_like(vec)
        vec[0] = 1.0
        return vec
    return vec / norm


class OptimizerService:
    """Derivative-free search for high-fidelity implementations inside the commutant."""

    def __init__(self, channel: ChannelService | None = None, models: ModelService | None = None) -> None:
        self.channel = channel or ChannelService()
        self.models = models or ModelService(self.channel.bloch)

    def coordinate_descent(
        self, objective: Objective, x0: np.ndarray, options: OptimizerOptions
    ) -> DescentResult:
        """Try ±step along each coordinate; shrink the step after a sweep without improvement."""
        x = np.array(x0, dtype=float)
        fx = objective(x)
        evaluations = 1
        step = options.initial_step
        while step >= options.min_step and evaluations < options.budget:
            improved = False
            for i in range(x.size):
                for sign in (1.0, -1.0):
                    if evaluations >= options.budget:
                        break
                    trial = x.copy()
                    trial[i] += sign * step
                    value = objective(trial)
                    evaluations += 1
                    if value < fx:
                        x, fx, improved = trial, value, True
                        break
            if not improved:
                step *= options.shrink
        return DescentResult(x=x, value=fx, evaluations=evaluations, final_step=step)

    def _search_options(self, options: OptimizerOptions) -> FidelityOptions:
        grid_zeta, grid_delta = options.search_grid
        return FidelityOptions(grid_zeta=grid_zeta, grid_delta=grid_delta, refine=False)

    def _run_restarts(
        self,
        count: int,
        options: OptimizerOptions,
        restart: Callable[[int], tuple[Implementation, float, int]],
        target: GateSpec,
    ) -> OptimizationResult:
        if options.workers > 1:
            with ThreadPoolExecutor(max_workers=options.workers) as pool:
                outcomes = list(pool.map(restart, range(count)))
        else:
            outcomes = [restart(idx) for idx in range(count)]

        summaries: list[RestartSummary] = []
        results = []
        for idx, (impl, search_fidelity, evaluations) in enumerate(outcomes):
            fidelity = self.channel.worst_case_fidelity(impl, target)
            results.append((impl, fidelity))
            summaries.append(
                RestartSummary(
                    index=idx,
                    search_fidelity=search_fidelity,
                    worst_fidelity=fidelity.worst_fidelity,
                    evaluations=evaluations,
                )
            )
        # ties go to the lowest index
        best_idx = max(range(count), key=lambda i: (summaries[i].worst_fidelity, -i))
        best_impl, best_fidelity = results[best_idx]
        total = sum(s.evaluations for s in summaries)
        log_info(
            "optimizer finished",
            restarts=count,
            best_restart=best_idx,
            worst_fidelity=best_fidelity.worst_fidelity,
            evaluations=total,
        )
        return OptimizationResult(
            best=best_impl,
            fidelity=best_fidelity,
            best_restart=best_idx,
            restarts=summaries,
            total_evaluations=total,
        )

    # -- commutant search ------------------------------------------------------

    def _block_implementation(
        self, structure: CommutantStructure, x: np.ndarray, ancilla_dim: int
    ) -> Implementation:
        blocks = []
        offset = 0
        for cluster in structure.clusters:
            k = cluster.dim
            blocks.append(linalg.unitary_exp(_hermitian_from_params(x[offset:offset + k * k], k), 1.0))
            offset += k * k
        return Implementation(
            ancilla_dim=ancilla_dim,
            ancilla_state=_normalized_state(x[offset:]),
            joint_unitary=self.models.assemble_block_unitary(structure, blocks),
        )

    def optimize_implementation(
        self,
        law: ConservedLaw,
        target: GateSpec,
        ancilla_dim: int,
        options: OptimizerOptions | None = None,
    ) -> OptimizationResult:
        options = options or OptimizerOptions()
        if ancilla_dim < 1 or law.ancilla_dim != ancilla_dim:
            log_error(
                "ancilla dimension does not match the law", ancilla_dim=ancilla_dim, law_dim=law.ancilla_dim
            )
            raise ValueError("dimension_mismatch")
        structure = self.models.commutant_blocks(law)
        n_params = sum(dim * dim for dim in structure.block_dims) + 2 * ancilla_dim
        search = self._search_options(options)

        def objective(x: np.ndarray) -> float:
            impl = self._block_implementation(structure, x, ancilla_dim)
            return 1.0 - self.channel.worst_case_fidelity(impl, target, search).worst_fidelity

        def restart(idx: int) -> tuple[Implementation, float, int]:
            rng = np.random.default_rng([options.seed, idx])
            descent = self.coordinate_descent(objective, rng.normal(size=n_params), options)
            impl = self._block_implementation(structure, descent.x, ancilla_dim)
            return impl, 1.0 - descent.value, descent.evaluations

        return self._run_restarts(options.restarts, options, restart, target)

    # -- rotationally invariant search ----------------------------------------

    def optimize_spin_invariant(
        self, big_n: int, target: GateSpec, options: OptimizerOptions | None = None
    ) -> OptimizationResult:
        """Search over (φ₊, φ₋) and the ancilla state for U = e^{iφ₊}P₊ + e^{iφ₋}P₋."""
        options = options or OptimizerOptions()
        p_plus, p_minus = self.models.irrep_projectors(big_n)
        dim = big_n + 1
        search = self._search_options(options)

        def build(x: np.ndarray) -> Implementation:
            u = np.exp(1j * x[0]) * p_plus + np.exp(1j * x[1]) * p_minus
            return Implementation(ancilla_dim=dim, ancilla_state=_normalized_state(x[2:]), joint_unitary=u)

        def objective(x: np.ndarray) -> float:
            return 1.0 - self.channel.worst_case_fidelity(build(x), target, search).worst_fidelity

        def restart(idx: int) -> tuple[Implementation, float, int]:
            rng = np.random.default_rng([options.seed, idx])
            x0 = np.concatenate([rng.uniform(0.0, 2 * np.pi, size=2), rng.normal(size=2 * dim)])
            descent = self.coordinate_descent(objective, x0, options)
            return build(descent.x), 1.0 - descent.value, descent.evaluations

        return self._run_restarts(options.restarts, options, restart, target)
