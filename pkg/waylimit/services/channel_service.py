from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize

from waylimit.core.config import settings
from waylimit.core.logger import log_debug, log_error
from waylimit.domain.channel_domain import (
    ArgminState,
    DeviationReport,
    ExtendedImplementation,
    FidelityOptions,
    FidelityResult,
    Implementation,
    LeakageReport,
    PurifiedState,
    RotatedDeviations,
)
from waylimit.domain.gate_domain import ConservedLaw, GateSpec
from waylimit.services import linalg
from waylimit.services.bloch_service import BlochService
from waylimit.services.bounds_service import BoundsService


TWO_PI = 2 * math.pi

# |0⟩, |1⟩, |+⟩, |+i⟩: their projectors span all 2x2 operators
_INFORMATIONALLY_COMPLETE = (
    np.array([1.0, 0.0], dtype=complex),
    np.array([0.0, 1.0], dtype=complex),
    np.array([1.0, 1.0], dtype=complex) / math.sqrt(2),
    np.array([1.0, 1j], dtype=complex) / math.sqrt(2),
)


def _sphere_states(zetas: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """States cos ζ|0⟩ + e^{iδ} sin ζ|1⟩ on a (ζ, δ) mesh, shape (nζ, nδ, 2)."""
    zz, dd = np.meshgrid(zetas, deltas, indexing="ij")
    return np.stack([np.cos(zz) + 0j, np.exp(1j * dd) * np.sin(zz)], axis=-1)


def _wrap(angle: float) -> float:
    wrapped = angle % TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


def _canonical_angles(zeta: float, delta: float) -> tuple[float, float]:
    """Fold any real (ζ, δ) to the same ray with ζ ∈ [0, π/2] and δ ∈ [0, 2π)."""
    zeta = zeta % math.pi
    if zeta > 0.5 * math.pi:
        zeta, delta = math.pi - zeta, delta + math.pi
    return zeta, _wrap(delta)


def _lowest_cells(values: np.ndarray, count: int) -> list[tuple[int, int]]:
    """The `count` lowest grid cells that are local minima of their neighbourhood, δ periodic."""
    padded = np.pad(values, ((1, 1), (0, 0)), constant_values=np.inf)
    neighbours = np.stack([padded[:-2], padded[2:], np.roll(values, 1, axis=1), np.roll(values, -1, axis=1)])
    local = np.all(values <= neighbours, axis=0)
    # the poles are single states whatever δ
    local[0, 1:] = False
    local[-1, 1:] = False
    local.flat[int(np.argmin(values))] = True
    order = np.argsort(np.where(local, values, np.inf), axis=None, kind="stable")
    picked = [k for k in order[:count] if local.flat[k]]
    return [tuple(int(i) for i in np.unravel_index(int(k), values.shape)) for k in picked]


def _quadratic_form(states: np.ndarray, op: np.ndarray) -> np.ndarray:
    return np.einsum("...i,ij,...j->...", np.conj(states), op, states)


class ChannelService:
    """Implementations α = (ρ_A, U) as quantum channels on the qubit."""

    def __init__(self, bloch: BlochService | None = None, bounds: BoundsService | None = None) -> None:
        self.bloch = bloch or BlochService()
        self.bounds = bounds or BoundsService(self.bloch)

    # -- channel action ---------------------------------------------------

    def kraus_operators(self, impl: Implementation) -> np.ndarray:
        """Kraus operators (I⊗⟨k|)U(I⊗√pⱼ|aⱼ⟩), shape (count, 2, 2)."""
        d = impl.ancilla_dim
        blocks = impl.joint_unitary.reshape(2, d, 2, d)
        if impl.is_pure:
            return np.einsum("skta,a->kst", blocks, impl.ancilla_state)
        weights, vectors = np.linalg.eigh(impl.ancilla_density())
        keep = weights > 1e-15
        columns = vectors[:, keep] * np.sqrt(weights[keep])
        kraus = np.einsum("skta,aj->kjst", blocks, columns)
        return kraus.reshape(-1, 2, 2)

    def apply_channel(self, impl: Implementation, rho_s: np.ndarray) -> np.ndarray:
        """Tr_A[U(ρ_S⊗ρ_A)U†]."""
        rho_s = linalg.as_matrix(rho_s)
        if rho_s.shape != (2, 2):
            log_error("apply_channel expects a qubit density matrix", shape=rho_s.shape)
            raise ValueError("dimension_mismatch")
        joint = np.kron(rho_s, impl.ancilla_density())
        evolved = impl.joint_unitary @ joint @ linalg.dagger(impl.joint_unitary)
        return linalg.partial_trace_ancilla(evolved, 2, impl.ancilla_dim)

    # -- fidelity -----------------------------------------------------------

    def _target_kraus(self, impl: Implementation, target: GateSpec) -> np.ndarray:
        """U_S†K_k, so that F(ψ)² = Σ_k |⟨ψ|U_S†K_k|ψ⟩|²."""
        u_s = self.bloch.gate_from_spec(target)
        return np.einsum("ij,kjl->kil", linalg.dagger(u_s), self.kraus_operators(impl))

    @staticmethod
    def _fidelity_of_states(target_kraus: np.ndarray, states: np.ndarray) -> np.ndarray:
        amplitudes = np.einsum("...i,kij,...j->k...", np.conj(states), target_kraus, states)
        squared = np.sum(np.abs(amplitudes) ** 2, axis=0)
        return np.sqrt(np.clip(squared, 0.0, 1.0))

    def state_fidelity(self, impl: Implementation, target: GateSpec, psi: np.ndarray) -> float:
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (2,) or abs(np.linalg.norm(psi) - 1.0) > 1e-10:
            log_error("state_fidelity expects a normalized qubit vector", norm=float(np.linalg.norm(psi)))
            raise ValueError("invalid_state")
        return float(self._fidelity_of_states(self._target_kraus(impl, target), psi))

    def sphere_grid(self, options: FidelityOptions) -> tuple[np.ndarray, np.ndarray]:
        zetas = np.linspace(0.0, 0.5 * math.pi, options.grid_zeta)
        deltas = np.arange(options.grid_delta) * (TWO_PI / options.grid_delta)
        return zetas, deltas

    def worst_case_fidelity(
        self, impl: Implementation, target: GateSpec, options: FidelityOptions | None = None
    ) -> FidelityResult:
        """inf over pure inputs of F(ψ): exhaustive (ζ, δ) grid, then Nelder-Mead from the lowest cells."""
        options = options or FidelityOptions()
        target_kraus = self._target_kraus(impl, target)
        zetas, deltas = self.sphere_grid(options)
        values = self._fidelity_of_states(target_kraus, _sphere_states(zetas, deltas))
        iz, idel = np.unravel_index(int(np.argmin(values)), values.shape)
        grid_min = float(values[iz, idel])
        zeta, delta, best = float(zetas[iz]), float(deltas[idel]), grid_min

        iterations = 0
        if options.refine:
            starts = [(float(zetas[i]), float(deltas[j])) for i, j in _lowest_cells(values, options.starts)]
            step = (zetas[1] - zetas[0], deltas[1] - deltas[0] if len(deltas) > 1 else 0.5 * math.pi)
            refined_zeta, refined_delta, refined, iterations = self._refine(
                target_kraus, starts, step, options
            )
            if refined < best:
                zeta, delta, best = refined_zeta, refined_delta, refined

        return FidelityResult(
            worst_fidelity=min(max(best, 0.0), 1.0),
            argmin_state=ArgminState(zeta=min(max(zeta, 0.0), 0.5 * math.pi), delta=_wrap(delta)),
            grid_resolution=(options.grid_zeta, options.grid_delta),
            refinement_iterations=iterations,
            certified_gap=max(grid_min - best, 0.0),
        )

    def _refine(
        self,
        target_kraus: np.ndarray,
        starts: list[tuple[float, float]],
        step: tuple[float, float],
        options: FidelityOptions,
    ) -> tuple[float, float, float, int]:
        # any real (ζ, δ) is a valid state, so the simplex may leave the canonical box
        def objective(x: np.ndarray) -> float:
            state = np.array([math.cos(x[0]), np.exp(1j * x[1]) * math.sin(x[0])])
            return float(self._fidelity_of_states(target_kraus, state))

        best_x, best, iterations = np.array(starts[0]), math.inf, 0
        for zeta, delta in starts:
            simplex = np.array([[zeta, delta], [zeta + step[0], delta], [zeta, delta + step[1]]])
            res = minimize(
                objective, simplex[0], method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "xatol": 1e-10,
                    "fatol": 1e-3 * options.tolerance,
                    "maxiter": options.max_refinements,
                },
            )
            iterations += int(res.nit)
            if float(res.fun) < best:
                best_x, best = np.asarray(res.x, dtype=float), float(res.fun)
        zeta, delta = _canonical_angles(float(best_x[0]), float(best_x[1]))
        log_debug("fidelity refinement finished", starts=len(starts), iterations=iterations, value=best)
        return zeta, delta, best, iterations

    # -- conservation --------------------------------------------------------

    def _check_law(self, impl: Implementation, law: ConservedLaw) -> None:
        if law.ancilla_dim != impl.ancilla_dim:
            log_error("law and implementation disagree on ancilla dimension",
                      law_dim=law.ancilla_dim, impl_dim=impl.ancilla_dim)
            raise ValueError("dimension_mismatch")

    def conservation_residual(self, impl: Implementation, law: ConservedLaw) -> float:
        """‖[U, L_S⊗I + I⊗L_A]‖."""
        self._check_law(impl, law)
        return linalg.operator_norm(linalg.commutator(impl.joint_unitary, law.total_operator()))

    def sigma_ancilla(self, ancilla_state: np.ndarray, law: ConservedLaw) -> float:
        """σ(L_A/c) in the given ancilla state."""
        l_a = law.ancilla_operator
        mean = linalg.expectation(l_a, ancilla_state).real
        mean_square = linalg.expectation(l_a @ l_a, ancilla_state).real
        return math.sqrt(max(mean_square - mean**2, 0.0)) / law.c

    # -- deviation operators -------------------------------------------------

    def deviation_operator(
        self, impl: Implementation, target: GateSpec, system_operator: np.ndarray
    ) -> np.ndarray:
        """U†(O⊗I)U − U_S†OU_S⊗I."""
        u_s = self.bloch.gate_from_spec(target)
        identity_a = np.eye(impl.ancilla_dim)
        u = impl.joint_unitary
        evolved = linalg.dagger(u) @ np.kron(system_operator, identity_a) @ u
        ideal = np.kron(linalg.dagger(u_s) @ system_operator @ u_s, identity_a)
        return evolved - ideal

    def _require_pure(self, impl: Implementation) -> None:
        if not impl.is_pure:
            log_error("deviation analysis needs a pure ancilla; purify first")
            raise ValueError("mixed_ancilla_requires_purification")

    def deviation_report(
        self, impl: Implementation, target: GateSpec, law: ConservedLaw, psi: np.ndarray
    ) -> DeviationReport:
        self._require_pure(impl)
        self._check_law(impl, law)
        psi = np.asarray(psi, dtype=complex)
        state = np.kron(psi, impl.ancilla_state)
        dev = self.deviation_operator(impl, target, law.qubit_operator())
        total = law.total_operator()

        mean = np.vdot(state, dev @ state).real
        mean_square = float(np.linalg.norm(dev @ state) ** 2)
        variance = max(mean_square - mean**2, 0.0)
        comm = complex(np.vdot(state, linalg.commutator(dev, total) @ state))
        total_mean = np.vdot(state, total @ state).real
        total_var = max(float(np.linalg.norm(total @ state) ** 2) - total_mean**2, 0.0)
        slack = math.sqrt(variance * total_var) - 0.5 * abs(comm)
        return DeviationReport(
            mean_square=mean_square, variance=variance, commutator_expectation=comm, robertson_slack=slack
        )

    def _reduced_moments(
        self, impl: Implementation, dev: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """(I⊗⟨A|)D(I⊗|A⟩) and (I⊗⟨A|)D²(I⊗|A⟩), both 2x2."""
        embed = np.kron(linalg.PAULI_I, impl.ancilla_state.reshape(-1, 1))
        return linalg.dagger(embed) @ dev @ embed, linalg.dagger(embed) @ dev @ dev @ embed

    def deviation_fidelity_gap(
        self,
        impl: Implementation,
        target: GateSpec,
        law: ConservedLaw,
        options: FidelityOptions | None = None,
    ) -> float:
        """(1 − F²) − sup_ψ σ(D)²/4c², the supremum taken over the fidelity search grid."""
        self._require_pure(impl)
        options = options or FidelityOptions()
        dev = self.deviation_operator(impl, target, law.qubit_operator())
        first, second = self._reduced_moments(impl, dev)
        states = _sphere_states(*self.sphere_grid(options))
        variance = _quadratic_form(states, second).real - _quadratic_form(states, first).real ** 2
        sup_variance = float(np.max(variance))
        fidelity = self.worst_case_fidelity(impl, target, options)
        return fidelity.infidelity - sup_variance / (4.0 * law.c**2)

    def leakage_report(self, impl: Implementation, target: GateSpec, law: ConservedLaw) -> LeakageReport:
        """‖A^j_i‖² where U(ξ_i⊗A) = χ₀⊗A^i_0 + χ₁⊗A^i_1 and ξ_i = U_S†χ_i."""
        self._require_pure(impl)
        _, vectors = linalg.hermitian_eig(linalg.pauli_vector_operator(law.direction))
        chi0, chi1 = vectors[:, 1], vectors[:, 0]
        u_s = self.bloch.gate_from_spec(target)
        xi0, xi1 = linalg.dagger(u_s) @ chi0, linalg.dagger(u_s) @ chi1
        d = impl.ancilla_dim

        def branch(xi: np.ndarray, chi: np.ndarray) -> np.ndarray:
            out = impl.joint_unitary @ np.kron(xi, impl.ancilla_state)
            return np.conj(chi) @ out.reshape(2, d)

        return LeakageReport(
            leak_01=float(np.linalg.norm(branch(xi0, chi1)) ** 2),
            leak_10=float(np.linalg.norm(branch(xi1, chi0)) ** 2),
            fidelity_xi0=self.state_fidelity(impl, target, xi0),
            fidelity_xi1=self.state_fidelity(impl, target, xi1),
            xi0=xi0,
            xi1=xi1,
        )

    def rotated_deviations(
        self, impl: Implementation, target: GateSpec, law: ConservedLaw
    ) -> RotatedDeviations:
        """D₁, D₂ for l_{S,1}, l_{S,2} and the residuals of their commutation identities with L."""
        self._check_law(impl, law)
        frame = self.bloch.rotated_frame(law, target)
        psi = self.bloch.relative_angle(target, law).psi
        v, w = self.bounds.vw_vectors(target.theta, psi)
        u_s = self.bloch.gate_from_spec(target)
        identity_a = np.eye(impl.ancilla_dim)
        total = law.total_operator()

        d1 = self.deviation_operator(impl, target, frame.l1)
        d2 = self.deviation_operator(impl, target, frame.l2)
        heis1 = linalg.dagger(u_s) @ frame.l1 @ u_s
        heis2 = linalg.dagger(u_s) @ frame.l2 @ u_s

        lhs1 = linalg.commutator(d1, total) / law.c
        rhs1 = -2j * (d2 + 2 * np.kron(heis2, identity_a) + 2 * np.kron(frame.operator(v), identity_a))
        lhs2 = linalg.commutator(d2, total) / law.c
        rhs2 = 2j * (d1 + 2 * np.kron(heis1, identity_a) + 2 * np.kron(frame.operator(w), identity_a))
        return RotatedDeviations(
            d1=d1,
            d2=d2,
            identity_residuals=(linalg.operator_norm(lhs1 - rhs1), linalg.operator_norm(lhs2 - rhs2)),
            v=tuple(float(x) for x in v),
            w=tuple(float(x) for x in w),
        )

    # -- mixed ancillas ------------------------------------------------------

    def purify(self, ancilla_state: np.ndarray) -> PurifiedState:
        rho = linalg.as_matrix(ancilla_state)
        if not linalg.is_square(rho) or not linalg.is_hermitian(rho, settings.density_tol):
            log_error("purify needs a Hermitian density matrix", shape=rho.shape)
            raise ValueError("invalid_density_matrix")
        weights, vectors = np.linalg.eigh(0.5 * (rho + linalg.dagger(rho)))
        if weights[0] < -settings.density_tol or abs(float(np.sum(weights)) - 1.0) > settings.density_tol:
            log_error("purify needs a positive unit-trace matrix", min_weight=float(weights[0]))
            raise ValueError("invalid_density_matrix")
        order = np.argsort(weights)[::-1]
        weights, vectors = weights[order], vectors[:, order]
        rank = max(int(np.sum(weights > 1e-12)), 1)
        vector = np.zeros(rho.shape[0] * rank, dtype=complex)
        for j in range(rank):
            aux = np.zeros(rank)
            aux[j] = 1.0
            vector += math.sqrt(max(weights[j], 0.0)) * np.kron(vectors[:, j], aux)
        vector /= np.linalg.norm(vector)
        return PurifiedState(vector=vector, ancilla_dim=rho.shape[0], aux_dim=rank)

    def extend_implementation(
        self, impl: Implementation, law: ConservedLaw | None = None
    ) -> ExtendedImplementation:
        """(U⊗I_B, |A′⟩) together with L_A⊗I_B."""
        purified = self.purify(impl.ancilla_density())
        identity_b = np.eye(purified.aux_dim)
        extended = Implementation(
            ancilla_dim=impl.ancilla_dim * purified.aux_dim,
            ancilla_state=purified.vector,
            joint_unitary=np.kron(impl.joint_unitary, identity_b),
        )
        extended_law = None
        if law is not None:
            extended_law = ConservedLaw(
                b=law.b,
                c=law.c,
                direction=law.direction,
                ancilla_operator=np.kron(law.ancilla_operator, identity_b),
            )
        return ExtendedImplementation(implementation=extended, law=extended_law, aux_dim=purified.aux_dim)

    def mixed_channel_equivalence(self, impl: Implementation) -> float:
        """Largest entry difference between the purified-extended and the direct channel outputs."""
        extended = self.extend_implementation(impl).implementation
        residual = 0.0
        for psi in _INFORMATIONALLY_COMPLETE:
            rho_s = np.outer(psi, np.conj(psi))
            direct = self.apply_channel(impl, rho_s)
            via_purification = self.apply_channel(extended, rho_s)
            residual = max(residual, float(np.max(np.abs(direct - via_purification))))
        return residual
