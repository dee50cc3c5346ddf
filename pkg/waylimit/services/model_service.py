from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from scipy.linalg import qr
from scipy.special import gammaln
from scipy.stats import poisson

from waylimit.core.config import settings
from waylimit.core.logger import log_debug, log_error
from waylimit.domain.channel_domain import Implementation
from waylimit.domain.gate_domain import ConservedLaw, GateSpec
from waylimit.domain.model_domain import (
    CommutantStructure,
    EigenCluster,
    ImplementationFactory,
    JCParams,
    SpinAncilla,
)
from waylimit.services import linalg
from waylimit.services.bloch_service import BlochService


LAW_PRESETS = ("z", "x", "jc")


def _random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    vec = rng.normal(size=3)
    return vec / np.linalg.norm(vec)


class ModelService:
    """Generators of implementations that respect a conservation law."""

    def __init__(self, bloch: BlochService | None = None) -> None:
        self.bloch = bloch or BlochService()

    # -- commutant ------------------------------------------------------------

    def commutant_blocks(self, law: ConservedLaw) -> CommutantStructure:
        """Eigenspaces of L = L_S⊗I + I⊗L_A, eigenvalues merged within a relative gap."""
        values, vectors = linalg.hermitian_eig(law.total_operator())
        spread = float(values[-1] - values[0])
        tol = settings.cluster_rel_tol * spread

        clusters: list[EigenCluster] = []
        start = 0
        for k in range(1, len(values) + 1):
            if k == len(values) or values[k] - values[k - 1] > tol:
                members = values[start:k]
                clusters.append(EigenCluster(value=float(np.mean(members)), basis=vectors[:, start:k]))
                start = k
        log_debug("commutant clusters", dims=[c.dim for c in clusters])
        return CommutantStructure(clusters=clusters, total_dim=len(values))

    def assemble_block_unitary(
        self, structure: CommutantStructure, blocks: Sequence[np.ndarray]
    ) -> np.ndarray:
        """Σ_k B_k V_k B_k† for cluster bases B_k and per-cluster unitaries V_k."""
        if len(blocks) != len(structure.clusters):
            log_error("one block per cluster expected", blocks=len(blocks), clusters=len(structure.clusters))
            raise ValueError("dimension_mismatch")
        out = np.zeros((structure.total_dim, structure.total_dim), dtype=complex)
        for cluster, block in zip(structure.clusters, blocks):
            block = np.asarray(block, dtype=complex)
            if block.shape != (cluster.dim, cluster.dim):
                log_error("block does not match cluster", block=block.shape, cluster=cluster.dim)
                raise ValueError("dimension_mismatch")
            out += cluster.basis @ block @ linalg.dagger(cluster.basis)
        return out

    def haar_unitary(self, dim: int, rng: np.random.Generator) -> np.ndarray:
        ginibre = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2)
        q, r = qr(ginibre)
        diag = np.diag(r)
        return q * (diag / np.abs(diag))

    def sample_constrained_unitary(
        self, structure: CommutantStructure, seed: int | np.random.Generator
    ) -> np.ndarray:
        rng = np.random.default_rng(seed)
        blocks = [self.haar_unitary(cluster.dim, rng) for cluster in structure.clusters]
        return self.assemble_block_unitary(structure, blocks)

    # -- Jaynes-Cummings ------------------------------------------------------

    def jc_law(self, n_max: int) -> ConservedLaw:
        """(Z, 2a†a) on a Fock space truncated at n_max."""
        return self.bloch.standard_conserved(linalg.PAULI_Z, np.diag(2.0 * np.arange(n_max + 1)))

    def jc_hamiltonian(self, params: JCParams) -> np.ndarray:
        """Δ I⊗a†a + i g(|0⟩⟨1|⊗a − |1⟩⟨0|⊗a†) on the truncated space."""
        d = params.n_max + 1
        lower = np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)
        number = np.diag(np.arange(d)).astype(complex)
        raise_qubit = np.array([[0, 1], [0, 0]], dtype=complex)  # |0⟩⟨1|
        coupling = np.kron(raise_qubit, lower) - np.kron(linalg.dagger(raise_qubit), linalg.dagger(lower))
        return params.detuning * np.kron(linalg.PAULI_I, number) + 1j * params.coupling * coupling

    def build_jc(self, params: JCParams) -> tuple[ImplementationFactory, ConservedLaw]:
        """exp(−itH) assembled exactly on the excitation blocks (|0,n⟩, |1,n+1⟩)."""
        d = params.n_max + 1
        delta, g, t = params.detuning, params.coupling, params.time
        u = np.zeros((2 * d, 2 * d), dtype=complex)

        for n in range(params.n_max):
            rate = g * math.sqrt(n + 1)
            block = np.array([[delta * n, 1j * rate], [-1j * rate, delta * (n + 1)]], dtype=complex)
            idx = [n, d + n + 1]  # |0,n⟩, |1,n+1⟩
            u[np.ix_(idx, idx)] = linalg.unitary_exp(block, -t)

        u[d, d] = 1.0  # |1,0⟩
        u[params.n_max, params.n_max] = np.exp(-1j * t * delta * params.n_max)  # |0,n_max⟩

        factory = ImplementationFactory(
            joint_unitary=u,
            ancilla_dim=d,
            tail_levels=min(settings.jc_tail_levels, d),
            tail_tolerance=settings.jc_tail_tol,
        )
        return factory, self.jc_law(params.n_max)

    def coherent_state(self, alpha: complex, n_max: int) -> np.ndarray:
        """e^{−|α|²/2} αⁿ/√(n!) truncated at n_max and renormalized."""
        mean = abs(alpha) ** 2
        tail = float(poisson.sf(n_max, mean)) if mean > 0 else 0.0
        if tail > settings.jc_tail_tol:
            log_error("coherent amplitude too large for truncation", alpha=abs(alpha), n_max=n_max, tail=tail)
            raise ValueError("truncation_tail")
        n = np.arange(n_max + 1)
        if mean == 0:
            state = np.zeros(n_max + 1, dtype=complex)
            state[0] = 1.0
            return state
        log_amp = -0.5 * mean + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        state = np.exp(log_amp) * np.exp(1j * n * np.angle(alpha))
        return state / np.linalg.norm(state)

    # -- spin ancilla ----------------------------------------------------------

    def spin_operators(self, big_n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Spin j = N/2 matrices in the |j, m⟩ basis with m descending."""
        if big_n < 1:
            log_error("spin size must be positive", big_n=big_n)
            raise ValueError("dimension_mismatch")
        j = 0.5 * big_n
        m = np.arange(j, -j - 1, -1)
        raising = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
        lowering = linalg.dagger(raising)
        jx = 0.5 * (raising + lowering)
        jy = -0.5j * (raising - lowering)
        jz = np.diag(m).astype(complex)
        return jx, jy, jz

    def spin_law(self, ancilla: SpinAncilla) -> ConservedLaw:
        """L_S = l·σ/2 and L_A = l·J, so c = 1/2."""
        direction = np.asarray(ancilla.direction, dtype=float)
        direction = direction / np.linalg.norm(direction)
        ops = self.spin_operators(ancilla.big_n)
        l_a = sum(x * op for x, op in zip(direction, ops))
        return self.bloch.standard_conserved(0.5 * linalg.pauli_vector_operator(direction), l_a)

    def total_spin_operators(self, big_n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """σ_k/2 ⊗ I + I ⊗ J_k."""
        identity_a = np.eye(big_n + 1)
        return tuple(
            np.kron(0.5 * pauli, identity_a) + np.kron(linalg.PAULI_I, op)
            for pauli, op in zip(linalg.PAULIS, self.spin_operators(big_n))
        )

    def irrep_projectors(self, big_n: int) -> tuple[np.ndarray, np.ndarray]:
        """P₊, P₋ onto total spin (N+1)/2 and (N−1)/2.

        Split by σ·J, whose eigenvalues are N/2 and −N/2−1.
        """
        coupling = sum(np.kron(pauli, op) for pauli, op in zip(linalg.PAULIS, self.spin_operators(big_n)))
        values, vectors = linalg.hermitian_eig(coupling)
        upper = vectors[:, values > -0.5]
        lower = vectors[:, values <= -0.5]
        return upper @ linalg.dagger(upper), lower @ linalg.dagger(lower)

    def build_spin_invariant(
        self, big_n: int, phase_plus: float, phase_minus: float
    ) -> ImplementationFactory:
        p_plus, p_minus = self.irrep_projectors(big_n)
        u = np.exp(1j * phase_plus) * p_plus + np.exp(1j * phase_minus) * p_minus
        return ImplementationFactory(joint_unitary=u, ancilla_dim=big_n + 1)

    # -- presets and random instances -----------------------------------------

    def law_preset(self, name: str, ancilla_dim: int) -> ConservedLaw:
        """"z"/"x": L_S = Z or X with L_A = 2J_z or 2J_x of spin (d−1)/2; "jc": (Z, 2a†a)."""
        key = name.lower()
        if key not in LAW_PRESETS:
            log_error("unknown law preset", name=name)
            raise ValueError("unknown_law")
        if ancilla_dim < 1:
            log_error("ancilla dimension must be positive", ancilla_dim=ancilla_dim)
            raise ValueError("dimension_mismatch")
        if key == "jc":
            if ancilla_dim < 2:
                log_error("jc preset needs at least two Fock levels", ancilla_dim=ancilla_dim)
                raise ValueError("dimension_mismatch")
            return self.jc_law(ancilla_dim - 1)
        if ancilla_dim == 1:
            l_a = np.zeros((1, 1))
        else:
            jx, _, jz = self.spin_operators(ancilla_dim - 1)
            l_a = 2.0 * (jz if key == "z" else jx)
        l_s = linalg.PAULI_Z if key == "z" else linalg.PAULI_X
        return self.bloch.standard_conserved(l_s, l_a)

    def random_gate(self, rng: np.random.Generator) -> GateSpec:
        u2 = self.haar_unitary(2, rng)
        return self.bloch.decompose_gate(u2)

    def random_law(self, ancilla_dim: int, rng: np.random.Generator) -> ConservedLaw:
        """b ∈ [−2, 2], c ∈ [0.2, 2], l uniform; L_A = c·V diag(k)V† with integer k ∈ [−3, 3]."""
        b = float(rng.uniform(-2.0, 2.0))
        c = float(rng.uniform(0.2, 2.0))
        direction = _random_unit_vector(rng)
        l_s = (b - c) * linalg.PAULI_I + c * linalg.pauli_vector_operator(direction)
        v = self.haar_unitary(ancilla_dim, rng)
        spectrum = rng.integers(-3, 4, size=ancilla_dim).astype(float)
        l_a = c * (v * spectrum) @ linalg.dagger(v)
        l_a = 0.5 * (l_a + linalg.dagger(l_a))
        return self.bloch.standard_conserved(l_s, l_a)

    def random_pure_state(self, dim: int, rng: np.random.Generator) -> np.ndarray:
        vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return vec / np.linalg.norm(vec)

    def random_mixed_state(self, dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
        """Density matrix G G†/Tr from a complex Gaussian dim×rank matrix."""
        rank = rank or dim
        g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
        rho = g @ linalg.dagger(g)
        rho = 0.5 * (rho + linalg.dagger(rho))
        return rho / np.trace(rho).real

    def random_implementation(
        self, law: ConservedLaw, rng: np.random.Generator, mixed: bool = False
    ) -> Implementation:
        structure = self.commutant_blocks(law)
        u = self.sample_constrained_unitary(structure, rng)
        d = law.ancilla_dim
        state = self.random_mixed_state(d, rng) if mixed else self.random_pure_state(d, rng)
        return Implementation(ancilla_dim=d, ancilla_state=state, joint_unitary=u)
