from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.linalg import expm, null_space
from scipy.stats import ks_2samp

from waylimit.domain.gate_domain import GateSpec
from waylimit.domain.model_domain import JCParams, SpinAncilla
from waylimit.services import linalg
from waylimit.services.linalg import PAULI_X, PAULI_Y, PAULI_Z


class TestCommutantBlocks:
    def test_zz_law(self, bloch, models):
        structure = models.commutant_blocks(bloch.standard_conserved(PAULI_Z, PAULI_Z))
        assert [c.value for c in structure.clusters] == pytest.approx([-2.0, 0.0, 2.0])
        assert structure.block_dims == [1, 2, 1]
        assert structure.total_dim == 4

    def test_jc_law_pairs(self, models):
        structure = models.commutant_blocks(models.jc_law(3))
        assert structure.block_dims == [1, 2, 2, 2, 1]
        assert [c.value for c in structure.clusters] == pytest.approx([-1.0, 1.0, 3.0, 5.0, 7.0])

    def test_zero_ancilla_operator(self, bloch, models):
        structure = models.commutant_blocks(bloch.standard_conserved(PAULI_Z, np.zeros((3, 3))))
        assert structure.block_dims == [3, 3]

    def test_bases_are_orthonormal(self, models, rng):
        law = models.random_law(4, rng)
        structure = models.commutant_blocks(law)
        assert sum(structure.block_dims) == structure.total_dim
        for cluster in structure.clusters:
            gram = cluster.basis.conj().T @ cluster.basis
            assert np.max(np.abs(gram - np.eye(cluster.dim))) <= 1e-10


class TestSampling:
    def test_one_dimensional_clusters_give_phases(self, bloch, models):
        law = bloch.standard_conserved(PAULI_Z, np.diag([0.0, 3.0]))
        structure = models.commutant_blocks(law)
        assert structure.block_dims == [1, 1, 1, 1]
        u = models.sample_constrained_unitary(structure, 5)
        assert np.allclose(np.abs(u), np.eye(4))

    def test_deterministic_per_seed(self, models, rng):
        structure = models.commutant_blocks(models.random_law(3, rng))
        first = models.sample_constrained_unitary(structure, 11)
        second = models.sample_constrained_unitary(structure, 11)
        assert np.array_equal(first, second)

    def test_commutes_with_law(self, channel, models, rng):
        for dim in (2, 3, 4, 8):
            law = models.random_law(dim, rng)
            u = models.sample_constrained_unitary(models.commutant_blocks(law), rng)
            assert linalg.is_unitary(u)
            assert linalg.operator_norm(linalg.commutator(u, law.total_operator())) <= 1e-10

    def test_haar_second_moment(self, models):
        rng = np.random.default_rng(3)
        samples = np.array([abs(models.haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(10_000)])
        standard_error = samples.std(ddof=1) / math.sqrt(len(samples))
        assert abs(samples.mean() - 0.5) <= 3 * standard_error

    def test_left_invariance(self, models):
        rng = np.random.default_rng(4)
        fixed = models.haar_unitary(2, np.random.default_rng(99))
        plain = [abs(models.haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(10_000)]
        shifted = [abs((fixed @ models.haar_unitary(2, rng))[0, 0]) ** 2 for _ in range(10_000)]
        assert ks_2samp(plain, shifted).pvalue > 1e-3


class TestJaynesCummings:
    def test_free_evolution_is_identity(self, models):
        factory, _ = models.build_jc(JCParams(detuning=0.0, coupling=0.0, time=2.0, n_max=5))
        assert np.allclose(factory.joint_unitary, np.eye(12))

    def test_pi_pulse_transfers_population(self, models):
        factory, _ = models.build_jc(JCParams(detuning=0.0, coupling=1.0, time=math.pi / 2, n_max=4))
        d = 5
        u = factory.joint_unitary
        assert abs(u[d + 1, 0]) == pytest.approx(1.0, abs=1e-12)  # |0,0⟩ → |1,1⟩
        assert abs(u[0, 0]) == pytest.approx(0.0, abs=1e-12)

    def test_conserves_excitations(self, channel, models, rng):
        for _ in range(10):
            params = JCParams(
                detuning=float(rng.uniform(-2, 2)),
                coupling=float(rng.uniform(0, 2)),
                time=float(rng.uniform(0, 5)),
                n_max=int(rng.integers(2, 12)),
            )
            factory, law = models.build_jc(params)
            impl = factory(np.eye(params.n_max + 1)[0])
            assert channel.conservation_residual(impl, law) <= 1e-12

    def test_matches_dense_exponential(self, models, rng):
        params = JCParams(detuning=0.7, coupling=1.3, time=2.1, n_max=10)
        factory, _ = models.build_jc(params)
        dense = expm(-1j * params.time * models.jc_hamiltonian(params))
        assert np.max(np.abs(factory.joint_unitary - dense)) <= 1e-9

    def test_law_standard_form(self, models):
        _, law = models.build_jc(JCParams(n_max=6))
        assert (law.b, law.c) == pytest.approx((1.0, 1.0))
        assert np.allclose(law.direction, (0, 0, 1))
        assert np.allclose(np.diag(law.ancilla_operator), 2 * np.arange(7))

    def test_factory_rejects_edge_weight(self, models):
        factory, _ = models.build_jc(JCParams(n_max=6))
        with pytest.raises(ValueError, match="truncation_tail"):
            factory(np.eye(7)[6])


class TestCoherentState:
    def test_vacuum(self, models):
        assert np.allclose(models.coherent_state(0.0, 5), np.eye(6)[0])

    def test_mean_photon_number(self, models):
        state = models.coherent_state(2.0, 64)
        assert float(np.sum(np.arange(65) * np.abs(state) ** 2)) == pytest.approx(4.0, abs=1e-10)

    def test_truncation_too_small(self, models):
        with pytest.raises(ValueError, match="truncation_tail"):
            models.coherent_state(5.0, 10)


class TestSpin:
    def test_spin_half(self, models):
        jx, jy, jz = models.spin_operators(1)
        assert np.allclose(jx, PAULI_X / 2)
        assert np.allclose(jy, PAULI_Y / 2)
        assert np.allclose(jz, PAULI_Z / 2)

    def test_spin_one_z(self, models):
        assert np.allclose(models.spin_operators(2)[2], np.diag([1.0, 0.0, -1.0]))

    @pytest.mark.parametrize("big_n", [1, 2, 3, 6])
    def test_algebra_and_norm(self, models, rng, big_n):
        jx, jy, jz = models.spin_operators(big_n)
        assert np.max(np.abs(linalg.commutator(jx, jy) - 1j * jz)) <= 1e-12
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        projected = 2 * (axis[0] * jx + axis[1] * jy + axis[2] * jz)
        assert linalg.operator_norm(projected) == pytest.approx(big_n, abs=1e-10)

    def test_spin_law_constants(self, models):
        law = models.spin_law(SpinAncilla(big_n=3, direction=(1.0, 0.0, 0.0)))
        assert law.c == pytest.approx(0.5)
        assert law.ancilla_dim == 4

    def test_invariant_commutes_with_total_spin(self, models, rng):
        for big_n in (1, 2, 3):
            factory = models.build_spin_invariant(big_n, *rng.uniform(0, 2 * math.pi, size=2))
            for op in models.total_spin_operators(big_n):
                assert linalg.operator_norm(linalg.commutator(factory.joint_unitary, op)) <= 1e-10

    def test_equal_phases_are_global(self, channel, models):
        factory = models.build_spin_invariant(2, 0.9, 0.9)
        impl = factory(np.array([0.0, 1.0, 0.0]))
        identity_gate = GateSpec(phi=0.0, theta=0.0)
        assert channel.worst_case_fidelity(impl, identity_gate).worst_fidelity == pytest.approx(1.0)

    def test_invariant_family_is_exhaustive(self, models, rng):
        big_n = 2
        dim = 2 * (big_n + 1)
        identity = np.eye(dim)
        # vec(AX − XA) = (A⊗I − I⊗Aᵀ) vec(X) for row-major vec
        totals = models.total_spin_operators(big_n)
        stacked = np.vstack([np.kron(op, identity) - np.kron(identity, op.T) for op in totals])
        kernel = null_space(stacked, rcond=1e-10)
        assert kernel.shape[1] == 2
        p_plus, p_minus = models.irrep_projectors(big_n)
        span = np.column_stack([p_plus.reshape(-1), p_minus.reshape(-1)])
        for _ in range(5):
            sample = (kernel @ (rng.normal(size=2) + 1j * rng.normal(size=2))).reshape(dim, dim)
            coefficients, *_ = np.linalg.lstsq(span, sample.reshape(-1), rcond=None)
            assert np.max(np.abs(span @ coefficients - sample.reshape(-1))) <= 1e-8

    def test_rotational_bound_holds(self, bloch, bounds, channel, models, rng):
        target = bloch.named_gate("X")
        for _ in range(10):
            factory = models.build_spin_invariant(1, *rng.uniform(0, 2 * math.pi, size=2))
            impl = factory(models.random_pure_state(2, rng))
            infidelity = channel.worst_case_fidelity(impl, target).infidelity
            assert infidelity >= bounds.bound_rotational(math.pi, 1) - 1e-7


class TestPresets:
    def test_z_preset(self, models):
        law = models.law_preset("z", 3)
        assert np.allclose(law.ancilla_operator, np.diag([2.0, 0.0, -2.0]))
        assert np.allclose(law.direction, (0, 0, 1))

    def test_x_preset(self, models):
        law = models.law_preset("x", 2)
        assert np.allclose(law.ancilla_operator, PAULI_X)
        assert np.allclose(law.direction, (1, 0, 0))

    def test_jc_preset(self, models):
        assert models.law_preset("jc", 4).ancilla_dim == 4

    def test_unknown_preset(self, models):
        with pytest.raises(ValueError, match="unknown_law"):
            models.law_preset("y", 2)


def test_random_implementation_is_constrained(channel, models, rng):
    law = models.random_law(3, rng)
    for mixed in (False, True):
        impl = models.random_implementation(law, rng, mixed=mixed)
        assert impl.is_pure is not mixed
        assert channel.conservation_residual(impl, law) <= 1e-10
