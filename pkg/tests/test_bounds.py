from __future__ import annotations

import math

import numpy as np
import pytest

from waylimit.services import linalg
from waylimit.services.linalg import PAULI_X, PAULI_Z


class TestBoundMain:
    @pytest.mark.parametrize("sigma", [0.0, 1.0, 10.0])
    def test_hadamard_configuration(self, bounds, sigma):
        expected = 1.0 / (4.0 * (1.0 + sigma**2))
        assert bounds.bound_main(math.pi, math.pi / 4, sigma) == pytest.approx(expected, abs=1e-12)

    def test_hadamard_from_matrix(self, bloch, bounds):
        law = bloch.standard_conserved(PAULI_Z, np.zeros((1, 1)))
        spec = bloch.decompose_gate((PAULI_X + PAULI_Z) / math.sqrt(2))
        psi = bloch.relative_angle(spec, law).psi
        assert psi == pytest.approx(math.pi / 4, abs=1e-12)
        assert bounds.bound_main(spec.theta, psi, 1.0) == pytest.approx(0.125, abs=1e-12)

    def test_vanishes_for_trivial_gate(self, bounds):
        assert bounds.bound_main(0.0, 1.0, 5.0) == 0.0

    def test_vanishes_for_not_gate(self, bounds):
        assert bounds.bound_main(math.pi, math.pi / 2, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_symmetric_in_psi(self, bounds, rng):
        for _ in range(50):
            theta, psi, sigma = rng.uniform(0, math.pi), rng.uniform(0, math.pi), rng.uniform(0, 5)
            assert bounds.bound_main(theta, psi, sigma) == pytest.approx(
                bounds.bound_main(theta, math.pi - psi, sigma), abs=1e-15
            )

    def test_capped_by_quarter(self, bounds, rng):
        for _ in range(200):
            theta, psi, sigma = rng.uniform(0, math.pi), rng.uniform(0, math.pi), rng.uniform(0, 10)
            assert bounds.bound_main(theta, psi, sigma) <= 1.0 / (4.0 * (1.0 + sigma**2)) + 1e-15

    def test_gamma_form_agrees(self, bloch, bounds, rng):
        for _ in range(50):
            theta, psi, sigma = rng.uniform(0, math.pi), rng.uniform(0, math.pi), rng.uniform(0, 5)
            two_gamma = bloch.gamma_from(theta, psi)
            assert bounds.bound_gamma_form(two_gamma, sigma) == pytest.approx(
                bounds.bound_main(theta, psi, sigma), abs=1e-14
            )


class TestSelfAdjoint:
    def test_examples(self, bounds):
        assert bounds.bound_self_adjoint(math.pi / 4, 1.0) == pytest.approx(0.125)
        assert bounds.bound_self_adjoint(0.0, 3.0) == 0.0
        assert bounds.bound_self_adjoint(math.pi / 2, 3.0) == pytest.approx(0.0, abs=1e-15)

    def test_matches_main_at_half_turn(self, bounds, rng):
        for psi in rng.uniform(0, math.pi, size=50):
            sigma = float(rng.uniform(0, 10))
            expected = bounds.bound_main(math.pi, psi, sigma)
            assert abs(bounds.bound_self_adjoint(psi, sigma) - expected) <= 1e-15


class TestVW:
    def test_half_turn(self, bounds):
        for psi in np.linspace(0, math.pi, 9):
            v, w = bounds.vw_norms(math.pi, psi)
            assert v == pytest.approx(math.cos(psi) ** 2, abs=1e-12)
            assert w == pytest.approx(abs(math.cos(psi)), abs=1e-12)

    @pytest.mark.parametrize("theta, psi", [(0.0, 1.1), (2.0, 0.0)])
    def test_trivial_cases(self, bounds, theta, psi):
        assert bounds.vw_norms(theta, psi) == pytest.approx((1.0, 1.0), abs=1e-12)

    def test_norms_at_most_one_on_grid(self, bounds):
        for theta in np.linspace(0, math.pi, 100):
            for psi in np.linspace(0, math.pi, 100):
                v, w = bounds.vw_vectors(theta, psi)
                assert np.linalg.norm(v) <= 1.0 + 1e-12
                assert np.linalg.norm(w) <= 1.0 + 1e-12
                assert max(bounds.vw_norms(theta, psi)) <= 1.0

    def test_vectors_match_norms(self, bounds, rng):
        for _ in range(50):
            theta, psi = rng.uniform(0, math.pi), rng.uniform(0, math.pi)
            v, w = bounds.vw_vectors(theta, psi)
            norms = (np.linalg.norm(v), np.linalg.norm(w))
            assert norms == pytest.approx(bounds.vw_norms(theta, psi), abs=1e-12)


class TestBoundAlt:
    def test_not_gate_peak(self, bounds):
        expected = 1 / (1 + math.sqrt(2)) ** 2
        assert bounds.bound_alt(math.pi, math.pi / 2, 1.0) == pytest.approx(expected, abs=1e-12)
        assert bounds.bound_alt(math.pi, math.pi / 2, 1.0) == pytest.approx(0.1715729, abs=1e-7)

    def test_trivial_gate(self, bounds):
        assert bounds.bound_alt(0.0, 0.7, 2.0) == pytest.approx(0.0, abs=1e-15)

    def test_hadamard_configuration(self, bounds):
        c = math.sqrt(2) / 2
        expected = (1 - 0.5 * c * (1 + c)) ** 2 / 4
        assert bounds.bound_alt(math.pi, math.pi / 4, 0.0) == pytest.approx(expected, abs=1e-12)
        assert bounds.bound_alt(math.pi, math.pi / 4, 0.0) == pytest.approx(0.0392919, abs=1e-6)

    @pytest.mark.parametrize("sigma", [0.0, 1.0, 10.0, 100.0])
    def test_not_gate_complementarity(self, bounds, sigma):
        assert bounds.bound_main(math.pi, math.pi / 2, sigma) == pytest.approx(0.0, abs=1e-15)
        expected = 1 / (1 + math.sqrt(1 + sigma**2)) ** 2
        assert bounds.bound_alt(math.pi, math.pi / 2, sigma) == pytest.approx(expected, rel=1e-12)
        assert bounds.bound_alt(math.pi, math.pi / 2, sigma) > 0

    def test_simplified_examples(self, bounds):
        assert bounds.bound_alt_simplified(math.pi, math.pi / 2, 3.0) == pytest.approx(
            1 / (1 + math.sqrt(10)) ** 2, abs=1e-12
        )
        assert bounds.bound_alt_simplified(0.0, 1.0, 3.0) == pytest.approx(0.0, abs=1e-15)

    def test_simplified_gamma_form(self, bloch, bounds, rng):
        for _ in range(200):
            theta, psi, sigma = rng.uniform(0, math.pi), rng.uniform(0, math.pi), rng.uniform(0, 10)
            cos_gamma = abs(math.cos(0.5 * bloch.gamma_from(theta, psi)))
            bracket = 1 - cos_gamma * math.sqrt(1 + cos_gamma**2) / math.sqrt(2)
            expected = bracket**2 / (1 + math.sqrt(1 + sigma**2)) ** 2
            assert bounds.bound_alt_simplified(theta, psi, sigma) == pytest.approx(expected, abs=1e-12)

    def test_simplified_never_exceeds_alt(self, bounds, rng):
        for _ in range(500):
            theta, psi, sigma = rng.uniform(0, math.pi), rng.uniform(0, math.pi), rng.uniform(0, 10)
            simplified = bounds.bound_alt_simplified(theta, psi, sigma)
            assert simplified <= bounds.bound_alt(theta, psi, sigma) + 1e-12


class TestZeroLocus:
    @pytest.mark.parametrize("theta, psi", [(0.0, 0.3), (0.0, math.pi / 2), (1.2, 0.0), (math.pi, 0.0)])
    def test_zero_when_unconstrained(self, bounds, theta, psi):
        report = bounds.report(theta, psi, 1.0)
        assert report.bound_main == pytest.approx(0.0, abs=1e-12)
        assert report.bound_alt == pytest.approx(0.0, abs=1e-12)

    def test_positive_elsewhere(self, bounds, rng):
        for _ in range(100):
            theta, psi = rng.uniform(0.05, math.pi), rng.uniform(0.05, math.pi / 2)
            report = bounds.report(theta, psi, 1.0)
            assert max(report.bound_main, report.bound_alt) > 1e-12


class TestRotational:
    def test_examples(self, bounds):
        assert bounds.bound_rotational(math.pi, 1) == pytest.approx(1 / 8)
        assert bounds.bound_rotational(math.pi, 2) == pytest.approx(1 / 20)
        assert bounds.bound_rotational(math.pi / 4, 2) == pytest.approx(0.025)

    def test_branches_meet(self, bounds):
        for n in (1, 2, 5):
            below = bounds.bound_rotational(math.pi / 2 - 1e-12, n)
            above = bounds.bound_rotational(math.pi / 2 + 1e-12, n)
            assert below == pytest.approx(above, abs=1e-12)


class TestCommutatorNorm:
    def test_examples(self, bounds):
        assert bounds.commutator_norm_closed(0.0, 1.0, 2.0) == 0.0
        assert bounds.commutator_norm_closed(math.pi, math.pi / 4, 1.0) == pytest.approx(2.0)

    def test_matches_numeric(self, bloch, bounds, models, rng):
        for _ in range(200):
            spec = models.random_gate(rng)
            law = models.random_law(1, rng)
            u_s = bloch.gate_from_spec(spec)
            l_s = law.qubit_operator()
            numeric = linalg.operator_norm(linalg.commutator(u_s.conj().T @ l_s @ u_s, l_s))
            psi = bloch.relative_angle(spec, law).psi
            assert abs(numeric - bounds.commutator_norm_closed(spec.theta, psi, law.c)) <= 1e-10


class TestSweep:
    def test_figure_curves(self, bounds):
        rows = bounds.sweep(math.pi, 1.0, 101)
        assert len(rows) == 101
        assert rows[25].psi == pytest.approx(math.pi / 8)
        quarter = bounds.sweep(math.pi, 1.0, 3)[1]
        assert quarter.bound_main == pytest.approx(0.125, abs=1e-12)
        assert rows[-1].bound_alt == pytest.approx(1 / (1 + math.sqrt(2)) ** 2, abs=1e-12)

    def test_large_sigma_peak(self, bounds):
        rows = bounds.sweep(math.pi, 10.0, 11)
        assert rows[-1].bound_alt == pytest.approx(1 / (1 + math.sqrt(101)) ** 2, abs=1e-12)

    @pytest.mark.parametrize("sigma", [1.0, 10.0])
    def test_main_dominates_at_quarter_turn(self, bounds, sigma):
        for row in bounds.sweep(math.pi / 2, sigma, 101):
            assert row.bound_main >= row.bound_alt

    def test_two_points_are_endpoints(self, bounds):
        rows = bounds.sweep(1.0, 1.0, 2)
        assert [row.psi for row in rows] == pytest.approx([0.0, math.pi / 2])

    def test_too_few_points(self, bounds):
        with pytest.raises(ValueError, match="points_too_small"):
            bounds.sweep(1.0, 1.0, 1)


def test_report_carries_two_gamma(bounds):
    report = bounds.report(math.pi, math.pi / 4, 1.0)
    assert report.two_gamma == pytest.approx(math.pi / 2)
    assert set(report.model_dump()) == {
        "theta", "psi", "sigma", "bound_main", "bound_alt", "bound_alt_simplified",
        "v_norm", "w_norm", "two_gamma",
    }
