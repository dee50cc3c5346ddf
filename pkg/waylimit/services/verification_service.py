from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np

from waylimit.core.config import settings
from waylimit.core.logger import log_debug, log_error, log_info
from waylimit.domain.channel_domain import FidelityOptions, Implementation
from waylimit.domain.experiment_domain import PropertyCheck, VerificationReport
from waylimit.domain.gate_domain import ConservedLaw, GateSpec
from waylimit.services import linalg
from waylimit.services.bloch_service import BlochService
from waylimit.services.bounds_service import BoundsService
from waylimit.services.channel_service import ChannelService
from waylimit.services.model_service import ModelService


SUITES = ("normformula", "robertson", "deviation", "appendix", "dominance")
DOMINANCE_DIMS = (2, 3, 4, 8)
ROTATED_MIN_SIN_PSI = 0.1

Suite = Callable[[int, np.random.Generator, float, FidelityOptions], list[PropertyCheck]]


class _Tracker:
    """Running maximum of a residual whose pass condition is residual ≤ tolerance."""

    def __init__(self, name: str, tolerance: float) -> None:
        self.name = name
        self.tolerance = tolerance
        self.worst = -math.inf
        self.samples = 0

    def record(self, residual: float) -> None:
        self.samples += 1
        self.worst = max(self.worst, float(residual))

    def check(self) -> PropertyCheck:
        worst = self.worst if self.samples else 0.0
        return PropertyCheck(
            name=self.name,
            max_residual=worst,
            tolerance=self.tolerance,
            passed=bool(worst <= self.tolerance),
            samples=self.samples,
        )


def _variance(op: np.ndarray, state: np.ndarray) -> float:
    mean = linalg.expectation(op, state).real
    return max(linalg.expectation(op @ op, state).real - mean**2, 0.0)


class VerificationService:
    """Property suites checking the bound chain on seeded random instances."""

    def __init__(
        self,
        bloch: BlochService | None = None,
        bounds: BoundsService | None = None,
        channel: ChannelService | None = None,
        models: ModelService | None = None,
    ) -> None:
        self.bloch = bloch or BlochService()
        self.bounds = bounds or BoundsService(self.bloch)
        self.channel = channel or ChannelService(self.bloch, self.bounds)
        self.models = models or ModelService(self.bloch)

    def run(
        self,
        suite: str,
        samples: int,
        seed: int,
        tol_bound: float | None = None,
        tol_fidelity: float | None = None,
    ) -> VerificationReport:
        runners: dict[str, Suite] = {
            "normformula": self._normformula,
            "robertson": self._robertson,
            "deviation": self._deviation,
            "appendix": self._purification,
            "dominance": self._dominance,
        }
        runner = runners.get(suite)
        if runner is None:
            log_error("unknown verification suite", suite=suite)
            raise ValueError("unknown_suite")
        if samples < 1:
            log_error("verification needs at least one sample", samples=samples)
            raise ValueError("points_too_small")

        rng = np.random.default_rng(seed)
        slack = tol_bound if tol_bound is not None else settings.bound_slack
        options = FidelityOptions(tolerance=tol_fidelity) if tol_fidelity is not None else FidelityOptions()
        checks = runner(samples, rng, slack, options)
        passed = all(check.passed for check in checks)
        log_info("verification suite finished", suite=suite, samples=samples, seed=seed, passed=passed)
        return VerificationReport(suite=suite, samples=samples, seed=seed, checks=checks, passed=passed)

    # -- shared sampling ---------------------------------------------------------

    def _random_instance(
        self, rng: np.random.Generator, ancilla_dim: int, mixed: bool = False
    ) -> tuple[GateSpec, ConservedLaw, Implementation]:
        target = self.models.random_gate(rng)
        law = self.models.random_law(ancilla_dim, rng)
        impl = self.models.random_implementation(law, rng, mixed=mixed)
        return target, law, impl

    def _random_qubit_state(self, rng: np.random.Generator) -> np.ndarray:
        return self.models.random_pure_state(2, rng)

    # -- suites ----------------------------------------------------------------

    def _normformula(
        self, samples: int, rng: np.random.Generator, slack: float, options: FidelityOptions
    ) -> list[PropertyCheck]:
        norm = _Tracker("commutator_norm_formula", 1e-10)
        gamma = _Tracker("gamma_identity", 1e-12)
        rotated = _Tracker("rotated_law_vector", 1e-10)
        ordering = _Tracker("alt_simplified_below_alt", 1e-12)
        for _ in range(samples):
            target = self.models.random_gate(rng)
            law = self.models.random_law(1, rng)
            geometry = self.bloch.relative_angle(target, law)
            u_s = self.bloch.gate_from_spec(target)
            l_s = law.qubit_operator()
            heisenberg = linalg.dagger(u_s) @ l_s @ u_s
            numeric = linalg.operator_norm(linalg.commutator(heisenberg, l_s))
            closed = self.bounds.commutator_norm_closed(target.theta, geometry.psi, law.c)
            norm.record(abs(numeric - closed))
            gamma.record(abs(math.sin(geometry.two_gamma) ** 2 - 4.0 * geometry.s * (1.0 - geometry.s)))
            # l·l′ = cos 2γ
            l_prime = self.bloch.rotated_law_vector(target, law)
            rotated.record(abs(float(np.dot(law.direction_vector, l_prime)) - math.cos(geometry.two_gamma)))
            sigma = float(rng.uniform(0.0, 10.0))
            ordering.record(
                self.bounds.bound_alt_simplified(target.theta, geometry.psi, sigma)
                - self.bounds.bound_alt(target.theta, geometry.psi, sigma)
            )
        return [norm.check(), gamma.check(), rotated.check(), ordering.check()]

    def _robertson(
        self, samples: int, rng: np.random.Generator, slack: float, options: FidelityOptions
    ) -> list[PropertyCheck]:
        robertson = _Tracker("robertson_slack", settings.robertson_tol)
        variance = _Tracker("variance_below_mean_square", 1e-12)
        additivity = _Tracker("variance_additivity", 1e-10)
        qubit_spread = _Tracker("qubit_spread_below_c", 1e-12)
        commutator = _Tracker("deviation_commutator", 1e-10)
        for idx in range(samples):
            dim = DOMINANCE_DIMS[idx % len(DOMINANCE_DIMS)]
            target, law, impl = self._random_instance(rng, dim)
            psi = self._random_qubit_state(rng)
            report = self.channel.deviation_report(impl, target, law, psi)
            robertson.record(-report.robertson_slack)
            variance.record(report.variance - report.mean_square)

            product = np.kron(psi, impl.ancilla_state)
            total = _variance(law.total_operator(), product)
            parts = _variance(law.qubit_operator(), psi) + _variance(law.ancilla_operator, impl.ancilla_state)
            additivity.record(abs(total - parts))
            qubit_spread.record(math.sqrt(_variance(law.qubit_operator(), psi)) - law.c)

            u_s = self.bloch.gate_from_spec(target)
            l_s = law.qubit_operator()
            dev = self.channel.deviation_operator(impl, target, l_s)
            expected = -np.kron(
                linalg.commutator(linalg.dagger(u_s) @ l_s @ u_s, l_s), np.eye(impl.ancilla_dim)
            )
            commutator.record(linalg.operator_norm(linalg.commutator(dev, law.total_operator()) - expected))
        return [
            robertson.check(), variance.check(), additivity.check(), qubit_spread.check(), commutator.check()
        ]

    def _deviation(
        self, samples: int, rng: np.random.Generator, slack: float, options: FidelityOptions
    ) -> list[PropertyCheck]:
        expansion = _Tracker("mean_square_expansion", 1e-10)
        basis = _Tracker("leakage_basis_identity", 1e-10)
        gap = _Tracker("deviation_fidelity_gap", slack)
        rotated = _Tracker("rotated_identities", settings.identity_tol)
        for idx in range(samples):
            dim = DOMINANCE_DIMS[idx % len(DOMINANCE_DIMS)]
            target, law, impl = self._random_instance(rng, dim)

            leakage = self.channel.leakage_report(impl, target, law)
            zeta = float(rng.uniform(0.0, 0.5 * math.pi))
            delta = float(rng.uniform(0.0, 2 * math.pi))
            psi = math.cos(zeta) * leakage.xi0 + np.exp(1j * delta) * math.sin(zeta) * leakage.xi1
            report = self.channel.deviation_report(impl, target, law, psi)
            weights = leakage.leak_01 * math.cos(zeta) ** 2 + leakage.leak_10 * math.sin(zeta) ** 2
            predicted = 4 * law.c**2 * weights
            expansion.record(abs(report.mean_square - predicted))
            basis.record(
                max(
                    abs(leakage.leak_01 - (1.0 - leakage.fidelity_xi0**2)),
                    abs(leakage.leak_10 - (1.0 - leakage.fidelity_xi1**2)),
                )
            )

            gap.record(-self.channel.deviation_fidelity_gap(impl, target, law, options))

            # the rotated frame needs the gate axis well away from l
            while math.sin(self.bloch.relative_angle(target, law).psi) <= ROTATED_MIN_SIN_PSI:
                target = self.models.random_gate(rng)
            residuals = self.channel.rotated_deviations(impl, target, law).identity_residuals
            rotated.record(max(residuals))
            log_debug("deviation sample", index=idx, dim=dim)
        return [expansion.check(), basis.check(), gap.check(), rotated.check()]

    def _purification(
        self, samples: int, rng: np.random.Generator, slack: float, options: FidelityOptions
    ) -> list[PropertyCheck]:
        equivalence = _Tracker("channel_equivalence", settings.equivalence_tol)
        fidelity = _Tracker("fidelity_agreement", slack)
        round_trip = _Tracker("purification_round_trip", 1e-10)
        for idx in range(samples):
            dim = DOMINANCE_DIMS[idx % len(DOMINANCE_DIMS)]
            target, _, impl = self._random_instance(rng, dim, mixed=True)
            equivalence.record(self.channel.mixed_channel_equivalence(impl))

            purified = self.channel.purify(impl.ancilla_state)
            amplitudes = purified.vector.reshape(purified.ancilla_dim, purified.aux_dim)
            rebuilt = amplitudes @ linalg.dagger(amplitudes)
            round_trip.record(float(np.max(np.abs(rebuilt - impl.ancilla_state))))

            extended = self.channel.extend_implementation(impl).implementation
            direct = self.channel.worst_case_fidelity(impl, target, options).worst_fidelity
            via_purification = self.channel.worst_case_fidelity(extended, target, options).worst_fidelity
            fidelity.record(abs(direct - via_purification))
        return [equivalence.check(), fidelity.check(), round_trip.check()]

    def _dominance(
        self, samples: int, rng: np.random.Generator, slack: float, options: FidelityOptions
    ) -> list[PropertyCheck]:
        dominance = _Tracker("bound_dominance", slack)
        conservation = _Tracker("conservation_residual", 1e-10)
        for idx in range(samples):
            dim = DOMINANCE_DIMS[idx % len(DOMINANCE_DIMS)]
            target, law, impl = self._random_instance(rng, dim)
            conservation.record(self.channel.conservation_residual(impl, law))
            psi = self.bloch.relative_angle(target, law).psi
            sigma = self.channel.sigma_ancilla(impl.ancilla_state, law)
            bound = max(
                self.bounds.bound_main(target.theta, psi, sigma),
                self.bounds.bound_alt(target.theta, psi, sigma),
            )
            infidelity = self.channel.worst_case_fidelity(impl, target, options).infidelity
            dominance.record(bound - infidelity)
        return [dominance.check(), conservation.check()]
