from __future__ import annotations

import math

import numpy as np

from waylimit.core.logger import log_error, log_info
from waylimit.domain.bound_domain import BoundReport, SweepRow
from waylimit.services.bloch_service import BlochService


def _overlap(theta: float, psi: float) -> float:
    """s = sin²(θ/2) sin²Ψ."""
    return min(math.sin(0.5 * theta) ** 2 * math.sin(psi) ** 2, 1.0)


def _alt_denominator(sigma: float) -> float:
    return (1.0 + math.sqrt(1.0 + sigma**2)) ** 2


class BoundsService:
    """Closed-form lower bounds on the gate infidelity 1 − F²."""

    def __init__(self, bloch: BlochService | None = None) -> None:
        self.bloch = bloch or BlochService()

    def bound_main(self, theta: float, psi: float, sigma: float) -> float:
        s = _overlap(theta, psi)
        return s * (1.0 - s) / (1.0 + sigma**2)

    def bound_self_adjoint(self, psi: float, sigma: float) -> float:
        return math.sin(2.0 * psi) ** 2 / (4.0 * (1.0 + sigma**2))

    def bound_gamma_form(self, two_gamma: float, sigma: float) -> float:
        return math.sin(two_gamma) ** 2 / (4.0 * (1.0 + sigma**2))

    def vw_vectors(self, theta: float, psi: float) -> tuple[np.ndarray, np.ndarray]:
        """Coefficient vectors v, w of the rotated-frame commutator identities."""
        c_half, s_half = math.cos(0.5 * theta), math.sin(0.5 * theta)
        c_psi, s_psi = math.cos(psi), math.sin(psi)
        v = np.array([
            2.0 * c_psi * s_half * c_half,
            c_psi**2 * s_half**2 - c_half**2,
            -s_psi * s_half * c_half,
        ])
        w = np.array([
            c_psi**2 * s_half**2 - c_half**2,
            -2.0 * c_psi * s_half * c_half,
            -s_psi * c_psi * s_half**2,
        ])
        return v, w

    def vw_norms(self, theta: float, psi: float) -> tuple[float, float]:
        c2 = math.cos(0.5 * theta) ** 2
        p2 = math.cos(psi) ** 2 * math.sin(0.5 * theta) ** 2
        v_norm = math.sqrt(c2 + p2 * (c2 + p2))
        w_norm = math.sqrt(p2 + c2 * (c2 + p2))
        return min(v_norm, 1.0), min(w_norm, 1.0)

    def bound_alt(self, theta: float, psi: float, sigma: float) -> float:
        v_norm, w_norm = self.vw_norms(theta, psi)
        bracket = 1.0 - 0.5 * (v_norm + w_norm)
        if bracket < -1e-12:
            log_error("alternative bound bracket negative", theta=theta, psi=psi, bracket=bracket)
        return max(bracket, 0.0) ** 2 / _alt_denominator(sigma)

    def bound_alt_simplified(self, theta: float, psi: float, sigma: float) -> float:
        s = _overlap(theta, psi)
        bracket = 1.0 - math.sqrt((1.0 - s) * (2.0 - s) / 2.0)
        return max(bracket, 0.0) ** 2 / _alt_denominator(sigma)

    def bound_rotational(self, theta: float, ancilla_norm: float) -> float:
        """Bound under full rotational symmetry with ‖2L_A/ħ‖ = ancilla_norm."""
        numerator = math.sin(theta) ** 2 if theta <= 0.5 * math.pi else 1.0
        return numerator / (4.0 * (1.0 + ancilla_norm**2))

    def commutator_norm_closed(self, theta: float, psi: float, c: float) -> float:
        """‖[U_S†L_SU_S, L_S]‖ = 4c²√(s(1−s))."""
        s = _overlap(theta, psi)
        return 4.0 * c**2 * math.sqrt(s * (1.0 - s))

    def report(self, theta: float, psi: float, sigma: float) -> BoundReport:
        v_norm, w_norm = self.vw_norms(theta, psi)
        return BoundReport(
            theta=theta,
            psi=psi,
            sigma=sigma,
            bound_main=self.bound_main(theta, psi, sigma),
            bound_alt=self.bound_alt(theta, psi, sigma),
            bound_alt_simplified=self.bound_alt_simplified(theta, psi, sigma),
            v_norm=v_norm,
            w_norm=w_norm,
            two_gamma=self.bloch.gamma_from(theta, psi),
        )

    def sweep(self, theta: float, sigma: float, points: int) -> list[SweepRow]:
        if points < 2:
            log_error("sweep needs at least two points", points=points)
            raise ValueError("points_too_small")
        rows = [
            SweepRow(
                psi=float(psi),
                bound_main=self.bound_main(theta, psi, sigma),
                bound_alt=self.bound_alt(theta, psi, sigma),
                bound_alt_simplified=self.bound_alt_simplified(theta, psi, sigma),
            )
            for psi in np.linspace(0.0, 0.5 * math.pi, points)
        ]
        log_info("bound sweep built", theta=theta, sigma=sigma, points=points)
        return rows
