from __future__ import annotations

import math

import numpy as np

from waylimit.core.config import settings
from waylimit.core.logger import log_error
from waylimit.domain.gate_domain import (
    CONVENTION_AXIS,
    ConservedLaw,
    GateSpec,
    GeometryReport,
    RotatedFrame,
)
from waylimit.services import linalg


TWO_PI = 2 * math.pi

_NAMED_GATES: dict[str, GateSpec] = {
    "X": GateSpec(phi=1.5 * math.pi, theta=math.pi, axis=(1.0, 0.0, 0.0)),
    "Y": GateSpec(phi=1.5 * math.pi, theta=math.pi, axis=(0.0, 1.0, 0.0)),
    "Z": GateSpec(phi=1.5 * math.pi, theta=math.pi, axis=(0.0, 0.0, 1.0)),
    "H": GateSpec(phi=1.5 * math.pi, theta=math.pi, axis=(1 / math.sqrt(2), 0.0, 1 / math.sqrt(2))),
}


def _wrap_angle(angle: float) -> float:
    wrapped = angle % TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


def _canonical_half_turn(phi: float, axis: np.ndarray) -> tuple[float, np.ndarray]:
    # (φ, u) and (φ+π, −u) give the same matrix at θ = π
    for component in axis:
        if abs(component) > 1e-12:
            if component < 0:
                return _wrap_angle(phi + math.pi), -axis
            break
    return phi, axis


class BlochService:
    """Bloch-sphere data for gates and conserved quantities."""

    def decompose_gate(self, u2: np.ndarray) -> GateSpec:
        u2 = linalg.as_matrix(u2)
        if u2.shape != (2, 2) or not linalg.is_unitary(u2):
            log_error("decompose_gate needs a 2x2 unitary", shape=u2.shape)
            raise ValueError("non_unitary_input")

        # det U = e^{2iφ}; the trace picks the branch with cos(θ/2) ≥ 0
        phi = 0.5 * np.angle(np.linalg.det(u2))
        reduced = np.exp(-1j * phi) * u2
        if np.trace(reduced).real < 0:
            phi += math.pi
            reduced = -reduced
        cos_half = min(max(0.5 * np.trace(reduced).real, -1.0), 1.0)
        sin_axis = np.array([0.5 * np.trace(p @ reduced).imag for p in linalg.PAULIS])
        sin_half = float(np.linalg.norm(sin_axis))

        if sin_half <= 1e-12:
            return GateSpec(phi=_wrap_angle(phi), theta=0.0, axis=CONVENTION_AXIS)

        theta = 2.0 * math.atan2(sin_half, cos_half)
        axis = sin_axis / sin_half
        phi = _wrap_angle(phi)
        if cos_half <= 1e-12:
            phi, axis = _canonical_half_turn(phi, axis)
        return GateSpec(phi=phi, theta=min(theta, math.pi), axis=tuple(axis / np.linalg.norm(axis)))

    def gate_from_spec(self, spec: GateSpec) -> np.ndarray:
        half = 0.5 * spec.theta
        body = math.cos(half) * linalg.PAULI_I + 1j * math.sin(half) * linalg.pauli_vector_operator(spec.axis)
        return np.exp(1j * spec.phi) * body

    def named_gate(self, name: str) -> GateSpec:
        spec = _NAMED_GATES.get(name.upper())
        if spec is None:
            log_error("unknown gate name", name=name)
            raise ValueError("unknown_gate")
        return spec

    def custom_gate(self, phi: float, theta: float, axis: tuple[float, float, float]) -> GateSpec:
        vec = np.asarray(axis, dtype=float)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0 or not 0.0 <= theta <= math.pi:
            log_error("custom gate out of range", theta=theta, axis=axis)
            raise ValueError("unknown_gate")
        if theta == 0.0:
            return GateSpec(phi=_wrap_angle(phi), theta=0.0, axis=CONVENTION_AXIS)
        return GateSpec(phi=_wrap_angle(phi), theta=theta, axis=tuple(vec / norm))

    def standard_conserved(self, l_s: np.ndarray, ancilla_operator: np.ndarray) -> ConservedLaw:
        """Write L_S as (b−c)I + c l·σ."""
        values, _ = linalg.hermitian_eig(l_s)
        if values.shape != (2,):
            log_error("conserved qubit operator must be 2x2", shape=values.shape)
            raise ValueError("dimension_mismatch")
        a, b = float(values[0]), float(values[1])
        if b - a <= settings.spectral_gap_tol:
            log_error("scalar qubit operator poses no constraint", a=a, b=b)
            raise ValueError("degenerate_law")
        c = 0.5 * (b - a)
        direction = linalg.bloch_components((linalg.as_matrix(l_s) - (b - c) * linalg.PAULI_I) / c)
        direction = direction / np.linalg.norm(direction)
        return ConservedLaw(b=b, c=c, direction=tuple(direction), ancilla_operator=ancilla_operator)

    def relative_angle(self, spec: GateSpec, law: ConservedLaw) -> GeometryReport:
        u = spec.axis_vector
        l = law.direction_vector
        sin_psi = float(np.linalg.norm(np.cross(u, l)))
        cos_psi = min(max(float(np.dot(l, u)), -1.0), 1.0)
        psi = math.atan2(sin_psi, cos_psi)
        s = min(math.sin(0.5 * spec.theta) ** 2 * sin_psi**2, 1.0)
        return GeometryReport(psi=psi, two_gamma=self.gamma_from(spec.theta, psi), s=s)

    def gamma_from(self, theta: float, psi: float) -> float:
        """2γ, the angle between l and its image l′ under the gate, from cos 2γ = 1 − 2s."""
        s = min(math.sin(0.5 * theta) ** 2 * math.sin(psi) ** 2, 1.0)
        return math.atan2(2.0 * math.sqrt(s * (1.0 - s)), 1.0 - 2.0 * s)

    def rotated_law_vector(self, spec: GateSpec, law: ConservedLaw) -> np.ndarray:
        """l′ with U_S†(l·σ)U_S = l′·σ."""
        u_s = self.gate_from_spec(spec)
        rotated = linalg.dagger(u_s) @ linalg.pauli_vector_operator(law.direction) @ u_s
        return linalg.bloch_components(rotated)

    def rotated_frame(self, law: ConservedLaw, spec: GateSpec) -> RotatedFrame:
        u = spec.axis_vector
        l = law.direction_vector
        normal = np.cross(l, u)
        sin_psi = float(np.linalg.norm(normal))
        if sin_psi <= settings.frame_tol:
            log_error("rotated frame undefined for aligned axes", sin_psi=sin_psi)
            raise ValueError("frame_degenerate")
        cos_psi = float(np.dot(l, u))
        l3 = linalg.pauli_vector_operator(l)
        l2 = linalg.pauli_vector_operator(normal / sin_psi)
        l1 = -1j * l2 @ l3
        return RotatedFrame(l1=l1, l2=l2, l3=l3, u_prime=(sin_psi, 0.0, cos_psi))
