"""Dense complex matrix kernel shared by every service.

Matrices are plain ``numpy`` complex arrays. Functions here are pure; nothing
keeps state between calls.
"""

from __future__ import annotations

import numpy as np

from waylimit.core.config import settings
from waylimit.core.logger import log_error


PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def as_matrix(m: np.ndarray) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        log_error("expected a 2-d matrix", shape=arr.shape)
        raise ValueError("dimension_mismatch")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def is_square(m: np.ndarray) -> bool:
    return m.ndim == 2 and m.shape[0] == m.shape[1]


def is_hermitian(m: np.ndarray, tol: float | None = None) -> bool:
    tol = settings.hermitian_tol if tol is None else tol
    m = np.asarray(m, dtype=complex)
    if not is_square(m):
        return False
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def is_unitary(m: np.ndarray, tol: float | None = None) -> bool:
    tol = settings.unitary_tol if tol is None else tol
    m = np.asarray(m, dtype=complex)
    if not is_square(m):
        return False
    residual = dagger(m) @ m - np.eye(m.shape[0])
    return bool(np.max(np.abs(residual), initial=0.0) <= tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_ancilla(m: np.ndarray, dim_s: int, dim_a: int) -> np.ndarray:
    """Trace out the second tensor factor of an operator on S⊗A."""
    m = as_matrix(m)
    if m.shape != (dim_s * dim_a, dim_s * dim_a):
        log_error("partial trace dimension mismatch", shape=m.shape, dim_s=dim_s, dim_a=dim_a)
        raise ValueError("dimension_mismatch")
    return np.einsum("iaja->ij", m.reshape(dim_s, dim_a, dim_s, dim_a))


def hermitian_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix.

    Inputs within ``settings.hermitian_tol`` of Hermitian are symmetrized
    before decomposition.
    """
    h = as_matrix(h)
    if not is_hermitian(h):
        log_error("hermitian_eig received a non-Hermitian matrix", shape=h.shape)
        raise ValueError("non_hermitian_input")
    return np.linalg.eigh(0.5 * (h + dagger(h)))


def unitary_exp(h: np.ndarray, scale: float) -> np.ndarray:
    """exp(i·scale·h) through the spectral decomposition of h."""
    values, vectors = hermitian_eig(h)
    return (vectors * np.exp(1j * scale * values)) @ dagger(vectors)


def operator_norm(m: np.ndarray) -> float:
    m = as_matrix(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, ord=2))


def pauli_vector_operator(a: np.ndarray) -> np.ndarray:
    """a·σ for a real 3-vector a."""
    ax, ay, az = np.asarray(a, dtype=float)
    return ax * PAULI_X + ay * PAULI_Y + az * PAULI_Z


def bloch_components(m: np.ndarray) -> np.ndarray:
    """Real parts of ½Tr(σᵢ m), i.e. the vector a in m = a₀I + a·σ."""
    m = as_matrix(m)
    return np.array([0.5 * np.trace(p @ m).real for p in PAULIS])


def expectation(op: np.ndarray, state: np.ndarray) -> complex:
    """⟨state|op|state⟩ for a vector, Tr(op·state) for a density matrix."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    return complex(np.trace(op @ state))
