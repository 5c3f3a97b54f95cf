"""Dense linear algebra for small Hilbert spaces.

Operators are plain complex ``numpy`` arrays. Whenever a system is joined
with the control qubit, the control is the *second* tensor factor, so a
joint index reads ``(system_index, control_index)`` in row-major order.

Superoperators use the row-major vectorisation ``vec(X) = X.reshape(-1)``,
for which ``vec(A X B) = (A kron B.T) vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ContractViolation


@dataclass
class Tolerances:
    hermitian: float = 1e-12
    positivity: float = 1e-10
    trace: float = 1e-12


#: Package-wide tolerances; mutate attributes to loosen or tighten checks.
TOL = Tolerances()

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def projector(ket: np.ndarray) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def _square(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation(f"{name} has non-finite entries")
    return m


def is_hermitian(m: np.ndarray, atol: float | None = None) -> bool:
    atol = TOL.hermitian if atol is None else atol
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= atol)


def check_density_matrix(rho, name: str = "rho") -> np.ndarray:
    """Return ``rho`` as a complex array, raising if it is not a valid state."""
    rho = _square(rho, name)
    if not is_hermitian(rho):
        raise ContractViolation(f"{name} is not Hermitian")
    if abs(np.trace(rho) - 1) > TOL.trace:
        raise ContractViolation(f"{name} has trace {np.trace(rho).real:.15g}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -TOL.positivity:
        raise ContractViolation(f"{name} is not positive semidefinite")
    return rho


def hermitian_eigenvalues(m) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix.

    Raises
    ------
    ContractViolation
        If ``m`` deviates from Hermiticity by more than the positivity tolerance.
    """
    m = _square(m)
    if not is_hermitian(m, TOL.positivity):
        raise ContractViolation("hermitian_eigenvalues requires a Hermitian matrix")
    return np.linalg.eigvalsh((m + dagger(m)) / 2)


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(hermitian_eigenvalues(m))))


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``."""
    a = _square(a, "a")
    b = _square(b, "b")
    if a.shape != b.shape:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    return 0.5 * trace_norm(a - b)


def kron(a, b) -> np.ndarray:
    """``out[i*db + k, j*db + l] = a[i, j] * b[k, l]``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    (ra, ca), (rb, cb) = a.shape, b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def partial_trace_control(joint, system_dim: int) -> np.ndarray:
    """Trace out the control qubit (second tensor factor) of a joint operator."""
    joint = _square(joint, "joint")
    if joint.shape[0] != 2 * system_dim:
        raise ContractViolation(
            f"joint dimension {joint.shape[0]} is not system_dim*2 = {2 * system_dim}"
        )
    return np.einsum("ikjk->ij", joint.reshape(system_dim, 2, system_dim, 2))


def kraus_superoperator(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Superoperator ``sum_i K_i kron conj(K_i)`` of an operator-sum map."""
    ks = np.asarray(kraus, dtype=complex)
    d = ks.shape[-1]
    return np.einsum("kab,kcd->acbd", ks, ks.conj()).reshape(d * d, d * d)


def apply_superoperator(superop: np.ndarray, x: np.ndarray) -> np.ndarray:
    d = x.shape[0]
    return (superop @ x.reshape(-1)).reshape(d, d)


def choi_matrix(map_action: Callable[[np.ndarray], np.ndarray], d: int) -> np.ndarray:
    """Choi state ``(id kron map)|psi><psi|`` with ``|psi> = sum_i |ii>/sqrt(d)``.

    The first tensor factor is the untouched reference, the second carries
    the map output.
    """
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            choi += kron(unit, map_action(unit))
    return choi / d


def superoperator_choi(superop: np.ndarray) -> np.ndarray:
    """Same state as :func:`choi_matrix`, read off the superoperator by reshuffling."""
    d = int(round(np.sqrt(superop.shape[0])))
    return superop.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d * d, d * d) / d


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed random state of the given rank (full rank by default)."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real
