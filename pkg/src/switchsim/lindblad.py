"""Time-local generator reconstruction from a dynamical map.

A map ``Omega_t`` is written in an orthonormal Hermitian operator basis
``{G_n}`` (``G_0 = I/sqrt(d)``) as the real matrix
``F_mn(t) = Tr[G_m Omega_t(G_n)]``. If ``F`` is invertible the generator in
the same basis is ``L(t) = dF/dt F(t)^-1``. Canonical decay rates are the
eigenvalues of the generator's Choi matrix restricted to the complement of
the maximally entangled state; for qubit Pauli-diagonal maps they coincide
with the coefficients of the three Pauli dissipators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import qlinalg as la
from .errors import ContractViolation, DomainError, InversionError
from .numerics import derivative

MapAt = Callable[[float], np.ndarray]  # t -> superoperator (row-major vec)

MAX_CONDITION = 1e10


@dataclass(frozen=True, eq=False)
class BasisSet:
    dim: int
    elements: np.ndarray  # (d*d, d, d)

    @property
    def vec_matrix(self) -> np.ndarray:
        """Columns are ``vec(G_n)``; unitary for an orthonormal basis."""
        return self.elements.reshape(self.dim**2, -1).T

    def coordinates(self, rho: np.ndarray) -> np.ndarray:
        """``r_n = Tr[G_n rho]`` (real for Hermitian ``rho``)."""
        return np.einsum("nab,ba->n", self.elements, rho).real

    def operator(self, r: np.ndarray) -> np.ndarray:
        return np.einsum("n,nab->ab", r, self.elements)


@lru_cache(maxsize=None)
def gell_mann_basis(d: int) -> BasisSet:
    """Normalised generalised Gell-Mann basis; for ``d = 2`` it is ``{I, X, Y, Z}/sqrt(2)``."""
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")
    elements = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k], anti[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            elements += [sym, anti]
    for l in range(1, d):
        diag = np.zeros(d, dtype=complex)
        diag[:l] = 1
        diag[l] = -l
        elements.append(np.diag(diag) / np.sqrt(l * (l + 1)))
    return BasisSet(d, np.array(elements))


def pauli_basis() -> BasisSet:
    return gell_mann_basis(2)


def f_matrix(map_at: MapAt, t: float, basis: BasisSet) -> np.ndarray:
    """Real matrix ``F_mn = Tr[G_m Omega_t(G_n)]``."""
    b = basis.vec_matrix
    f = la.dagger(b) @ map_at(t) @ b
    if np.max(np.abs(f.imag)) > 1e-10:
        raise ContractViolation("map does not preserve Hermiticity (complex F entries)")
    return f.real


def _inverse(f: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(f)
    if not cond <= MAX_CONDITION:
        raise InversionError(f"F(t) is ill-conditioned (cond = {cond:.3e})")
    return np.linalg.inv(f)


def l_matrix(map_at: MapAt, t: float, basis: BasisSet, h: float = 1e-5) -> np.ndarray:
    """``L(t) = dF/dt F(t)^-1`` with a Richardson-extrapolated finite difference."""
    f = f_matrix(map_at, t, basis)
    fdot = derivative(lambda s: f_matrix(map_at, s, basis), t, h)
    return fdot @ _inverse(f)


def gamma_from_C(c_of_t: Callable[[float], float], t: float, h: float = 1e-5) -> float:
    """Dissipator rate ``-(1/4) d ln C / dt`` of a map whose Bloch vector scales by ``C(t)``."""
    def log_c(s):
        c = c_of_t(s)
        if not c > 0:
            raise DomainError(f"C({s:.6g}) = {c:.3e} is not positive")
        return np.log(c)

    return float(-0.25 * derivative(log_c, t, h))


def gamma_S_closed_form(t: float, gamma: float) -> float:
    """Rate of the ideally switched depolarising channel.

    ``16 gamma (-G)(G^2 - 6G - 3) / ((G^2 - 2G + 9)(5G^2 + 6G - 3))``
    with ``G = exp(4 gamma t)``; positive before the characteristic time,
    negative after, tending to ``0-``.
    """
    if t < 0 or not gamma > 0:
        raise DomainError(f"need t >= 0 and gamma > 0, got t={t}, gamma={gamma}")
    x = np.exp(-4 * gamma * t)  # 1/G keeps large t finite
    return float(16 * gamma * (-x) * (1 - 6 * x - 3 * x * x)
                 / ((1 - 2 * x + 9 * x * x) * (5 + 6 * x - 3 * x * x)))


def generator_superoperator(l_mat: np.ndarray, basis: BasisSet) -> np.ndarray:
    b = basis.vec_matrix
    return b @ l_mat @ la.dagger(b)


def _complement_of_max_entangled(d: int) -> np.ndarray:
    psi = np.eye(d).reshape(-1) / np.sqrt(d)
    # orthonormal columns spanning psi's orthogonal complement
    q, _ = np.linalg.qr(np.column_stack([psi, np.eye(d * d)]))
    return q[:, 1:d * d]


def canonical_rates(l_mat: np.ndarray, basis: BasisSet) -> np.ndarray:
    """Ascending canonical decay rates of the generator ``L`` (``d*d - 1`` values)."""
    choi = la.superoperator_choi(generator_superoperator(l_mat, basis))
    v = _complement_of_max_entangled(basis.dim)
    block = la.dagger(v) @ choi @ v
    return la.hermitian_eigenvalues((block + la.dagger(block)) / 2)


def pauli_dissipator_rates(l_mat: np.ndarray) -> np.ndarray:
    """Rates ``(G1, G2, G3)`` of ``sum_i G_i (s_i rho s_i - rho)`` from a Pauli-basis ``L``.

    Bloch component ``x`` decays at ``2(G2 + G3)``, ``y`` at ``2(G1 + G3)``
    and ``z`` at ``2(G1 + G2)``; the 3x3 system is inverted directly.
    """
    decay = -np.diag(l_mat)[1:]
    relation = 2 * np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)
    return np.linalg.solve(relation, decay)


@dataclass(frozen=True)
class CPDivisibility:
    cp_divisible: bool
    rates: np.ndarray
    min_choi_eigenvalue: float


def cp_divisibility_flag(l_mat: np.ndarray, basis: BasisSet, atol: float = 1e-8) -> CPDivisibility:
    """CP-divisible at this instant iff every canonical rate is ``>= -atol``."""
    rates = canonical_rates(l_mat, basis)
    return CPDivisibility(bool(rates[0] >= -atol), rates, float(rates[0]))


@dataclass(frozen=True)
class LindbladReport:
    t: float
    F: np.ndarray
    L: np.ndarray
    rates: np.ndarray
    Gamma_S: float
    cp_divisible: bool

    def __repr__(self):
        return (f"LindbladReport(t={self.t:.6g}, Gamma_S={self.Gamma_S:.6g}, "
                f"cp_divisible={self.cp_divisible})")


def lindblad_report(map_at: MapAt, t: float, basis: BasisSet | None = None,
                    h: float = 1e-5) -> LindbladReport:
    """Reconstruct ``F``, ``L`` and the rates at ``t``.

    For qubits the rates are the three Pauli-dissipator coefficients (valid
    for Pauli-diagonal generators) and ``Gamma_S`` is their mean, which is
    the common rate of a symmetric channel. Otherwise the canonical rates
    are reported.
    """
    probe = map_at(t)
    d = int(round(np.sqrt(probe.shape[0])))
    basis = gell_mann_basis(d) if basis is None else basis
    f = f_matrix(map_at, t, basis)
    l_mat = l_matrix(map_at, t, basis, h)
    flag = cp_divisibility_flag(l_mat, basis)
    rates = pauli_dissipator_rates(l_mat) if d == 2 else flag.rates
    return LindbladReport(t, f, l_mat, rates, float(np.mean(rates)), flag.cp_divisible)


def integrate_generator(map_at: MapAt, rho0: np.ndarray, times: np.ndarray,
                        basis: BasisSet | None = None, h: float = 1e-5) -> np.ndarray:
    """Solve ``dr/dt = L(t) r`` from ``r(0)`` and return the states at ``times``."""
    rho0 = la.check_density_matrix(rho0, "rho0")
    basis = gell_mann_basis(rho0.shape[0]) if basis is None else basis
    sol = solve_ivp(lambda s, r: l_matrix(map_at, s, basis, h) @ r,
                    (0.0, float(times[-1])), basis.coordinates(rho0),
                    t_eval=times, rtol=1e-10, atol=1e-12, method="DOP853")
    return np.array([basis.operator(r) for r in sol.y.T])
