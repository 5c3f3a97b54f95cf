"""Time-parametrised CPTP channel families.

Two qubit families are provided:

* :func:`depolarizing_kraus` -- the four-operator phase-covariant Kraus set
  (two ladder operators and two diagonal ones) parametrised by the
  integrated rates ``xi1 = int(g1 + g2)`` and ``xi2 = int(g2 + g3)``;
* :func:`pauli_channel_kraus` -- the exact solution of the Pauli master
  equation ``drho/dt = sum_i g_i (s_i rho s_i - rho)`` for arbitrary,
  possibly unequal, rates.

For equal rates the two coincide: every Bloch component contracts by
``exp(-4 g t)``. Generalised Pauli (Weyl) channels cover any dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import integrate

from . import qlinalg as la
from .errors import ContractViolation, DomainError

Rate = Union[float, Callable[[float], float]]


@dataclass(frozen=True)
class PauliRates:
    """Lindblad coefficients of the three Pauli dissipators.

    Each rate is either a non-negative constant or a callable ``t -> rate``;
    callables are integrated numerically.
    """

    gamma1: Rate
    gamma2: Rate
    gamma3: Rate

    @classmethod
    def uniform(cls, gamma: float) -> "PauliRates":
        return cls(gamma, gamma, gamma)

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma3"):
            value = getattr(self, name)
            if not callable(value) and not value >= 0:
                raise DomainError(f"{name} must be non-negative, got {value}")

    def integrated(self, t: float) -> tuple[float, float, float]:
        """``int_0^t gamma_i(s) ds`` for the three rates."""
        out = []
        for rate in (self.gamma1, self.gamma2, self.gamma3):
            if callable(rate):
                out.append(integrate.quad(rate, 0.0, t, epsabs=1e-14, epsrel=1e-12)[0])
            else:
                out.append(float(rate) * t)
        return tuple(out)

    def is_constant(self) -> bool:
        return not any(callable(r) for r in (self.gamma1, self.gamma2, self.gamma3))

    @property
    def scale(self) -> float:
        """Largest constant rate; used to size time steps."""
        if not self.is_constant():
            raise DomainError("scale is only defined for constant rates")
        return max(self.gamma1, self.gamma2, self.gamma3)


def _check_time(t: float) -> None:
    if not t >= 0:
        raise DomainError(f"time must be non-negative, got {t}")


def _amplitudes(t: float, rates: PauliRates) -> tuple[float, float, float]:
    g1, g2, g3 = rates.integrated(t)
    xi1, xi2 = g1 + g2, g2 + g3
    a1 = (1 + np.exp(-2 * xi1)) / 2
    a2 = (1 - np.exp(-2 * xi1)) / 2
    # theta = 0: A3 is real and positive for real rates
    a3 = np.exp(-2 * xi2)
    return a1, a2, a3


def depolarizing_kraus(t: float, rates: PauliRates) -> list[np.ndarray]:
    """Kraus operators ``K1..K4`` of the qubit depolarising family at time ``t``.

    ``K1 = sqrt(A2)|0><1|``, ``K2 = sqrt(A2)|1><0|``,
    ``K3 = sqrt((A1+A3)/2) diag(1, 1)``, ``K4 = sqrt((A1-A3)/2) diag(-1, 1)``.

    Raises
    ------
    DomainError
        For negative ``t``, or for unequal rates for which ``A1 < A3`` and the
        four-operator form stops being completely positive.
    """
    _check_time(t)
    a1, a2, a3 = _amplitudes(t, rates)
    if a1 - a3 < -1e-15:
        raise DomainError(f"A1 - A3 = {a1 - a3:.3e} < 0: rates give no valid Kraus form at t={t}")
    k1 = np.sqrt(a2) * np.array([[0, 1], [0, 0]], dtype=complex)
    k2 = np.sqrt(a2) * np.array([[0, 0], [1, 0]], dtype=complex)
    k3 = np.sqrt((a1 + a3) / 2) * np.diag([1.0, 1.0]).astype(complex)
    k4 = np.sqrt(max(a1 - a3, 0.0) / 2) * np.diag([-1.0, 1.0]).astype(complex)
    return [k1, k2, k3, k4]


def pauli_map_closed_form(rho0, t: float, rates: PauliRates) -> np.ndarray:
    """Populations mix with ``(1 +- e^{-2 xi1})/2``; coherences shrink by ``e^{-2 xi2}``."""
    rho0 = la.check_density_matrix(rho0, "rho0")
    if rho0.shape != (2, 2):
        raise ContractViolation("pauli_map_closed_form acts on qubits only")
    _check_time(t)
    a1, a2, a3 = _amplitudes(t, rates)
    out = np.empty((2, 2), dtype=complex)
    out[0, 0] = rho0[0, 0] * a1 + rho0[1, 1] * a2
    out[1, 1] = 1 - out[0, 0]
    out[0, 1] = rho0[0, 1] * a3
    out[1, 0] = rho0[1, 0] * a3
    return out


def pauli_channel_kraus(t: float, rates: PauliRates) -> list[np.ndarray]:
    """Exact Kraus set ``sqrt(p_i) sigma_i`` solving the Pauli master equation.

    The Bloch components contract by ``lx = e^{-2(g2+g3)}``,
    ``ly = e^{-2(g1+g3)}`` and ``lz = e^{-2(g1+g2)}`` (integrated rates).
    """
    _check_time(t)
    g1, g2, g3 = rates.integrated(t)
    lx, ly, lz = np.exp(-2 * (g2 + g3)), np.exp(-2 * (g1 + g3)), np.exp(-2 * (g1 + g2))
    probs = np.array([
        1 + lx + ly + lz,
        1 + lx - ly - lz,
        1 - lx + ly - lz,
        1 - lx - ly + lz,
    ]) / 4
    probs = np.clip(probs, 0.0, None)
    return [np.sqrt(p) * s for p, s in zip(probs, la.PAULIS)]


def trace_preservation_error(kraus: Sequence[np.ndarray]) -> float:
    d = kraus[0].shape[0]
    total = sum(la.dagger(k) @ k for k in kraus)
    return float(np.max(np.abs(total - np.eye(d))))


def apply_channel(kraus: Sequence[np.ndarray], rho) -> np.ndarray:
    """Operator-sum action ``sum_i K rho K^dagger`` of a trace-preserving Kraus set."""
    rho = la.check_density_matrix(rho)
    if any(k.shape != rho.shape for k in kraus):
        raise ContractViolation("Kraus operators and state have different dimensions")
    if trace_preservation_error(kraus) > 1e-10:
        raise ContractViolation("Kraus set is not trace preserving")
    return sum(k @ rho @ la.dagger(k) for k in kraus)


@dataclass(frozen=True)
class KrausFamily:
    """A channel ``Phi_t`` given by its Kraus operators at each time."""

    dim: int
    kraus_at: Callable[[float], Sequence[np.ndarray]]
    label: str = field(default="", compare=False)

    def __call__(self, t: float) -> list[np.ndarray]:
        return list(self.kraus_at(t))

    def superoperator(self, t: float) -> np.ndarray:
        return la.kraus_superoperator(self.kraus_at(t))

    def evolve(self, t: float, rho) -> np.ndarray:
        return apply_channel(self.kraus_at(t), rho)


def depolarizing_family(rates: PauliRates) -> KrausFamily:
    return KrausFamily(2, lambda t: depolarizing_kraus(t, rates), "depolarizing")


def pauli_family(rates: PauliRates) -> KrausFamily:
    return KrausFamily(2, lambda t: pauli_channel_kraus(t, rates), "pauli")


def identity_family(d: int = 2) -> KrausFamily:
    return KrausFamily(d, lambda t: [np.eye(d, dtype=complex)], "identity")


# -- generalised Pauli (Weyl) channels ---------------------------------------

def weyl_operator(d: int, k: int, l: int) -> np.ndarray:
    """``W_kl = sum_m omega^{mk} |m+l><m|`` with ``omega = exp(2 pi i / d)``.

    This ordering gives ``W_kl W_rs = omega^{ks} W_{k+r, l+s}`` and
    ``W_kl^dagger = omega^{kl} W_{-k, -l}`` (indices mod ``d``).
    """
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")
    if not (0 <= k < d and 0 <= l < d):
        raise DomainError(f"Weyl indices must lie in [0, {d}), got ({k}, {l})")
    omega = np.exp(2j * np.pi / d)
    w = np.zeros((d, d), dtype=complex)
    for m in range(d):
        w[(m + l) % d, m] = omega ** (m * k)
    return w


@dataclass(frozen=True, eq=False)
class GeneralizedPauliSpec:
    """Probabilities ``p[k, l]`` attached to the Weyl operators ``W_kl``."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 2:
            raise ContractViolation(f"probabilities must be a d x d array with d >= 2, got {p.shape}")
        if np.any(p < 0):
            raise ContractViolation("probabilities must be non-negative")
        if abs(p.sum() - 1) > 1e-12:
            raise ContractViolation(f"probabilities sum to {p.sum():.15g}, expected 1")
        object.__setattr__(self, "probabilities", p)

    @property
    def dim(self) -> int:
        return self.probabilities.shape[0]

    @classmethod
    def uniform(cls, d: int) -> "GeneralizedPauliSpec":
        return cls(np.full((d, d), 1.0 / d**2))

    @classmethod
    def identity(cls, d: int) -> "GeneralizedPauliSpec":
        p = np.zeros((d, d))
        p[0, 0] = 1.0
        return cls(p)

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> "GeneralizedPauliSpec":
        """Full-support spec: ``d*d`` exponential draws, normalised."""
        p = rng.exponential(size=(d, d))
        return cls(p / p.sum())


def generalized_pauli_kraus(spec: GeneralizedPauliSpec) -> list[np.ndarray]:
    d = spec.dim
    return [np.sqrt(spec.probabilities[k, l]) * weyl_operator(d, k, l)
            for k in range(d) for l in range(d)]


def classical_mixture_map(kraus1, kraus2, p: float, rho) -> np.ndarray:
    """``p (Phi1 o Phi2)(rho) + (1 - p)(Phi2 o Phi1)(rho)``."""
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    one_two = apply_channel(kraus1, apply_channel(kraus2, rho))
    two_one = apply_channel(kraus2, apply_channel(kraus1, rho))
    return p * one_two + (1 - p) * two_one


def classical_mixture_family(family1: KrausFamily, family2: KrausFamily, p: float) -> KrausFamily:
    """The convex mixture of both orders, as a Kraus family on the system."""
    def kraus_at(t):
        k1, k2 = family1(t), family2(t)
        ops = [np.sqrt(p) * a @ b for a in k1 for b in k2]
        ops += [np.sqrt(1 - p) * b @ a for a in k1 for b in k2]
        return ops

    return KrausFamily(family1.dim, kraus_at, "classical-mixture")
