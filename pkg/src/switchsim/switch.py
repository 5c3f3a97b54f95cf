"""The quantum switch of two channel uses.

Layout convention: the control qubit is the second tensor factor, and
control ``|0>`` routes the system through channel 1 first and channel 2
second (``N2 o N1``), control ``|1>`` through the opposite order::

    S_ij = K2_j K1_i (x) |0><0|  +  K1_i K2_j (x) |1><1|

:func:`switch_apply` evolves the full system+control state and is the
ground truth of the package. :func:`reduced_kraus` gives the equivalent
system-only operator-sum form; the rational closed forms for the
depolarising family are cross-checks only, and disagreements with the
brute-force result are reported through :class:`ClosedFormWarning`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import qlinalg as la
from .channels import GeneralizedPauliSpec, KrausFamily, generalized_pauli_kraus, trace_preservation_error
from .errors import ContractViolation, DegenerateBranchError, DomainError, SingularExpressionError

DEGENERATE_PROBABILITY = 1e-14


def _check_probability(name: str, value: float) -> float:
    if not 0 <= value <= 1:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


@dataclass(frozen=True)
class ControlSpec:
    """Preparation of the control qubit.

    ``pure_computational``: ``sqrt(p)|0> + sqrt(1-p)|1>`` (``p = 1/2`` is ``|+>``).
    ``fourier_mixture``: ``p|+><+| + (1-p)|-><-|``.
    """

    kind: str
    p: float

    def __post_init__(self):
        if self.kind not in ("pure_computational", "fourier_mixture"):
            raise DomainError(f"unknown control kind {self.kind!r}")
        _check_probability("p", self.p)

    @classmethod
    def pure_computational(cls, p: float) -> "ControlSpec":
        return cls("pure_computational", p)

    @classmethod
    def fourier_mixture(cls, p: float) -> "ControlSpec":
        return cls("fourier_mixture", p)

    @classmethod
    def plus(cls) -> "ControlSpec":
        return cls("pure_computational", 0.5)

    def ensemble(self) -> list[tuple[float, np.ndarray]]:
        """Weights and kets of the control state, zero weights dropped."""
        if self.kind == "pure_computational":
            ket = np.array([np.sqrt(self.p), np.sqrt(1 - self.p)], dtype=complex)
            return [(1.0, ket)]
        pairs = [(self.p, la.KET_PLUS), (1 - self.p, la.KET_MINUS)]
        return [(w, k) for w, k in pairs if w > 0]

    def state(self) -> np.ndarray:
        return sum(w * la.projector(k) for w, k in self.ensemble())


@dataclass(frozen=True)
class MeasurementSpec:
    """The control effect that is post-selected; its complement is ``I - effect``.

    ``pure_computational``: ``|M_q><M_q|`` with ``|M_q> = sqrt(q)|0> + sqrt(1-q)|1>``.
    ``fourier_povm``: ``q1|+><+| + q2|-><-|``.
    ``plus_projector``: ``|+><+|``.
    """

    kind: str
    q: float = 0.5
    q1: float = 1.0
    q2: float = 0.0

    def __post_init__(self):
        if self.kind not in ("pure_computational", "fourier_povm", "plus_projector"):
            raise DomainError(f"unknown measurement kind {self.kind!r}")
        for name in ("q", "q1", "q2"):
            _check_probability(name, getattr(self, name))

    @classmethod
    def pure_computational(cls, q: float) -> "MeasurementSpec":
        return cls("pure_computational", q=q)

    @classmethod
    def fourier_povm(cls, q1: float, q2: float) -> "MeasurementSpec":
        return cls("fourier_povm", q1=q1, q2=q2)

    @classmethod
    def plus(cls) -> "MeasurementSpec":
        return cls("plus_projector")

    def effect(self) -> np.ndarray:
        if self.kind == "pure_computational":
            ket = np.array([np.sqrt(self.q), np.sqrt(1 - self.q)], dtype=complex)
            return la.projector(ket)
        if self.kind == "fourier_povm":
            return self.q1 * la.projector(la.KET_PLUS) + self.q2 * la.projector(la.KET_MINUS)
        return la.projector(la.KET_PLUS)


@dataclass(frozen=True)
class SwitchConfig:
    control: ControlSpec
    measurement: MeasurementSpec

    @classmethod
    def ideal(cls) -> "SwitchConfig":
        return cls(ControlSpec.plus(), MeasurementSpec.plus())

    @classmethod
    def quantum_noise(cls, p: float, q: float) -> "SwitchConfig":
        return cls(ControlSpec.pure_computational(p), MeasurementSpec.pure_computational(q))

    @classmethod
    def classical_noise(cls, p: float, q1: float, q2: float) -> "SwitchConfig":
        return cls(ControlSpec.fourier_mixture(p), MeasurementSpec.fourier_povm(q1, q2))

    def is_ideal(self) -> bool:
        return (np.allclose(self.control.state(), la.projector(la.KET_PLUS), atol=1e-15)
                and np.allclose(self.measurement.effect(), la.projector(la.KET_PLUS), atol=1e-15))


@dataclass(frozen=True)
class SwitchOutcome:
    """Normalised post-measurement system state and the outcome probability.

    ``state`` is ``None`` when the branch has (numerically) zero probability.
    """

    state: np.ndarray | None
    probability: float


def _check_kraus_pair(kraus1, kraus2) -> tuple[np.ndarray, np.ndarray]:
    k1 = np.asarray(kraus1, dtype=complex)
    k2 = np.asarray(kraus2, dtype=complex)
    if k1.ndim != 3 or k2.ndim != 3 or k1.shape[1:] != k2.shape[1:]:
        raise ContractViolation(f"Kraus sets have incompatible shapes {k1.shape} and {k2.shape}")
    return k1, k2


def switch_joint_kraus(kraus1: Sequence[np.ndarray], kraus2: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Joint Kraus operators ``S_ij`` on system (x) control, ``i`` over channel 1."""
    k1, k2 = _check_kraus_pair(kraus1, kraus2)
    return list(_joint_kraus_array(k1, k2))


def _orders(k1: np.ndarray, k2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Stacks of ``K2_j K1_i`` and ``K1_i K2_j``, flattened over ``(i, j)``."""
    d = k1.shape[-1]
    two_after_one = np.einsum("jab,ibc->ijac", k2, k1).reshape(-1, d, d)
    one_after_two = np.einsum("iab,jbc->ijac", k1, k2).reshape(-1, d, d)
    return two_after_one, one_after_two


def _joint_kraus_array(k1: np.ndarray, k2: np.ndarray) -> np.ndarray:
    first, second = _orders(k1, k2)
    n, d, _ = first.shape
    ops = np.zeros((n, d, 2, d, 2), dtype=complex)
    ops[:, :, 0, :, 0] = first
    ops[:, :, 1, :, 1] = second
    return ops.reshape(n, 2 * d, 2 * d)


def _branch(numerator: np.ndarray) -> SwitchOutcome:
    prob = float(np.trace(numerator).real)
    if prob < DEGENERATE_PROBABILITY:
        return SwitchOutcome(None, max(prob, 0.0))
    state = numerator / prob
    return SwitchOutcome((state + la.dagger(state)) / 2, prob)


def switch_apply(kraus1, kraus2, rho, control: ControlSpec | None = None,
                 meas: MeasurementSpec | None = None) -> tuple[SwitchOutcome, SwitchOutcome]:
    """Run the switch on ``rho`` and post-select the control.

    Returns the outcome for the effect and for its complement ``I - effect``.
    Defaults are the ideal switch: control ``|+>`` and effect ``|+><+|``.

    Raises
    ------
    DegenerateBranchError
        If the effect outcome has probability below ``1e-14``. A degenerate
        complement is returned with ``state=None`` instead.
    """
    control = ControlSpec.plus() if control is None else control
    meas = MeasurementSpec.plus() if meas is None else meas
    rho = la.check_density_matrix(rho)
    k1, k2 = _check_kraus_pair(kraus1, kraus2)
    if k1.shape[1:] != rho.shape:
        raise ContractViolation("state and Kraus operators have different dimensions")
    if trace_preservation_error(k1) > 1e-10 or trace_preservation_error(k2) > 1e-10:
        raise ContractViolation("switch_apply needs trace-preserving Kraus sets")
    d = rho.shape[0]
    ops = _joint_kraus_array(k1, k2)
    joint = (ops @ la.kron(rho, control.state()) @ ops.conj().transpose(0, 2, 1)).sum(axis=0)
    effect = meas.effect()
    outcomes = []
    for e in (effect, np.eye(2) - effect):
        numerator = la.partial_trace_control(la.kron(np.eye(d), e) @ joint, d)
        outcomes.append(_branch(numerator))
    if outcomes[0].state is None:
        raise DegenerateBranchError(outcomes[0].probability)
    return outcomes[0], outcomes[1]


def _canonical_eigvecs(effect: np.ndarray) -> list[tuple[float, np.ndarray]]:
    vals, vecs = np.linalg.eigh(effect)
    out = []
    for m, v in zip(vals, vecs.T):
        if m <= 1e-15:
            continue
        lead = v[np.argmax(np.abs(v) > 1e-12)]
        out.append((float(m), v * abs(lead) / lead))
    return out


def switch_coefficients(control: ControlSpec, effect: np.ndarray) -> list[tuple[complex, complex]]:
    """Weights ``(chi1, chi2)`` of the two orders in each reduced Kraus term.

    One pair per (control ensemble member, effect eigenvector):
    ``chi1 = sqrt(w m) <e|0><0|psi>`` multiplies ``K2 K1``,
    ``chi2 = sqrt(w m) <e|1><1|psi>`` multiplies ``K1 K2``.
    """
    pairs = []
    for w, psi in control.ensemble():
        for m, e in _canonical_eigvecs(effect):
            scale = np.sqrt(w * m)
            chi1 = scale * e[0].conj() * psi[0]
            chi2 = scale * e[1].conj() * psi[1]
            if abs(chi1) > 0 or abs(chi2) > 0:
                pairs.append((complex(chi1), complex(chi2)))
    return pairs


def _combine(k1: np.ndarray, k2: np.ndarray, chis: np.ndarray) -> list[np.ndarray]:
    first, second = _orders(k1, k2)
    ops = chis[:, 0, None, None, None] * first + chis[:, 1, None, None, None] * second
    return list(ops.reshape(-1, *first.shape[1:]))


def _reduced(k1: np.ndarray, k2: np.ndarray, control: ControlSpec, effect: np.ndarray) -> list[np.ndarray]:
    chis = np.array(switch_coefficients(control, effect)).reshape(-1, 2)
    return _combine(k1, k2, chis)


def reduced_kraus(kraus1, kraus2, control: ControlSpec | None = None,
                  meas: MeasurementSpec | None = None) -> list[np.ndarray]:
    """System-only Kraus operators of the un-normalised effect branch.

    ``sum_k Kt_k rho Kt_k^dagger`` equals the numerator that
    :func:`switch_apply` normalises. For the ideal switch the operators are
    ``(K1_i K2_j + K2_j K1_i) / 2``.
    """
    control = ControlSpec.plus() if control is None else control
    meas = MeasurementSpec.plus() if meas is None else meas
    k1, k2 = _check_kraus_pair(kraus1, kraus2)
    return _reduced(k1, k2, control, meas.effect())


@dataclass(frozen=True)
class SwitchedFamily:
    """Post-selected switch of two channel families, both used for time ``t``.

    ``branch`` selects the effect (``"effect"``) or its complement.
    """

    family1: KrausFamily
    family2: KrausFamily
    config: SwitchConfig = SwitchConfig.ideal()
    branch: str = "effect"

    def __post_init__(self):
        if self.branch not in ("effect", "complement"):
            raise DomainError(f"branch must be 'effect' or 'complement', got {self.branch!r}")

    @property
    def dim(self) -> int:
        return self.family1.dim

    def _effect(self) -> np.ndarray:
        e = self.config.measurement.effect()
        return e if self.branch == "effect" else np.eye(2) - e

    @cached_property
    def _chis(self) -> np.ndarray:
        return np.array(switch_coefficients(self.config.control, self._effect())).reshape(-1, 2)

    def kraus(self, t: float) -> list[np.ndarray]:
        k1 = np.asarray(self.family1(t), dtype=complex)
        k2 = k1 if self.family2 is self.family1 else np.asarray(self.family2(t), dtype=complex)
        return _combine(k1, k2, self._chis)

    def superoperator(self, t: float) -> np.ndarray:
        """Normalised branch map as a superoperator.

        The branch is linear only when ``sum Kt^dagger Kt`` is proportional
        to the identity, so the outcome probability does not depend on the
        input; this is verified on every call.
        """
        ops = np.asarray(self.kraus(t))
        d = self.dim
        weight = np.einsum("kba,kbc->ac", ops.conj(), ops)
        prob = np.trace(weight).real / d
        if prob < DEGENERATE_PROBABILITY:
            raise DegenerateBranchError(prob)
        if np.max(np.abs(weight - prob * np.eye(d))) > 1e-10:
            raise ContractViolation("post-selected branch probability depends on the input state")
        return la.kraus_superoperator(ops) / prob

    def outcome(self, t: float, rho) -> SwitchOutcome:
        effect, complement = switch_apply(self.family1(t), self.family2(t), rho,
                                          self.config.control, self.config.measurement)
        return effect if self.branch == "effect" else complement

    def evolve(self, t: float, rho) -> np.ndarray:
        """Brute-force (system+control) evolution of ``rho`` followed by post-selection."""
        out = self.outcome(t, rho)
        if out.state is None:
            raise DegenerateBranchError(out.probability)
        return out.state


# -- closed forms for the switched depolarising channel ----------------------

def switched_coherence(t: float, gamma: float) -> float:
    """``C(t) = (G^2 - 2G + 9) / (5G^2 + 6G - 3)`` with ``G = exp(4 gamma t)``."""
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    # divide through by G^2 so large t stays finite
    x = np.exp(-4 * gamma * t)
    return float((1 - 2 * x + 9 * x * x) / (5 + 6 * x - 3 * x * x))


def _bloch_mixing(rho0, c: float) -> np.ndarray:
    rho0 = la.check_density_matrix(rho0, "rho0")
    if rho0.shape != (2, 2):
        raise ContractViolation("closed forms act on qubits only")
    a, b = (1 + c) / 2, (1 - c) / 2
    return np.array([
        [a * rho0[0, 0] + b * rho0[1, 1], c * rho0[0, 1]],
        [c * rho0[1, 0], b * rho0[0, 0] + a * rho0[1, 1]],
    ], dtype=complex)


def closed_form_switched_map(rho0, t: float, gamma: float) -> np.ndarray:
    """Ideal switch of the depolarising channel with itself, '+' outcome."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return _bloch_mixing(rho0, switched_coherence(t, gamma))


def _ratio(num: float, den: float) -> float:
    if abs(den) < 1e-14:
        raise SingularExpressionError(f"denominator {den:.3e} vanishes")
    return float(num / den)


def closed_form_Cpq(t: float, gamma: float, p: float, q: float) -> float:
    """Reference closed-form coherence factor for a pure control and pure effect.

    Evaluated term by term as given. It does not reduce to :func:`switched_coherence`
    at ``p = q = 1/2``; use :func:`switched_coherence_brute_force` for numbers.
    """
    g = np.exp(4 * gamma * t)
    fpq = np.sqrt(p * (1 - p)) * np.sqrt(q * (1 - q))
    num = fpq * (g * g - 2 * g + 5) + p * (4 * q - 2) + 2 * (1 - q)
    den = fpq * (g * g + 6 * g - 3) + p * (4 * q - 2) * g * g
    return _ratio(num, den)


def closed_form_Cpq1q2(t: float, gamma: float, p: float, q1: float, q2: float) -> float:
    """Reference closed-form coherence factor for a Fourier-mixed control and Fourier POVM."""
    g = np.exp(4 * gamma * t)
    s = -1 + 2 * p
    num = (-1 + 10 * p + g * g * s + g * (2 - 4 * p)) * q1 \
        - (-9 + 10 * p + g * g * s + g * (2 - 4 * p)) * q2
    den = (3 - 6 * p + g * g * (3 + 2 * p) + 6 * g * s) * q1 \
        - (3 - 6 * p + g * g * (-5 + 2 * p) + g * s) * q2
    return _ratio(num, den)


def switched_coherence_brute_force(t: float, gamma: float, config: SwitchConfig) -> float:
    """Coherence factor of the switched uniform depolarising channel, by full evolution."""
    from .channels import PauliRates, depolarizing_family

    fam = depolarizing_family(PauliRates.uniform(gamma))
    out = SwitchedFamily(fam, fam, config).evolve(t, la.projector(la.KET_PLUS))
    return float(2 * out[0, 1].real)


class ClosedFormWarning(UserWarning):
    """A reference closed form disagrees with the brute-force switch."""

    def __init__(self, name: str, t: float, closed: float, brute: float):
        super().__init__(f"{name} at t={t:.6g}: closed form {closed:.12g} vs brute force {brute:.12g}")
        self.name, self.t, self.closed, self.brute = name, t, closed, brute


def closed_form_discrepancy(t: float, gamma: float, config: SwitchConfig, tol: float = 1e-10) -> float:
    """|closed form - brute force| of the coherence factor for ``config``.

    Pure-control/pure-effect configurations are compared with
    :func:`closed_form_Cpq`, Fourier ones with :func:`closed_form_Cpq1q2`.
    A :class:`ClosedFormWarning` is emitted above ``tol``.
    """
    c, m = config.control, config.measurement
    if c.kind == "pure_computational" and m.kind == "pure_computational":
        name, closed = "C_pq", closed_form_Cpq(t, gamma, c.p, m.q)
    elif c.kind == "fourier_mixture" and m.kind == "fourier_povm":
        name, closed = "C_pq1q2", closed_form_Cpq1q2(t, gamma, c.p, m.q1, m.q2)
    else:
        name, closed = "C", switched_coherence(t, gamma)
    brute = switched_coherence_brute_force(t, gamma, config)
    gap = abs(closed - brute)
    if gap > tol:
        warnings.warn(ClosedFormWarning(name, t, closed, brute), stacklevel=2)
    return gap


# -- fixed point and linearity of switched generalised Pauli channels --------

def verify_statement1(spec: GeneralizedPauliSpec, control: ControlSpec | None = None,
                      meas: MeasurementSpec | None = None) -> float:
    """Max entrywise deviation of the switched maximally mixed state from ``I/d``."""
    kraus = generalized_pauli_kraus(spec)
    tau = la.maximally_mixed(spec.dim)
    out, _ = switch_apply(kraus, kraus, tau, control, meas)
    return float(np.max(np.abs(out.state - tau)))


@dataclass(frozen=True)
class TraceCheck:
    spread: float
    traces: np.ndarray
    analytic: float | None  # only for the ideal switch


def ideal_switch_trace(spec: GeneralizedPauliSpec) -> float:
    """``sum p_kl p_rs (1 + omega^{ks - rl}) / 2`` over all index quadruples."""
    d = spec.dim
    p = spec.probabilities.reshape(-1)
    k, l = np.divmod(np.arange(d * d), d)
    phase = np.exp(2j * np.pi / d * (np.outer(k, l) - np.outer(l, k)))
    return float((np.outer(p, p) * (1 + phase)).sum().real / 2)


def verify_statement2(spec: GeneralizedPauliSpec, sample_states: Sequence[np.ndarray],
                      control: ControlSpec | None = None,
                      meas: MeasurementSpec | None = None) -> TraceCheck:
    """Spread of the post-selection probability across ``sample_states``."""
    if len(sample_states) < 2:
        raise ContractViolation("need at least two sample states")
    kraus = generalized_pauli_kraus(spec)
    traces = np.array([switch_apply(kraus, kraus, rho, control, meas)[0].probability
                       for rho in sample_states])
    config = SwitchConfig(control or ControlSpec.plus(), meas or MeasurementSpec.plus())
    analytic = ideal_switch_trace(spec) if config.is_ideal() else None
    return TraceCheck(float(traces.max() - traces.min()), traces, analytic)
