"""Information loss, switch-induced memory and non-Markovianity measures.

Every distance here is the trace distance. Maps are passed around as
callables: an *evolution* is ``(t, rho) -> state`` and a *map family* is
``t -> superoperator`` (see :mod:`switchsim.lindblad`).

Two non-Markovianity measures are provided:

* BLP: integral of the positive part of ``B(t) = d/dt D(Phi_t(rho), tau)``,
  the rate of information backflow relative to the fixed point ``tau``;
* RHP: integral of ``g(t)``, the excess trace norm of the Choi state of the
  incremental map ``Phi_{t+dt} Phi_t^-1``, which is zero exactly where the
  dynamics is CP-divisible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

from . import qlinalg as la
from .channels import PauliRates, depolarizing_family, pauli_family
from .errors import ContractViolation, ConvergenceError, DomainError, InversionError
from .lindblad import BasisSet, MapAt, canonical_rates, f_matrix, gamma_S_closed_form, \
    gell_mann_basis, l_matrix, _inverse
from .numerics import Quadrature, bisect_root, derivative, sign_changes, simpson
from .switch import SwitchConfig, SwitchedFamily

Evolution = Callable[[float, np.ndarray], np.ndarray]

#: "Infinity" for endpoint forms, in units of 1/gamma.
ASYMPTOTE = 50.0
ASYMPTOTE_TOL = 1e-12
TAIL_TOL = 1e-8
G_THRESHOLD = 1e-10


def _check_gamma(gamma: float) -> float:
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return float(gamma)


def _fixed_point(rho: np.ndarray) -> np.ndarray:
    return la.maximally_mixed(rho.shape[0])


def switched_depolarizing(gamma: float, config: SwitchConfig | None = None) -> SwitchedFamily:
    """The uniform depolarising family switched with itself."""
    fam = depolarizing_family(PauliRates.uniform(_check_gamma(gamma)))
    return SwitchedFamily(fam, fam, config or SwitchConfig.ideal())


# -- information loss and memory ---------------------------------------------

def info_loss(rho1_0, rho2_0, rho1_t, rho2_t) -> float:
    """``D(rho1(0), rho2(0)) - D(rho1(t), rho2(t))``."""
    return la.trace_distance(rho1_0, rho2_0) - la.trace_distance(rho1_t, rho2_t)


def qsm(rho, t: float, gamma: float | None = None, switch_map: Evolution | None = None,
        ergodic_map: Evolution | None = None) -> float:
    """Switch-induced memory ``D(Phi^S_t(rho), Phi_t(rho))``.

    Without explicit maps, ``gamma`` selects the ideally switched and the
    plain uniform depolarising channel.
    """
    if switch_map is None or ergodic_map is None:
        if gamma is None:
            raise ContractViolation("qsm needs gamma or both maps")
        switch_map = switch_map or switched_depolarizing(gamma).evolve
        ergodic_map = ergodic_map or depolarizing_family(PauliRates.uniform(gamma)).evolve
    return la.trace_distance(switch_map(t, rho), ergodic_map(t, rho))


@dataclass(frozen=True)
class QsiRecord:
    t: float
    info_loss_switch: float
    qsm: float
    info_loss_ergodic: float

    @property
    def deviation(self) -> float:
        """``LHS - RHS`` of the switch-induced information inequality; never negative."""
        return self.info_loss_switch + self.qsm - self.info_loss_ergodic


def qsi_series(rho, gamma: float, times: Sequence[float],
               config: SwitchConfig | None = None) -> list[QsiRecord]:
    """Both sides of the information inequality along ``times``.

    The switched evolution is brute force; the reference is one use of the
    uniform depolarising channel. Both fix ``tau = I/2``.
    """
    rho = la.check_density_matrix(rho)
    switched = switched_depolarizing(gamma, config)
    plain = depolarizing_family(PauliRates.uniform(gamma))
    tau = _fixed_point(rho)
    records = []
    for t in times:
        rs, re = switched.evolve(t, rho), plain.evolve(t, rho)
        records.append(QsiRecord(
            float(t),
            info_loss(rho, tau, rs, tau),
            la.trace_distance(rs, re),
            info_loss(rho, tau, re, tau),
        ))
    return records


# -- long-time averages --------------------------------------------------------

@dataclass(frozen=True)
class TimeAverage:
    state: np.ndarray       # average over [0, T]
    half_state: np.ndarray  # average over [0, T/2]
    residual: float         # max-entry difference of the two


def time_average(evolve: Evolution, rho, T_max: float) -> TimeAverage:
    """``(1/T) int_0^T Phi_t(rho) dt`` by adaptive quadrature, plus the half-window average."""
    if not T_max > 0:
        raise DomainError(f"T_max must be positive, got {T_max}")
    rho = la.check_density_matrix(rho)
    half = T_max / 2

    def integrand(t):
        return evolve(t, rho)

    first, _ = quad_vec(integrand, 0.0, half, epsabs=1e-12, epsrel=1e-10)
    second, _ = quad_vec(integrand, half, T_max, epsabs=1e-12, epsrel=1e-10)
    full = (first + second) / T_max
    early = first / half
    return TimeAverage(full, early, float(np.max(np.abs(full - early))))


def time_averaged_state(evolve: Evolution, rho, T_max: float, tol: float = 1e-2) -> np.ndarray:
    """Long-time average of ``evolve(t, rho)``, certified against the ``T_max/2`` average.

    Raises
    ------
    ConvergenceError
        If the two averages differ by more than ``tol``.
    """
    avg = time_average(evolve, rho, T_max)
    if avg.residual > tol:
        raise ConvergenceError(f"time average not converged at T_max={T_max:.6g}", avg.residual)
    return avg.state


@dataclass(frozen=True)
class TimeAverageCheck:
    info_loss_switch: float  # D(rho, tau) - D(avg_S, tau)
    qsm: float               # D(avg_S, avg_plain)
    distance: float          # D(rho, tau)

    @property
    def residual(self) -> float:
        return abs(self.info_loss_switch + self.qsm - self.distance)


def time_avg_equality_check(rho, gamma: float, T_max: float,
                            config: SwitchConfig | None = None,
                            tol: float = 1e-2) -> TimeAverageCheck:
    """Terms of the time-averaged information balance at horizon ``T_max``.

    For ergodic dynamics the averaged inequality becomes an equality; the
    residual shrinks like ``1/T_max``.
    """
    rho = la.check_density_matrix(rho)
    tau = _fixed_point(rho)
    avg_s = time_averaged_state(switched_depolarizing(gamma, config).evolve, rho, T_max, tol)
    avg_e = time_averaged_state(depolarizing_family(PauliRates.uniform(gamma)).evolve, rho,
                                T_max, tol)
    return TimeAverageCheck(
        info_loss(rho, tau, avg_s, tau),
        la.trace_distance(avg_s, avg_e),
        la.trace_distance(rho, tau),
    )


# -- characteristic time -------------------------------------------------------

def characteristic_time(gamma: float, rate: Callable[[float], float] | None = None) -> float:
    """First zero of the switched rate, by bisection on ``[1e-6, 10] / gamma``.

    ``rate`` defaults to the closed-form rate of the ideally switched
    depolarising channel; any other ``t -> rate`` with one sign change in
    the bracket works too.
    """
    gamma = _check_gamma(gamma)
    rate = rate or (lambda t: gamma_S_closed_form(t, gamma))
    return bisect_root(rate, 1e-6 / gamma, 10.0 / gamma, maxiter=200)


def characteristic_time_closed_form(gamma: float) -> float:
    return float(np.log(3 + 2 * np.sqrt(3)) / (4 * _check_gamma(gamma)))


# -- BLP -----------------------------------------------------------------------

@dataclass(frozen=True)
class BlpResult:
    n_inf: float               # endpoint form
    quadrature: Quadrature     # integral of max(B, 0)
    t_minus: float | None      # start of the first backflow window
    d_t_minus: float           # D(Phi_{t_minus}(rho), tau)
    d_infinity: float          # D at the certified asymptote
    windows: tuple = ()

    @property
    def normalized(self) -> float:
        return self.n_inf / (1 + self.n_inf)


def _classify(values: np.ndarray, threshold: float) -> np.ndarray:
    """Sign of each value with a dead zone; dead-zone entries inherit the previous sign."""
    signs = np.where(values > threshold, 1, np.where(values < -threshold, -1, 0))
    nonzero = signs[signs != 0]
    last = nonzero[0] if nonzero.size else 0  # leading dead zone takes the first sign
    for k, s in enumerate(signs):
        if s == 0:
            signs[k] = last
        else:
            last = s
    return signs


def _positive_windows(f: Callable[[float], float], ts: np.ndarray, values: np.ndarray,
                      threshold: float, end: float) -> list[tuple[float, float]]:
    """Intervals where ``f > 0``; edges refined by Brent, an open last window runs to ``end``."""
    signs = _classify(values, threshold)
    windows, start = [], float(ts[0]) if signs[0] > 0 else None
    for k in range(len(ts) - 1):
        if signs[k] == signs[k + 1] or signs[k + 1] == 0:
            continue
        roots = sign_changes(f, ts[k:k + 2])
        edge = roots[0] if roots else float(ts[k + 1])
        if signs[k + 1] > 0:
            start = edge
        elif start is not None:
            windows.append((start, edge))
            start = None
    if start is not None:
        windows.append((start, end))
    return windows


def blp_measure(rho, gamma: float, config: SwitchConfig | None = None,
                evolve: Evolution | None = None, grid_points: int = 400) -> BlpResult:
    """Backflow ``N_inf`` of ``D(Phi_t(rho), tau)`` for the switched depolarising channel.

    Backflow windows are found from sign changes of ``B`` on a grid over
    ``[0, 10/gamma]``. The endpoint form sums ``D(end) - D(start)`` over the
    windows, an open last window ending at ``50/gamma``; it is cross-checked
    by Simpson integration of ``B`` over the same windows.

    Raises
    ------
    ConvergenceError
        If ``D`` still drifts by more than ``1e-12`` between ``50/gamma`` and
        ``100/gamma``.
    """
    gamma = _check_gamma(gamma)
    rho = la.check_density_matrix(rho)
    evolve = evolve or switched_depolarizing(gamma, config).evolve
    tau = _fixed_point(rho)
    h = 1e-5 / gamma

    def dist(t):
        return la.trace_distance(evolve(t, rho), tau)

    def backflow(t):
        return float(derivative(dist, t, h))

    t_inf = ASYMPTOTE / gamma
    d_inf = dist(t_inf)
    drift = abs(d_inf - dist(2 * t_inf))
    if drift > ASYMPTOTE_TOL:
        raise ConvergenceError("distance has not settled at 50/gamma", drift)

    horizon = 10.0 / gamma
    ts = np.linspace(0.0, horizon, grid_points + 1)
    values = np.array([backflow(t) for t in ts])
    windows = _positive_windows(backflow, ts, values, 1e-9 * max(gamma, 1.0), t_inf)

    endpoint, integral, error = 0.0, 0.0, 0.0
    for a, b in windows:
        endpoint += dist(b) - dist(a)
        stop = min(b, horizon)
        step = min(0.01 / gamma, (stop - a) / 1000)
        q = simpson(lambda t: max(backflow(t), 0.0), a, stop, step)
        integral += q.value
        # beyond the grid B is monotone towards 0; the remainder is exact
        tail = dist(b) - dist(stop) if b > stop else 0.0
        integral += tail
        error += q.error
    t_minus = windows[0][0] if windows else None
    d_minus = dist(t_minus) if windows else dist(0.0)
    return BlpResult(float(endpoint), Quadrature(integral, error), t_minus, float(d_minus),
                     float(d_inf), tuple(windows))


# -- RHP -----------------------------------------------------------------------

def _g_raw(map_at: MapAt, t: float, dt: float, basis: BasisSet, f_inv: np.ndarray) -> float:
    step = f_matrix(map_at, t + dt, basis) @ f_inv
    superop = basis.vec_matrix @ step @ la.dagger(basis.vec_matrix)
    return (la.trace_norm(la.superoperator_choi(superop)) - 1) / dt


def rhp_g(map_at: MapAt, t: float, dt: float = 1e-6, basis: BasisSet | None = None) -> float:
    """RHP rate ``(||(I x Phi_{t,t+dt})|psi><psi|||_1 - 1) / dt`` with a Richardson step.

    The incremental map ``F(t+dt) F(t)^-1`` is formed in the operator
    basis; the first-order error in ``dt`` is removed by combining the
    steps ``dt`` and ``dt/2``.

    Raises
    ------
    InversionError
        If ``F(t)`` is singular or badly conditioned.
    """
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    if basis is None:
        d = int(round(np.sqrt(map_at(t).shape[0])))
        basis = gell_mann_basis(d)
    f_inv = _inverse(f_matrix(map_at, t, basis))
    g = 2 * _g_raw(map_at, t, dt / 2, basis, f_inv) - _g_raw(map_at, t, dt, basis, f_inv)
    return float(max(g, 0.0))


@dataclass(frozen=True)
class RhpResult:
    n_s: float
    error: float                  # quadrature error estimate plus tail bound
    t_minus: float | None         # start of the first window with g > 0
    windows: tuple = ()
    tail: float = 0.0
    truncated_at: float | None = None  # F(t) numerically singular from here on

    @property
    def normalized(self) -> float:
        return self.n_s / (1 + self.n_s)


def _rate_floor(map_at: MapAt, basis: BasisSet, h: float) -> Callable[[float], float]:
    def lowest(t):
        return float(canonical_rates(l_matrix(map_at, t, basis, h), basis)[0])

    return lowest


def rhp_measure(gamma: float | None = None, config: SwitchConfig | None = None, *,
                map_at: MapAt | None = None, scale: float | None = None,
                dt: float = 1e-6, grid_points: int = 200, max_doublings: int = 6,
                step: float | None = None) -> RhpResult:
    """``N_S``: integral of ``g(t)`` over every window where ``g > 1e-10``.

    Window edges are the zero crossings of the lowest canonical rate
    (located on a grid, refined by Brent), so the integrand is smooth on
    each piece. The horizon starts at ``10/scale`` and doubles until the
    tail ``g(b)/kappa`` (``kappa`` the local decay rate of ``g``) is below
    ``1e-8``. Composite Simpson uses ``h = min(0.01/scale, width/1000)`` on
    the first horizon and ``width/1000`` on later extensions, unless
    ``step`` is given.

    If ``F(t)`` becomes numerically singular (a map contracting to a
    point), the analysis stops at the last invertible grid time; this is
    accepted only when ``g`` has already vanished there.

    Raises
    ------
    ConvergenceError
        If the tail cannot be certified after ``max_doublings`` doublings,
        or the map turns singular while ``g`` is still positive.
    """
    if map_at is None:
        gamma = _check_gamma(gamma)
        map_at = switched_depolarizing(gamma, config).superoperator
    scale = scale or gamma
    if scale is None or not scale > 0:
        raise DomainError("a positive time scale (gamma or scale) is required")
    d = int(round(np.sqrt(map_at(0.0).shape[0])))
    basis = gell_mann_basis(d)
    h_fd = 1e-5 / scale
    lowest = _rate_floor(map_at, basis, h_fd)

    def g(t):
        return rhp_g(map_at, t, dt, basis)

    horizon, start = 10.0 / scale, 0.0
    total, error, windows, tail = 0.0, 0.0, [], np.inf
    truncated = None
    for _ in range(max_doublings + 1):
        ts = np.linspace(start, horizon, grid_points + 1)
        values = []  # > 0 where g > 0
        for t in ts:
            try:
                values.append(-lowest(t))
            except InversionError:
                truncated = float(t)
                break
        if truncated is not None:
            if len(values) < 2:
                raise InversionError(f"map is not invertible near t={truncated:.6g}")
            ts, horizon = ts[:len(values)], float(ts[len(values) - 1])
        values = np.array(values)
        for a, b in _positive_windows(lambda t: -lowest(t), ts, values, 1e-9 * scale, horizon):
            # beyond the first horizon g varies on the slowest decay scale only
            h = (b - a) / 1000 if start > 0 else min(0.01 / scale, (b - a) / 1000)
            q = simpson(g, a, b, step or h)
            total += q.value
            error += q.error
            windows.append((a, b))
        g_end = g(horizon)
        if g_end <= G_THRESHOLD:
            tail = 0.0
            break
        if truncated is not None:
            raise ConvergenceError(f"map turns singular at t={truncated:.6g} while g > 0", g_end)
        back = horizon * 0.95
        g_back = g(back)
        kappa = np.log(g_back / g_end) / (horizon - back) if g_back > g_end else 0.0
        tail = g_end / kappa if kappa > 0 else np.inf
        if tail <= TAIL_TOL:
            total += tail
            break
        start, horizon = horizon, 2 * horizon
    else:
        raise ConvergenceError("RHP tail not certified", float(tail))
    merged = _merge(windows)
    t_minus = merged[0][0] if merged else None
    return RhpResult(float(total), float(error + tail), t_minus, tuple(merged), float(tail),
                     truncated)


def _merge(windows):
    out = []
    for a, b in windows:
        if out and abs(out[-1][1] - a) < 1e-12:
            out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


# -- bridges and reports -------------------------------------------------------

@dataclass(frozen=True)
class Bridge:
    q_s_infinity: float
    normalized: float        # Q/(1+Q)
    blp_form: float          # the same, written through N_BLP and D(T-)


def qsm_blp_bridge(n_inf: float, d_at_t_minus: float) -> Bridge:
    """Asymptotic memory ``Q_S(inf) = N_inf + D(Phi_{T-}(rho), tau)`` and its normalisation."""
    if n_inf < 0 or d_at_t_minus < 0:
        raise DomainError("inputs must be non-negative")
    q = n_inf + d_at_t_minus
    n_blp = n_inf / (1 + n_inf)
    one_minus = 1 - n_blp
    blp_form = (n_blp + d_at_t_minus * one_minus) / (1 + d_at_t_minus * one_minus)
    return Bridge(float(q), float(q / (1 + q)), float(blp_form))


@dataclass(frozen=True)
class NonMarkovReport:
    T_minus: float
    N_S: float
    N_S_normalized: float
    N_inf: float
    N_blp_normalized: float
    Q_S_infinity: float
    D_T_minus: float
    details: dict = field(default_factory=dict, compare=False, repr=False)


def nonmarkov_report(gamma: float, rho=None, config: SwitchConfig | None = None) -> NonMarkovReport:
    """Characteristic time, RHP and BLP measures and the memory bridge for one ``gamma``."""
    rho = la.projector(la.KET1) if rho is None else rho
    t_minus = characteristic_time(gamma)
    rhp = rhp_measure(gamma, config)
    blp = blp_measure(rho, gamma, config)
    bridge = qsm_blp_bridge(blp.n_inf, blp.d_t_minus)
    return NonMarkovReport(t_minus, rhp.n_s, rhp.normalized, blp.n_inf, blp.normalized,
                           bridge.q_s_infinity, blp.d_t_minus,
                           {"rhp": rhp, "blp": blp, "bridge": bridge})


# -- asymmetric sweep ----------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: float
    normalized: np.ndarray          # N_S/(1+N_S), NaN where a cell failed
    errors: dict = field(default_factory=dict)
    uncertainty: np.ndarray | None = None  # error bound on each normalised cell


def self_switched_pauli(rates: PauliRates, config: SwitchConfig | None = None) -> SwitchedFamily:
    fam = pauli_family(rates)
    return SwitchedFamily(fam, fam, config or SwitchConfig.ideal())


def ns_for_rates(rates: PauliRates, config: SwitchConfig | None = None, **kwargs) -> RhpResult:
    """RHP measure of a constant-rate Pauli channel switched with itself."""
    scale = rates.scale
    if scale == 0:
        return RhpResult(0.0, 0.0, None)
    return rhp_measure(map_at=self_switched_pauli(rates, config).superoperator, scale=scale,
                       **kwargs)


def sweep_ns_surface(gamma1_grid: Sequence[float], gamma2_grid: Sequence[float], gamma3: float,
                     config: SwitchConfig | None = None, zero: str = "gamma3",
                     **kwargs) -> SweepResult:
    """Normalised RHP measure over a ``(gamma1, gamma2)`` grid at fixed ``gamma3``.

    With ``zero="gamma2"`` the roles of the last two rates swap: the second
    grid runs over ``gamma3`` and ``gamma2`` is held at the fixed value.
    A failing cell is stored as NaN and its exception in ``errors[(i, j)]``;
    the sweep carries on.
    """
    if zero not in ("gamma2", "gamma3"):
        raise DomainError(f"zero must be 'gamma2' or 'gamma3', got {zero!r}")
    g1 = np.asarray(gamma1_grid, dtype=float)
    g2 = np.asarray(gamma2_grid, dtype=float)
    if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(g2)) and np.isfinite(gamma3)):
        raise DomainError("grids must be finite")
    out = np.full((g1.size, g2.size), np.nan)
    bound = np.full_like(out, np.nan)
    errors = {}
    for i, a in enumerate(g1):
        for j, b in enumerate(g2):
            try:
                rates = PauliRates(a, b, gamma3) if zero == "gamma3" else PauliRates(a, gamma3, b)
                res = ns_for_rates(rates, config, **kwargs)
                out[i, j] = res.normalized
                bound[i, j] = res.error / (1 + res.n_s) ** 2
            except (ArithmeticError, ValueError) as exc:
                errors[(i, j)] = exc
    return SweepResult(g1, g2, float(gamma3), out, errors, bound)
