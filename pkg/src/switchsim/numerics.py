"""Finite differences, quadrature and root bracketing used by the measures.

Everything here works on smooth functions of a single time variable that
may return scalars or arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import RootError


def derivative(f: Callable[[float], np.ndarray], t: float, h: float) -> np.ndarray:
    """First derivative of ``f`` at ``t`` with one Richardson step.

    A central difference is used when ``t - 2h >= 0``; closer to the origin
    a second-order forward stencil is used instead, because the maps are
    only defined for non-negative time.
    """
    if t - 2 * h >= 0:
        def central(step):
            return (np.asarray(f(t + step)) - np.asarray(f(t - step))) / (2 * step)

        return (4 * central(h / 2) - central(h)) / 3

    def forward(step):
        f0, f1, f2 = (np.asarray(f(t + k * step)) for k in range(3))
        return (-3 * f0 + 4 * f1 - f2) / (2 * step)

    return (4 * forward(h / 2) - forward(h)) / 3


@dataclass(frozen=True)
class Quadrature:
    value: float
    error: float  # |Richardson-extrapolated - fine Simpson|


def simpson(f: Callable[[float], float], a: float, b: float, h: float) -> Quadrature:
    """Composite Simpson on ``[a, b]`` with step ``<= h``, Richardson-checked.

    The rule is evaluated with ``n`` and ``2n`` panels sharing nodes; the
    returned value is the extrapolation ``(16 S_2n - S_n) / 15``.
    """
    if b <= a:
        return Quadrature(0.0, 0.0)
    n = max(2, int(np.ceil((b - a) / h)))
    n += n % 2
    ts = np.linspace(a, b, 2 * n + 1)
    ys = np.array([f(t) for t in ts], dtype=float)
    coarse = integrate.simpson(ys[::2], x=ts[::2])
    fine = integrate.simpson(ys, x=ts)
    value = (16 * fine - coarse) / 15
    return Quadrature(float(value), float(abs(value - fine)))


def sign_changes(f: Callable[[float], float], ts: np.ndarray, values: np.ndarray | None = None
                 ) -> list[float]:
    """Roots of ``f`` located from sign changes on the grid ``ts``, refined by Brent."""
    ys = np.array([f(t) for t in ts]) if values is None else np.asarray(values)
    roots = []
    for k in range(len(ts) - 1):
        if ys[k] == 0.0:
            roots.append(float(ts[k]))
        elif ys[k] * ys[k + 1] < 0:
            roots.append(float(optimize.brentq(f, ts[k], ts[k + 1], xtol=1e-15, rtol=1e-15)))
    return roots


def bisect_root(f: Callable[[float], float], lo: float, hi: float, maxiter: int = 200) -> float:
    """Bisection on a bracketing interval; raises :class:`RootError` without a sign change."""
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise RootError(f"no sign change on [{lo:.6g}, {hi:.6g}]: f = {flo:.3e}, {fhi:.3e}")
    return float(optimize.bisect(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                 maxiter=maxiter, disp=False))
