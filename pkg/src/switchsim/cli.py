"""``switchsim`` command-line program: figure datasets, sweeps and statement checks.

Every command builds a :class:`Table` and writes it as CSV (12 significant
digits, LF line endings) or JSON. Exit codes: 0 success, 1 an invariant
check failed, 2 bad arguments or I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qlinalg as la
from .channels import GeneralizedPauliSpec
from .errors import ContractViolation, DomainError, SingularExpressionError
from .lindblad import gamma_S_closed_form
from .measures import (characteristic_time, nonmarkov_report, qsi_series,
                       rhp_g, switched_depolarizing, sweep_ns_surface)
from .numerics import derivative
from .switch import (ControlSpec, MeasurementSpec, SwitchConfig, closed_form_Cpq,
                     closed_form_Cpq1q2, switched_coherence_brute_force, verify_statement1,
                     verify_statement2)

QSI_TOL = 1e-10
SETTLED_TOL = 1e-6
FIG2_GAMMAS = (0.6, 0.8, 1.0)
FIG3_CONFIGS = ((0.5, 0.5), (0.4, 1.0), (0.8, 0.9))
FIG4_CONFIGS = ((1.0, 1.0, 0.0), (0.5, 0.5, 0.5), (0.8, 0.1, 0.9))
DEFAULT_STEPS = 500


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    def add(self, *values) -> None:
        self.rows.append(list(values))

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows])


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def to_json(table: Table) -> str:
    def plain(v):
        if isinstance(v, (np.floating, float)):
            v = float(v)
            return v if np.isfinite(v) else None
        if isinstance(v, np.integer):
            return int(v)
        if isinstance(v, np.bool_):
            return bool(v)
        return v

    records = [dict(zip(table.columns, map(plain, row))) for row in table.rows]
    return json.dumps({"columns": table.columns, "rows": records,
                       "failures": table.failures}, indent=1) + "\n"


# -- grids ---------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """``steps`` points from ``t_start`` to ``t_end``; ``t_end=None`` means ``5/gamma``."""

    t_start: float = 0.0
    t_end: float | None = None
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        if not self.t_start >= 0:
            raise DomainError(f"t_start must be >= 0, got {self.t_start}")
        if self.steps < 2:
            raise DomainError(f"steps must be >= 2, got {self.steps}")
        if self.t_end is not None and not self.t_end > self.t_start:
            raise DomainError("t_end must exceed t_start")

    def times(self, gamma: float) -> np.ndarray:
        end = 5.0 / gamma if self.t_end is None else self.t_end
        return np.linspace(self.t_start, end, self.steps)


# -- commands ------------------------------------------------------------------

def run_fig2(gammas: Sequence[float] = FIG2_GAMMAS, grid: Grid = Grid()) -> Table:
    """QSI deviation for ``|1><1|`` under the ideal switch, one curve per ``gamma``.

    A curve that has not settled back to zero by the end of a grid reaching
    ``5/gamma`` is reported as a failure.
    """
    table = Table(["t", "gamma", "deviation"])
    rho = la.projector(la.KET1)
    for gamma in gammas:
        times = grid.times(gamma)
        records = qsi_series(rho, gamma, times, SwitchConfig.ideal())
        for rec in records:
            table.add(rec.t, gamma, rec.deviation)
            if rec.deviation < -QSI_TOL:
                table.failures.append(f"negative QSI deviation {rec.deviation:.3e} at t={rec.t:.6g}")
        if times[-1] >= 5.0 / gamma - 1e-12 and records[-1].deviation > SETTLED_TOL:
            table.failures.append(f"gamma={gamma}: deviation {records[-1].deviation:.3e} "
                                  f"has not returned to 0 at t={times[-1]:.6g}")
    return table


def _closed_or_nan(fn, *args) -> float:
    try:
        return fn(*args)
    except SingularExpressionError:
        return float("nan")


def run_fig3(gammas: Sequence[float] = (1.0,), grid: Grid = Grid(),
             configs: Sequence[tuple[float, float]] = FIG3_CONFIGS) -> Table:
    """Quantum-noise switch: QSI deviation, brute-force coherence and the reference closed form."""
    table = Table(["t", "gamma", "p", "q", "deviation", "coherence", "closed_form"])
    for gamma in gammas:
        for p, q in configs:
            config = SwitchConfig.quantum_noise(p, q)
            rho = la.projector(la.KET1)
            for rec in qsi_series(rho, gamma, grid.times(gamma), config):
                table.add(rec.t, gamma, p, q, rec.deviation,
                          switched_coherence_brute_force(rec.t, gamma, config),
                          _closed_or_nan(closed_form_Cpq, rec.t, gamma, p, q))
                if rec.deviation < -QSI_TOL:
                    table.failures.append(f"negative QSI deviation at p={p}, q={q}, t={rec.t:.6g}")
    return table


def run_fig4(gammas: Sequence[float] = (1.0,), grid: Grid = Grid(),
             configs: Sequence[tuple[float, float, float]] = FIG4_CONFIGS) -> Table:
    """Classical-noise switch: QSI deviation, brute-force coherence and the reference closed form."""
    table = Table(["t", "gamma", "p", "q1", "q2", "deviation", "coherence", "closed_form"])
    for gamma in gammas:
        for p, q1, q2 in configs:
            config = SwitchConfig.classical_noise(p, q1, q2)
            rho = la.projector(la.KET1)
            for rec in qsi_series(rho, gamma, grid.times(gamma), config):
                table.add(rec.t, gamma, p, q1, q2, rec.deviation,
                          switched_coherence_brute_force(rec.t, gamma, config),
                          _closed_or_nan(closed_form_Cpq1q2, rec.t, gamma, p, q1, q2))
                if rec.deviation < -QSI_TOL:
                    table.failures.append(
                        f"negative QSI deviation at p={p}, q1={q1}, q2={q2}, t={rec.t:.6g}")
    return table


def run_fig5(gammas: Sequence[float] = FIG2_GAMMAS, grid: Grid = Grid()) -> Table:
    """RHP rate ``g`` and the positive part of the BLP rate for ``|1><1|``, per ``gamma``.

    ``rate`` is the closed-form generator coefficient, for reference.
    """
    table = Table(["t", "gamma", "g_rhp", "blp_rate", "rate"])
    rho = la.projector(la.KET1)
    tau = la.maximally_mixed(2)
    for gamma in gammas:
        fam = switched_depolarizing(gamma)

        def dist(s):
            return la.trace_distance(fam.evolve(s, rho), tau)

        t_minus = characteristic_time(gamma)
        for t in grid.times(gamma):
            g = rhp_g(fam.superoperator, t)
            backflow = max(float(derivative(dist, t, 1e-5 / gamma)), 0.0)
            table.add(t, gamma, g, backflow, gamma_S_closed_form(t, gamma))
            if t < t_minus and g > 1e-6:
                table.failures.append(f"g={g:.3e} inside the divisible region at t={t:.6g}")
    return table


def run_fig6(grid_values: Sequence[float], zero: str = "gamma3") -> Table:
    """Normalised RHP measure of a self-switched Pauli channel over a rate grid.

    ``zero`` names the rate held at 0 (``gamma3`` or ``gamma2``); the
    other two run over ``grid_values``.
    """
    if zero not in ("gamma2", "gamma3"):
        raise DomainError(f"zero must be gamma2 or gamma3, got {zero!r}")
    values = np.asarray(grid_values, dtype=float)
    table = Table(["gamma1", "gamma2", "gamma3", "n_s_normalized"])
    sweep = sweep_ns_surface(values, values, 0.0, zero=zero)
    for i, a in enumerate(values):
        for j, b in enumerate(values):
            rates = (a, b, 0.0) if zero == "gamma3" else (a, 0.0, b)
            table.add(*rates, sweep.normalized[i, j])
            if (i, j) in sweep.errors:
                table.failures.append(f"cell {rates}: {sweep.errors[(i, j)]}")
    return table


STATEMENT_CONFIGS = (
    ("ideal", SwitchConfig.ideal()),
    ("quantum(0.3,0.8)", SwitchConfig.quantum_noise(0.3, 0.8)),
    ("quantum(0.4,1)", SwitchConfig.quantum_noise(0.4, 1.0)),
    ("quantum(0.8,0.9)", SwitchConfig.quantum_noise(0.8, 0.9)),
    ("classical(0.8,0.1,0.9)", SwitchConfig.classical_noise(0.8, 0.1, 0.9)),
    ("classical(0.5,0.3,0.7)", SwitchConfig.classical_noise(0.5, 0.3, 0.7)),
)


def run_statements(dims: Sequence[int] = (2, 3, 4, 5), trials: int = 20, seed: int = 0,
                   configs=STATEMENT_CONFIGS, n_states: int = 10) -> Table:
    """Fixed-point and trace-linearity checks on random generalised Pauli channels.

    The generator is ``numpy.random.default_rng(seed)`` (PCG64); specs and
    sample states are drawn in a fixed order, so a seed reproduces a run.
    """
    if any(d < 2 or d > 5 for d in dims):
        raise DomainError(f"dims must lie in 2..5, got {list(dims)}")
    rng = np.random.default_rng(seed)
    table = Table(["dim", "trial", "config", "fixed_point_deviation", "trace_spread",
                   "trace", "analytic_trace", "pass"])
    for d in dims:
        for trial in range(trials):
            spec = GeneralizedPauliSpec.random(d, rng)
            states = [la.random_density_matrix(d, rng) for _ in range(n_states)]
            for name, cfg in configs:
                dev = verify_statement1(spec, cfg.control, cfg.measurement)
                check = verify_statement2(spec, states, cfg.control, cfg.measurement)
                analytic = float("nan") if check.analytic is None else check.analytic
                ok = dev <= 1e-10 and check.spread <= 1e-12
                if check.analytic is not None:
                    ok = ok and abs(check.traces[0] - check.analytic) <= 1e-12
                table.add(d, trial, name, dev, check.spread, check.traces[0], analytic, ok)
                if not ok:
                    table.failures.append(json.dumps({
                        "dim": d, "trial": trial, "config": name,
                        "probabilities": spec.probabilities.tolist()}))
    return table


def run_qsi(gammas: Sequence[float], grid: Grid, config: SwitchConfig) -> Table:
    """Both sides of the information inequality for ``|1><1|``."""
    table = Table(["t", "gamma", "info_loss_switch", "qsm", "info_loss_ergodic", "deviation"])
    rho = la.projector(la.KET1)
    for gamma in gammas:
        for rec in qsi_series(rho, gamma, grid.times(gamma), config):
            table.add(rec.t, gamma, rec.info_loss_switch, rec.qsm, rec.info_loss_ergodic,
                      rec.deviation)
            if rec.deviation < -QSI_TOL:
                table.failures.append(f"negative QSI deviation at t={rec.t:.6g}")
    return table


def run_nonmarkov(gammas: Sequence[float], config: SwitchConfig | None = None) -> Table:
    """Characteristic time, RHP and BLP measures and the asymptotic memory per ``gamma``."""
    table = Table(["gamma", "T_minus", "N_S", "N_S_normalized", "N_inf", "N_blp_normalized",
                   "Q_S_infinity"])
    for gamma in gammas:
        r = nonmarkov_report(gamma, config=config)
        table.add(gamma, r.T_minus, r.N_S, r.N_S_normalized, r.N_inf, r.N_blp_normalized,
                  r.Q_S_infinity)
    return table


# -- argument handling -----------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


COMMANDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "statements", "qsi", "nonmarkov")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchsim",
        description="Quantum-switch channel simulations: figure data, measures and checks.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--gamma", type=_floats, help="rate(s), comma separated")
    parser.add_argument("--p", type=float, help="control parameter")
    parser.add_argument("--q", type=float, help="pure measurement parameter")
    parser.add_argument("--q1", type=float, help="Fourier POVM weight of |+><+|")
    parser.add_argument("--q2", type=float, help="Fourier POVM weight of |-><-|")
    parser.add_argument("--t-start", type=float, default=0.0)
    parser.add_argument("--t-end", type=float, help="end of the time grid (default 5/gamma)")
    parser.add_argument("--steps", type=int, help="grid points (default 500; fig6: 6)")
    parser.add_argument("--grid", type=_floats, help="fig6 rate grid (default 0,0.2,...,1)")
    parser.add_argument("--zero", choices=("gamma2", "gamma3"), default="gamma3",
                        help="fig6: the rate held at zero")
    parser.add_argument("--dims", type=_ints, default=[2, 3, 4, 5])
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def _probability(name: str, value: float | None) -> float | None:
    if value is not None and not 0 <= value <= 1:
        raise DomainError(f"--{name} must lie in [0, 1], got {value}")
    return value


def _config(args) -> SwitchConfig | None:
    p, q, q1, q2 = (_probability(n, getattr(args, n)) for n in ("p", "q", "q1", "q2"))
    if q is not None and (q1 is not None or q2 is not None):
        raise DomainError("use either --q or --q1/--q2, not both")
    if q is not None:
        return SwitchConfig.quantum_noise(0.5 if p is None else p, q)
    if q1 is not None or q2 is not None:
        return SwitchConfig.classical_noise(1.0 if p is None else p,
                                            1.0 if q1 is None else q1, 0.0 if q2 is None else q2)
    if p is not None:
        return SwitchConfig(ControlSpec.pure_computational(p), MeasurementSpec.plus())
    return None


def dispatch(args) -> Table:
    gammas = args.gamma
    if gammas is not None and any(not g > 0 for g in gammas):
        raise DomainError("--gamma values must be positive")
    grid = Grid(args.t_start, args.t_end, args.steps or DEFAULT_STEPS)
    config = _config(args)
    cmd = args.command
    if cmd == "fig2":
        return run_fig2(gammas or FIG2_GAMMAS, grid)
    if cmd == "fig3":
        cfgs = [(config.control.p, config.measurement.q)] if config and \
            config.measurement.kind == "pure_computational" else FIG3_CONFIGS
        return run_fig3(gammas or (1.0,), grid, cfgs)
    if cmd == "fig4":
        cfgs = [(config.control.p, config.measurement.q1, config.measurement.q2)] if config and \
            config.measurement.kind == "fourier_povm" else FIG4_CONFIGS
        return run_fig4(gammas or (1.0,), grid, cfgs)
    if cmd == "fig5":
        return run_fig5(gammas or FIG2_GAMMAS, grid)
    if cmd == "fig6":
        values = args.grid or list(np.linspace(0.0, 1.0, args.steps or 6))
        if any(v < 0 for v in values):
            raise DomainError("--grid rates must be non-negative")
        return run_fig6(values, args.zero)
    if cmd == "statements":
        if args.trials < 1:
            raise DomainError("--trials must be positive")
        return run_statements(args.dims, args.trials, args.seed)
    if cmd == "qsi":
        return run_qsi(gammas or (1.0,), grid, config or SwitchConfig.ideal())
    return run_nonmarkov(gammas or (1.0,), config)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    try:
        table = dispatch(args)
    except (DomainError, ContractViolation) as exc:
        print(f"switchsim: error: {exc}", file=sys.stderr)
        return 2
    text = to_json(table) if args.format == "json" else to_csv(table)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"switchsim: cannot write output: {exc}", file=sys.stderr)
        return 2
    if table.failures:
        for line in table.failures:
            print(f"switchsim: check failed: {line}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
