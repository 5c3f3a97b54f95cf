import json

import numpy as np
import pytest

from switchsim import cli
from switchsim.cli import Grid, Table, main, run_fig2, run_fig5, run_statements, to_csv, to_json
from switchsim.measures import characteristic_time
from switchsim.switch import switched_coherence


def test_csv_layout():
    table = Table(["t", "x", "ok"])
    table.add(0.1, 1 / 3, True)
    text = to_csv(table)
    assert text == "t,x,ok\n0.1,0.333333333333,true\n"
    assert "\r" not in text


def test_json_layout():
    table = Table(["t", "x"])
    table.add(np.float64(0.5), float("nan"))
    data = json.loads(to_json(table))
    assert data == {"columns": ["t", "x"], "rows": [{"t": 0.5, "x": None}], "failures": []}


def test_grid_defaults_to_five_decay_times():
    ts = Grid().times(2.0)
    assert len(ts) == 500 and ts[0] == 0 and ts[-1] == pytest.approx(2.5)


@pytest.mark.parametrize("kwargs", [dict(t_start=-1.0), dict(steps=1), dict(t_start=1.0, t_end=0.5)])
def test_grid_rejects_bad_ranges(kwargs):
    with pytest.raises(ValueError):
        Grid(**kwargs)


def test_fig2_matches_independent_closed_form():
    # for |1><1| the deviation reduces to max(exp(-4 gamma t) - C(t), 0)
    table = run_fig2((1.0,), Grid(steps=200))
    ts, dev = table.column("t"), table.column("deviation")
    expected = np.array([max(np.exp(-4 * t) - switched_coherence(t, 1.0), 0.0) for t in ts])
    assert np.max(np.abs(dev - expected)) <= 1e-10
    assert dev[0] == pytest.approx(0, abs=1e-12)
    assert not table.failures


def test_fig2_curves_rise_and_settle():
    table = run_fig2(grid=Grid(steps=100))
    for gamma in cli.FIG2_GAMMAS:
        dev = table.column("deviation")[table.column("gamma") == gamma]
        assert len(dev) == 100
        assert dev.min() >= -1e-10 and dev.max() > 1e-3 and dev[-1] <= 1e-6


def test_fig5_onset_at_characteristic_time():
    steps = 120
    table = run_fig5((1.0,), Grid(steps=steps))
    ts, g, blp = table.column("t"), table.column("g_rhp"), table.column("blp_rate")
    t_minus = characteristic_time(1.0)
    assert np.all(g[ts < t_minus] <= 1e-6)
    assert np.all(g[ts > t_minus + 1e-3] > 0)
    dt = ts[1] - ts[0]
    first_g = ts[np.argmax(g > 1e-6)]
    first_blp = ts[np.argmax(blp > 1e-9)]
    assert abs(first_g - t_minus) <= dt
    assert abs(first_blp - first_g) <= dt
    assert not table.failures


def test_statements_qubit_pass_and_uniform_trace():
    table = run_statements((2,), trials=3, seed=1)
    assert not table.failures and all(table.column("pass"))
    ideal = table.column("config") == "ideal"
    assert set(table.column("dim")) == {2}
    assert len(table.rows) == 3 * len(cli.STATEMENT_CONFIGS)
    assert np.all(table.column("fixed_point_deviation")[ideal] <= 1e-10)


def test_statements_reject_large_dimension():
    with pytest.raises(ValueError):
        run_statements((6,), trials=1)


def test_output_is_deterministic(tmp_path):
    args = ["statements", "--dims", "2,3", "--trials", "2", "--seed", "7"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == (
        "dim,trial,config,fixed_point_deviation,trace_spread,trace,analytic_trace,pass")


def test_json_output_file(tmp_path):
    out = tmp_path / "fig2.json"
    assert main(["fig2", "--gamma", "1", "--steps", "20", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["columns"] == ["t", "gamma", "deviation"] and len(data["rows"]) == 20


def test_stdout_csv(capsys):
    assert main(["qsi", "--gamma", "1", "--steps", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,gamma,info_loss_switch,qsm,info_loss_ergodic,deviation"
    assert len(lines) == 6


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["fig2", "--gamma", "abc"],
    ["fig2", "--gamma", "-1"],
    ["fig3", "--p", "1.5", "--q", "0.5"],
    ["qsi", "--q", "0.5", "--q1", "0.5"],
    ["statements", "--dims", "7"],
])
def test_argument_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_unwritable_output_exits_2(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    assert main(["fig2", "--gamma", "1", "--steps", "5", "--out", str(target)]) == 2


def test_failed_check_exits_1(monkeypatch, capsys):
    def broken(*args, **kwargs):
        table = Table(["x"])
        table.failures.append('{"dim": 2}')
        return table

    monkeypatch.setattr(cli, "run_statements", broken)
    assert main(["statements"]) == 1
    assert '{"dim": 2}' in capsys.readouterr().err


def test_fourier_povm_override(capsys):
    assert main(["fig4", "--p", "1", "--q1", "1", "--q2", "0", "--steps", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and lines[1].split(",")[2:5] == ["1", "1", "0"]
