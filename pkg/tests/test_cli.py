import json
import math
import subprocess
import sys

import numpy as np
import pytest

from moyalstar.cli import main, parse_config, parse_n_range
from moyalstar.symbols import read_symbol


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_n_range():
    assert parse_n_range("0..3") == [0, 1, 2, 3]
    assert parse_n_range("2,5") == [2, 5]


def test_wigner_range(capsys, in_tmp):
    code, out, _ = run(capsys, "wigner", "--model", "sho", "--n", "0..3", "--grid", "128")
    assert code == 0
    files = sorted(in_tmp.glob("wigner_n*.csv"))
    assert [f.name for f in files] == [f"wigner_n{n}.csv" for n in range(4)]
    for line in out.strip().splitlines():
        integral = float(line.split("integral=")[1].split()[0])
        assert abs(integral - 1) <= 1e-8
    W = read_symbol(files[1])
    assert W.grid.n_x == 128 and W.values.real.min() < 0


def test_wigner_negative_n(capsys):
    code, _, err = run(capsys, "wigner", "--n", "-1")
    assert code == 2 and "usage" in err


def test_wigner_x_frame(capsys, in_tmp):
    code, _, _ = run(capsys, "wigner", "--model", "ck", "--frame", "x", "--time", "2.0", "--n", "0",
                     "--out", "w.json")
    assert code == 0
    W = read_symbol(in_tmp / "w.json")
    integral = W.values.sum().real * W.grid.dx * W.grid.dp
    assert abs(integral - 1) <= 1e-8


def test_starexp_diff(capsys, in_tmp):
    code, out, _ = run(capsys, "starexp", "--tau", "1.5708", "--route", "closed,propagator", "--diff")
    assert code == 0
    d = float(out.strip().splitlines()[-1].split()[-1])
    assert d <= 1e-8
    assert (in_tmp / "starexp_closed.csv").exists() and (in_tmp / "starexp_propagator.csv").exists()


def test_starexp_pole_exit_3(capsys):
    code, _, err = run(capsys, "starexp", "--tau", str(math.pi))
    assert code == 3 and "guard 'pole'" in err and "from a pole" in err


def test_unknown_route_exit_2(capsys):
    code, _, _ = run(capsys, "starexp", "--tau", "0.1", "--route", "series")
    assert code == 2


@pytest.mark.parametrize("g0, expected", [(1.2, 4.0), (0.6, 5 * math.sqrt(0.91))])
def test_tau_ck(capsys, g0, expected):
    code, out, _ = run(capsys, "tau", "--model", "ck", "--t", "5", "--gamma0", str(g0), "--omega0", "1")
    assert code == 0
    assert float(out.strip()) == pytest.approx(expected, abs=1e-9)


def test_tau_export(capsys, in_tmp):
    code, _, _ = run(capsys, "tau", "--model", "sho", "--t", "2", "--samples", "5", "--out", "rho.csv")
    assert code == 0
    lines = (in_tmp / "rho.csv").read_text().splitlines()
    assert lines[0] == "t,rho,rhodot,tau" and len(lines) == 6
    assert float(lines[-1].split(",")[3]) == pytest.approx(2.0, abs=1e-9)


def test_overdamped_exit_2(capsys):
    code, _, err = run(capsys, "tau", "--model", "ck", "--t", "1", "--gamma0", "3")
    assert code == 2 and "overdamped" in err


def test_invariant(capsys):
    code, out, _ = run(capsys, "invariant", "--model", "sho", "--x", "1", "--p", "1")
    assert code == 0 and float(out.split("I=")[1]) == pytest.approx(1.0, abs=1e-9)


def test_evolve_tau0_identity(capsys, in_tmp):
    assert run(capsys, "wigner", "--n", "0", "--out", "w0.csv")[0] == 0
    code, _, _ = run(capsys, "evolve", "--tau", "0", "--in", "w0.csv")
    assert code == 0
    assert (in_tmp / "w0_evolved.csv").read_bytes() == (in_tmp / "w0.csv").read_bytes()


def test_evolve_moves_gaussian(capsys, in_tmp):
    code, _, _ = run(capsys, "evolve", "--tau", str(math.pi / 2), "--out", "e.json")
    assert code == 0
    W = read_symbol(in_tmp / "e.json")
    i, j = np.unravel_index(np.argmax(W.values.real), W.grid.shape)
    assert abs(W.grid.x[i]) <= W.grid.dx and abs(W.grid.p[j] + 1) <= W.grid.dp


def test_byte_identical_reruns(capsys, in_tmp):
    for name in ("a", "b"):
        assert run(capsys, "starexp", "--tau", "0.7", "--route", "propagator", "--out", f"{name}.json",
                   "--threads", "1")[0] == 0
    assert (in_tmp / "a.json").read_bytes() == (in_tmp / "b.json").read_bytes()


def test_config_file(capsys, in_tmp):
    (in_tmp / "run.cfg").write_text("# damped run\nmodel = ck\ngamma0 = 1.2\n")
    assert parse_config(in_tmp / "run.cfg") == {"model": "ck", "gamma0": "1.2"}
    code, out, _ = run(capsys, "tau", "--config", "run.cfg", "--t", "5")
    assert code == 0 and float(out) == pytest.approx(4.0, abs=1e-9)
    # flags override the file
    code, out, _ = run(capsys, "tau", "--config", "run.cfg", "--t", "5", "--gamma0", "0")
    assert float(out) == pytest.approx(5.0, abs=1e-9)
    (in_tmp / "bad.cfg").write_text("model ck\n")
    assert run(capsys, "tau", "--config", "bad.cfg", "--t", "1")[0] == 2


def test_param_override(capsys):
    code, out, _ = run(capsys, "tau", "--model", "tdf", "--param", "profile=constant", "--param", "omega0=2",
                       "--t", "3")
    assert code == 0 and float(out) == pytest.approx(6.0, abs=1e-9)
    assert run(capsys, "tau", "--model", "tdf", "--param", "nonsense=1", "--t", "1")[0] == 2


def test_verify_filter(capsys, in_tmp):
    code, _, _ = run(capsys, "verify", "--suite", "ermakov", "--model", "tdf")
    assert code == 0
    report = json.loads((in_tmp / "verify_report.json").read_text())
    assert report["schema"] == 1 and report["pass"] is True
    assert {r["suite"] for r in report["rows"]} == {"ermakov"}
    assert set(report["rows"][0]) == {"suite", "metric", "value", "tolerance", "pass"}


def test_verify_fault_injection(capsys, in_tmp):
    code, _, _ = run(capsys, "verify", "--suite", "stargenvalue", "--inject-hbar-mismatch", "0.1",
                     "--out", "r.json")
    assert code == 1
    report = json.loads((in_tmp / "r.json").read_text())
    assert not report["pass"] and any(not r["pass"] for r in report["rows"])


def test_verify_unknown_suite(capsys):
    assert run(capsys, "verify", "--suite", "nope")[0] == 2


@pytest.mark.slow
def test_verify_default_passes(capsys, in_tmp):
    code, _, _ = run(capsys, "verify")
    assert code == 0
    report = json.loads((in_tmp / "verify_report.json").read_text())
    suites = {r["suite"] for r in report["rows"]}
    assert {"oracle", "stargenvalue", "projection", "ermakov", "invariant", "route", "closed_forms"} <= suites


def test_console_entry_point(in_tmp):
    res = subprocess.run([sys.executable, "-m", "moyalstar.cli", "tau", "--t", "1"], capture_output=True,
                         text=True, check=False)
    assert res.returncode == 0 and float(res.stdout) == pytest.approx(1.0, abs=1e-9)
