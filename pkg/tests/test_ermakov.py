import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moyalstar.ermakov import (TDModel, classical_trajectory, export_rows, solve_linear_modes, solve_rho,
                               tau_of_t)
from moyalstar.errors import SolverError
from moyalstar.models import build_model

TOL = 1e-10
TS = np.linspace(0.0, 10.0, 401)


def unit(omega=1.0):
    return TDModel(mass=lambda t: np.ones_like(np.asarray(t, dtype=float)),
                   omega=lambda t: np.full(np.shape(t), omega) if np.ndim(t) else omega,
                   mass_dot=lambda t: np.zeros_like(np.asarray(t, dtype=float)), unit_mass=True)


def test_tol_range():
    with pytest.raises(ValueError):
        solve_rho(unit(), 0.0, 1.0, tol=1e-13)
    with pytest.raises(ValueError):
        solve_linear_modes(unit(), 0.0, 1.0, tol=1e-5)


def test_linear_modes_sho():
    modes = solve_linear_modes(unit(), 0.0, 2 * math.pi, TOL)
    t = np.linspace(0, 2 * math.pi, 301)
    assert np.abs(modes.u(t) - np.cos(t)).max() <= TOL
    assert np.abs(modes.v(t) - np.sin(t)).max() <= TOL
    assert abs(modes.wronskian - 1) <= TOL


def test_linear_modes_ck():
    g0 = 0.2
    big = math.sqrt(1 - g0 * g0 / 4)
    modes = solve_linear_modes(build_model("ck", gamma0=g0), 0.0, 10.0, TOL)
    e = np.exp(-g0 * TS / 2)
    u = e * (np.cos(big * TS) + g0 / (2 * big) * np.sin(big * TS))
    v = e * np.sin(big * TS) / big
    assert np.abs(modes.u(TS) - u).max() <= 10 * TOL
    assert np.abs(modes.v(TS) - v).max() <= 10 * TOL


@pytest.mark.parametrize("name", ["sho", "ck", "tdf"])
def test_abel_identity(name):
    model = build_model(name)
    modes = solve_linear_modes(model, 0.0, 10.0, TOL)
    w = modes.wronskian_at(TS) * model.mass(TS)
    assert np.abs(w - w[0]).max() <= 100 * TOL


@pytest.mark.parametrize("omega", [1.0, 2.0])
def test_rho_constant_frequency(omega):
    sol = solve_rho(unit(omega), 0.0, 10.0, 1e-12)
    assert sol.method == "pinney"
    assert np.abs(sol.rho(TS) - omega ** -0.5).max() <= 1e-12
    if omega == 1.0:
        assert sol.residual_sup <= 1e-12


def test_rho_equilibrium_is_exact_when_integrated_directly():
    sol = solve_rho(unit(1.0), 0.0, 10.0, TOL, method="direct")
    assert np.all(sol.rho(TS) == 1.0) and sol.residual_sup == 0.0


@pytest.mark.parametrize("g0, w0, m0", [(0.6, 1.0, 1.0), (0.2, 1.0, 2.0), (1.2, 1.0, 1.0)])
def test_rho_ck_closed_form(g0, w0, m0):
    model = build_model("ck", gamma0=g0, omega0=w0, m0=m0)
    sol = solve_rho(model, 0.0, 10.0, TOL)
    assert sol.method == "direct"
    ref = model.closed_forms["rho"](TS)
    assert np.abs(sol.rho(TS) - ref).max() <= 1e-10 * max(1.0, ref.max())
    assert np.abs(tau_of_t(sol, TS) - model.closed_forms["tau"](TS)).max() <= 1e-9


def test_ck_tau_matches_big_omega():
    model = build_model("ck", gamma0=1.2, omega0=1.0)
    sol = solve_rho(model, 0.0, 5.0, TOL)
    assert math.isclose(tau_of_t(sol, 5.0), 4.0, abs_tol=1e-9)


@pytest.mark.parametrize("name", ["sho", "tdf"])
def test_unit_tau(name):
    model = build_model(name, **({"profile": "constant"} if name == "tdf" else {}))
    sol = solve_rho(model, 0.0, 10.0, TOL)
    assert np.abs(tau_of_t(sol, TS) - TS).max() <= 1e-9


@pytest.mark.parametrize("params", [{}, {"profile": "quench"}, {"profile": "paul", "b": 0.6}])
def test_pinney_vs_direct(params):
    model = build_model("tdf", **params)
    a = solve_rho(model, 0.0, 10.0, TOL, method="pinney")
    b = solve_rho(model, 0.0, 10.0, TOL, method="direct")
    assert np.abs(a.rho(TS) - b.rho(TS)).max() <= 100 * TOL
    for sol in (a, b):
        assert sol.residual_sup <= 1000 * TOL
        assert np.abs(sol.residual(TS)).max() <= 1000 * TOL


def test_pinney_rejects_nonunit_mass():
    with pytest.raises(ValueError):
        solve_rho(build_model("ck"), 0.0, 1.0, TOL, method="pinney")


@settings(max_examples=15)
@given(st.floats(0.0, 1.5), st.floats(0.5, 2.0), st.floats(0.5, 3.0))
def test_tau_monotone_and_residual(g0, w0, m0):
    g0 = min(g0, 1.9 * w0)
    model = build_model("ck", gamma0=g0, omega0=w0, m0=m0)
    sol = solve_rho(model, 0.0, 6.0, 1e-9)
    assert sol.residual_sup <= 1000 * 1e-9
    tau = tau_of_t(sol, np.linspace(0, 6, 61))
    assert tau[0] == 0.0 and np.all(np.diff(tau) > 0)


def test_rho_crossing_reported():
    model = TDModel(mass=lambda t: np.ones_like(np.asarray(t, dtype=float)),
                    omega=lambda t: np.ones_like(np.asarray(t, dtype=float)), label="test")
    with pytest.raises(ValueError):
        solve_rho(model, 0.0, 1.0, TOL, initial=(-1.0, 0.0))


def test_no_oscillatory_seed():
    model = TDModel(mass=lambda t: np.exp(3 * np.asarray(t, dtype=float)),
                    omega=lambda t: np.ones_like(np.asarray(t, dtype=float)))
    with pytest.raises(SolverError):
        solve_rho(model, 0.0, 1.0, TOL)


def test_trajectory_sho():
    model = build_model("sho")
    tr = classical_trajectory(model, 1.0, 0.0, 0.0, 10.0, TOL)
    assert np.abs(tr.x(TS) - np.cos(TS)).max() <= TOL
    energy = 0.5 * (tr.p(TS) ** 2 + tr.x(TS) ** 2)
    assert np.abs(energy - 0.5).max() <= 10 * TOL


def test_trajectory_ck():
    g0 = 0.2
    big = math.sqrt(1 - g0 * g0 / 4)
    tr = classical_trajectory(build_model("ck", gamma0=g0), 1.0, 0.0, 0.0, 10.0, TOL)
    ref = np.exp(-g0 * TS / 2) * (np.cos(big * TS) + g0 / (2 * big) * np.sin(big * TS))
    assert np.abs(tr.x(TS) - ref).max() <= 10 * TOL
    assert np.all(np.abs(tr.x(TS)) <= np.exp(-g0 * TS / 2) / big + 10 * TOL)
    assert np.allclose(tr.p(TS), np.exp(g0 * TS) * tr.xdot(TS))


def test_export_rows():
    sol = solve_rho(build_model("sho"), 0.0, 2.0, TOL)
    rows = export_rows(sol, [0.0, 1.0, 2.0])
    assert [len(r) for r in rows] == [4, 4, 4]
    assert rows[0][3] == 0.0 and math.isclose(rows[2][3], 2.0, abs_tol=1e-9)
