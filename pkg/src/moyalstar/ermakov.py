"""Auxiliary (Ermakov-Pinney) equation, the nonlinear time tau(t) and classical paths.

All ODEs are integrated with the Dormand-Prince 5(4) pair and its dense
output (``scipy.integrate.solve_ivp(method="RK45")``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import SolverError
from .star import fornberg_weights

N_PROBE = 1001


def _central4(fun: Callable, t, h):
    return (fun(t - 2 * h) - 8 * fun(t - h) + 8 * fun(t + h) - fun(t + 2 * h)) / (12 * h)


@dataclass(frozen=True)
class TDModel:
    """Time-dependent oscillator ``L = m(t)(xdot^2 - omega(t)^2 x^2)/2``.

    ``mass`` and ``omega`` must accept numpy arrays. ``mass_dot`` is optional;
    without it the friction rate ``gamma = mdot/m`` comes from a 4th-order
    central difference. ``closed_forms`` may carry reference callables
    (``"rho"``, ``"rhodot"``, ``"tau"``) used by the test harness.
    """

    mass: Callable
    omega: Callable
    omega_cap: float = 1.0
    mass_dot: Callable | None = None
    label: str = "custom"
    unit_mass: bool = False
    params: dict = field(default_factory=dict)
    closed_forms: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.omega_cap > 0:
            raise ValueError("omega_cap must be positive")

    def gamma(self, t):
        t = np.asarray(t, dtype=float)
        if self.mass_dot is not None:
            return self.mass_dot(t) / self.mass(t)
        h = 1e-5 * (1 + np.abs(t))
        return _central4(self.mass, t, h) / self.mass(t)

    def gamma_dot(self, t):
        t = np.asarray(t, dtype=float)
        return _central4(self.gamma, t, 1e-3 * (1 + np.abs(t)))

    def seed(self, t0: float) -> tuple[float, float]:
        """Initial ``(rho, rhodot)`` at ``t0``.

        ``rho = (Omega / (m w_eff))^(1/2)``, ``rhodot = -gamma rho / 2`` with
        ``w_eff^2 = omega^2 - gamma^2/4 - gammadot/2``: the stationary solution
        whenever the coefficients are frozen at their ``t0`` values (reproduces
        the damped constant-coefficient case exactly).
        """
        m = float(self.mass(t0))
        w = float(self.omega(t0))
        g = float(self.gamma(t0))
        gd = float(self.gamma_dot(t0))
        w_eff2 = w * w - g * g / 4 - gd / 2
        if w_eff2 <= 0:
            raise SolverError(f"no oscillatory seed at t0={t0}: w_eff^2 = {w_eff2:.3g}")
        rho0 = np.sqrt(self.omega_cap / (m * np.sqrt(w_eff2)))
        return float(rho0), float(-g * rho0 / 2)

    def check_interval(self, t0: float, t1: float) -> None:
        ts = np.linspace(t0, t1, 101)
        m = np.asarray(self.mass(ts))
        w = np.asarray(self.omega(ts))
        if not np.all(m > 0):
            raise ValueError(f"{self.label}: mass not positive on [{t0}, {t1}]")
        if not np.all(np.isfinite(w)):
            raise ValueError(f"{self.label}: omega not real on [{t0}, {t1}]")


MAX_STEP_FRACTION = 64


def _integrate(rhs, t0, t1, y0, tol):
    # max_step stops the step from growing unboundedly across equilibrium stretches
    sol = solve_ivp(rhs, (t0, t1), y0, method="RK45", rtol=0.1 * tol, atol=1e-3 * tol,
                    dense_output=True, max_step=max(t1 - t0, 1e-300) / MAX_STEP_FRACTION)
    if sol.status != 0:
        raise SolverError(f"integration failed on [{t0}, {t1}]: {sol.message}", t=float(sol.t[-1]))
    return sol.sol


def _check_tol(tol):
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-12, 1e-6], got {tol}")


@dataclass(frozen=True)
class LinearModes:
    """Fundamental solutions of ``y'' + gamma y' + omega^2 y = 0``.

    ``u(t0)=1, u'(t0)=0, v(t0)=0, v'(t0)=1``; ``wronskian`` is
    ``u v' - u' v`` at ``t0`` and ``wronskian_drift`` the largest relative
    deviation of ``m(t) W(t)`` from its initial value on the probe.
    """

    t0: float
    t1: float
    _dense: Callable
    wronskian: float
    wronskian_drift: float

    def u(self, t):
        return self._dense(t)[0]

    def udot(self, t):
        return self._dense(t)[1]

    def v(self, t):
        return self._dense(t)[2]

    def vdot(self, t):
        return self._dense(t)[3]

    def wronskian_at(self, t):
        y = self._dense(t)
        return y[0] * y[3] - y[1] * y[2]


def solve_linear_modes(model: TDModel, t0: float, t1: float, tol: float = 1e-10) -> LinearModes:
    _check_tol(tol)
    model.check_interval(t0, t1)

    def rhs(t, y):
        g, w2 = model.gamma(t), model.omega(t) ** 2
        return [y[1], -g * y[1] - w2 * y[0], y[3], -g * y[3] - w2 * y[2]]

    dense = _integrate(rhs, t0, t1, [1.0, 0.0, 0.0, 1.0], tol)
    ts = np.linspace(t0, t1, N_PROBE)
    y = dense(ts)
    mw = model.mass(ts) * (y[0] * y[3] - y[1] * y[2])
    w0 = float(model.mass(t0))
    drift = float(np.max(np.abs(mw - w0)) / abs(w0))
    if drift > 100 * tol:
        raise SolverError(f"Wronskian drift {drift:.3g} exceeds {100 * tol:.3g}", drift=drift)
    return LinearModes(t0, t1, dense, 1.0, drift)


@dataclass(frozen=True)
class ErmakovSolution:
    """Scaling function ``rho`` on ``[t0, t1]`` with derivative and nonlinear time."""

    model: TDModel
    t0: float
    t1: float
    rho: Callable
    rhodot: Callable
    residual_sup: float
    method: str

    def rhoddot(self, t):
        """Second derivative of rho by 4th-order differences of ``rhodot``.

        Five-node stencils are shifted inward near the interval ends so that
        every node stays inside ``[t0, t1]``.
        """
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        h = 1e-3 * max(1.0, self.t1 - self.t0) / 10
        start = np.clip(t - 2 * h, self.t0, self.t1 - 4 * h)
        out = np.empty_like(t)
        central = start == t - 2 * h
        if np.any(central):
            out[central] = _central4(self.rhodot, t[central], h)
        for k in np.nonzero(~central)[0]:
            nodes = start[k] + h * np.arange(5)
            w = fornberg_weights((nodes - t[k]) / h, 1)
            out[k] = w @ self.rhodot(nodes) / h
        return float(out[0]) if scalar else out

    def residual(self, t):
        """Pointwise defect of the auxiliary equation."""
        m = self.model
        r, rd, rdd = self.rho(t), self.rhodot(t), self.rhoddot(t)
        return rdd + m.gamma(t) * rd + m.omega(t) ** 2 * r - m.omega_cap ** 2 / (m.mass(t) ** 2 * r ** 3)

    def tau(self, t, epsabs: float = 1e-10):
        return tau_of_t(self, t, epsabs=epsabs)


def _pinney(model: TDModel, t0, t1, tol, rho0, rhod0):
    modes = solve_linear_modes(model, t0, t1, tol)
    a = rho0 ** 2
    b = rho0 * rhod0
    c = (model.omega_cap ** 2 / (model.mass(t0) * modes.wronskian) ** 2 + b * b) / a

    def rho(t):
        u, v = modes.u(t), modes.v(t)
        return np.sqrt(a * u * u + 2 * b * u * v + c * v * v)

    def rhodot(t):
        u, ud, v, vd = modes.u(t), modes.udot(t), modes.v(t), modes.vdot(t)
        return (a * u * ud + b * (ud * v + u * vd) + c * v * vd) / rho(t)

    return rho, rhodot


def _direct(model: TDModel, t0, t1, tol, rho0, rhod0):
    big_omega2 = model.omega_cap ** 2

    def rhs(t, y):
        r, rd = y
        if r <= 0:
            raise SolverError(f"rho reached {r:.3g} at t={t:.6g}", t=t)
        return [rd, -model.gamma(t) * rd - model.omega(t) ** 2 * r + big_omega2 / (model.mass(t) ** 2 * r ** 3)]

    dense = _integrate(rhs, t0, t1, [rho0, rhod0], tol)
    return (lambda t: dense(t)[0]), (lambda t: dense(t)[1])


def solve_rho(model: TDModel, t0: float, t1: float, tol: float = 1e-10,
              method: str = "auto", initial: tuple[float, float] | None = None) -> ErmakovSolution:
    """Solve the auxiliary equation ``rho'' + gamma rho' + omega^2 rho = Omega^2/(m^2 rho^3)``.

    ``method="pinney"`` builds rho from the linear fundamental solutions
    (unit-mass models only), ``"direct"`` integrates the nonlinear equation,
    ``"auto"`` picks pinney exactly when ``model.unit_mass``. Initial data
    default to :meth:`TDModel.seed`.
    """
    _check_tol(tol)
    model.check_interval(t0, t1)
    if method == "auto":
        method = "pinney" if model.unit_mass else "direct"
    if method == "pinney" and not model.unit_mass:
        raise ValueError("the superposition formula is only used for unit-mass models")
    rho0, rhod0 = initial if initial is not None else model.seed(t0)
    if rho0 <= 0:
        raise ValueError("rho(t0) must be positive")
    if method == "pinney":
        rho, rhodot = _pinney(model, t0, t1, tol, rho0, rhod0)
    elif method == "direct":
        rho, rhodot = _direct(model, t0, t1, tol, rho0, rhod0)
    else:
        raise ValueError(f"unknown method {method!r}")

    ts = np.linspace(t0, t1, N_PROBE)
    r = rho(ts)
    bad = np.nonzero(~(r > 0))[0]
    if bad.size:
        raise SolverError(f"rho crosses zero near t={ts[bad[0]]:.6g}", t=float(ts[bad[0]]))
    sol = ErmakovSolution(model, t0, t1, rho, rhodot, np.nan, method)
    res = float(np.max(np.abs(sol.residual(ts))))
    if res > 1000 * tol:
        raise SolverError(f"auxiliary-equation residual {res:.3g} exceeds {1000 * tol:.3g}", residual=res)
    return ErmakovSolution(model, t0, t1, rho, rhodot, res, method)


def tau_of_t(sol: ErmakovSolution, t, epsabs: float = 1e-10):
    """``tau(t) = int_{t0}^{t} ds / (m(s) rho(s)^2)`` by adaptive Gauss-Kronrod quadrature.

    Array input is integrated piecewise between sorted sample points and
    accumulated, so the result is monotone by construction.
    """
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < sol.t0 - 1e-12) or np.any(ts > sol.t1 + 1e-12):
        raise ValueError(f"t outside [{sol.t0}, {sol.t1}]")
    m = sol.model.mass

    def integrand(s):
        return 1.0 / (m(s) * sol.rho(s) ** 2)

    order = np.argsort(ts)
    out = np.empty_like(ts)
    acc, last = 0.0, sol.t0
    for k in order:
        b = min(max(ts[k], sol.t0), sol.t1)
        if b > last:
            val, err = quad(integrand, last, b, epsabs=epsabs / max(1, len(ts)), epsrel=0, limit=200)
            if not np.isfinite(val) or err > 10 * epsabs:
                raise SolverError(f"tau quadrature did not converge on [{last}, {b}]", error=err)
            acc += val
            last = b
        out[k] = acc
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class Trajectory:
    model: TDModel
    _dense: Callable

    def x(self, t):
        return self._dense(t)[0]

    def xdot(self, t):
        return self._dense(t)[1]

    def p(self, t):
        """Canonical momentum ``m(t) xdot``."""
        return self.model.mass(t) * self._dense(t)[1]


def classical_trajectory(model: TDModel, x0: float, xdot0: float, t0: float, t1: float,
                         tol: float = 1e-10) -> Trajectory:
    """Integrate ``x'' + gamma x' + omega^2 x = 0``."""
    _check_tol(tol)
    model.check_interval(t0, t1)

    def rhs(t, y):
        return [y[1], -model.gamma(t) * y[1] - model.omega(t) ** 2 * y[0]]

    return Trajectory(model, _integrate(rhs, t0, t1, [x0, xdot0], tol))


def export_rows(sol: ErmakovSolution, ts) -> list[tuple[float, float, float, float]]:
    """Rows ``(t, rho, rhodot, tau)`` for CSV export."""
    ts = np.asarray(ts, dtype=float)
    tau = tau_of_t(sol, ts)
    return [(float(t), float(sol.rho(t)), float(sol.rhodot(t)), float(tt))
            for t, tt in zip(ts, tau)]
