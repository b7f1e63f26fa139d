"""Lewis-Riesenfeld invariant and the diagonal Laguerre-Gaussian Wigner functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ermakov import ErmakovSolution, TDModel
from .errors import BoundaryDecayError
from .symbols import GridSymbol, PhaseGrid

LAGUERRE_MAX_N = 500


@dataclass(frozen=True)
class InvariantSpec:
    """A model, its auxiliary solution and ``hbar``."""

    model: TDModel
    sol: ErmakovSolution
    hbar: float = 1.0

    def __post_init__(self):
        if self.sol.model is not self.model:
            raise ValueError("solution was not generated from this model")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @property
    def omega_cap(self) -> float:
        return self.model.omega_cap


def xi_pi_of_xp(spec: InvariantSpec, x, p, t: float):
    """Scaled coordinates ``xi = x/rho``, ``pi = p rho - m x rhodot``."""
    r, rd, m = spec.sol.rho(t), spec.sol.rhodot(t), spec.model.mass(t)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    return x / r, p * r - m * x * rd


def xp_of_xi_pi(spec: InvariantSpec, xi, pi, t: float):
    """Inverse of :func:`xi_pi_of_xp`."""
    r, rd, m = spec.sol.rho(t), spec.sol.rhodot(t), spec.model.mass(t)
    x = np.asarray(xi, dtype=float) * r
    return x, (np.asarray(pi, dtype=float) + m * x * rd) / r


def invariant_eval(spec: InvariantSpec, x, p, t: float):
    """``I = (pi^2 + Omega^2 xi^2)/2``."""
    xi, pi = xi_pi_of_xp(spec, x, p, t)
    return 0.5 * (pi * pi + spec.omega_cap ** 2 * xi * xi)


def laguerre(n: int, z):
    """Laguerre polynomial ``L_n(z)`` by the forward three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > LAGUERRE_MAX_N:
        raise ValueError(f"Laguerre order {n} exceeds the accuracy guard {LAGUERRE_MAX_N}")
    z = np.asarray(z, dtype=float)
    prev, cur = np.ones_like(z), 1.0 - z
    if n == 0:
        return prev if prev.ndim else float(prev)
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_table(n_max: int, z) -> np.ndarray:
    """``L_0 .. L_{n_max}`` stacked along a new leading axis."""
    if n_max > LAGUERRE_MAX_N:
        raise ValueError(f"Laguerre order {n_max} exceeds the accuracy guard {LAGUERRE_MAX_N}")
    z = np.asarray(z, dtype=float)
    out = np.empty((n_max + 1,) + z.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - z
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - z) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def wigner_from_invariant(n: int, inv, hbar: float = 1.0, omega_cap: float = 1.0):
    """``W_n = ((-1)^n / (pi hbar)) exp(-2I/(hbar Omega)) L_n(4I/(hbar Omega))``."""
    z = 4.0 * np.asarray(inv, dtype=float) / (hbar * omega_cap)
    return (-1) ** n / (math.pi * hbar) * np.exp(-z / 2) * laguerre(n, z)


def decay_radius(n: int, rel: float = 1e-13) -> float:
    """Smallest ``z = 4I/(hbar Omega)`` beyond which ``|exp(-z/2) L_n(z)| < rel``."""
    z = np.linspace(0.0, 80.0 + 8.0 * n, 20001)
    env = np.abs(np.exp(-z / 2) * laguerre(n, z))
    above = np.nonzero(env >= rel)[0]
    return float(z[above[-1] + 1])


def auto_grid(n: int, hbar: float = 1.0, omega_cap: float = 1.0, n_points: int | None = None,
              rel: float = 1e-13) -> PhaseGrid:
    """Grid in ``(xi, pi)`` sized for ``W_n``.

    The half-extent in ``pi`` is the radius where ``W_n`` has decayed to
    ``rel`` times its peak; ``xi`` gets the same extent divided by Omega.
    The node count places the Nyquist wavenumber beyond the (equal) radius
    of the Fourier transform of ``W_n``, with a factor 1.5 margin.
    """
    z_max = decay_radius(n, rel)
    p_max = math.sqrt(z_max * hbar * omega_cap / 2)
    if n_points is None:
        need = 1.5 * 4 * p_max * p_max / (math.pi * hbar * omega_cap)
        n_points = max(32, 1 << math.ceil(math.log2(need)))
    return PhaseGrid(n_points, n_points, p_max / omega_cap, p_max)


def _check_decay(values: np.ndarray, tol: float, n: int):
    sup = np.abs(values).max()
    edge = max(np.abs(values[[0, -1], :]).max(), np.abs(values[:, [0, -1]]).max())
    if sup > 0 and edge > tol * sup:
        raise BoundaryDecayError(
            f"W_{n} is not decayed at the grid boundary: |edge|/sup = {edge / sup:.3g}",
            boundary=float(edge), sup=float(sup), n=n)


def wigner_n(n: int, grid: PhaseGrid, hbar: float = 1.0, omega_cap: float = 1.0,
             frame: str = "xi_pi", spec: InvariantSpec | None = None, t: float | None = None,
             decay_tol: float | None = 1e-12) -> GridSymbol:
    """Diagonal Wigner function ``W_n`` sampled on ``grid``.

    ``frame="xi_pi"`` samples in scaled coordinates. ``frame="x_p"`` pulls
    back through the scaling map at time ``t`` (needs ``spec``; ``hbar`` and
    Omega are then taken from it).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    X, P = grid.mesh()
    if frame == "xi_pi":
        inv = 0.5 * (P * P + omega_cap ** 2 * X * X)
    elif frame == "x_p":
        if spec is None or t is None:
            raise ValueError("frame 'x_p' needs spec and t")
        hbar, omega_cap = spec.hbar, spec.omega_cap
        inv = invariant_eval(spec, X, P, t)
    else:
        raise ValueError(f"unknown frame {frame!r}")
    vals = wigner_from_invariant(n, inv, hbar, omega_cap)
    if decay_tol is not None:
        _check_decay(vals, decay_tol, n)
    return GridSymbol(grid, vals)
