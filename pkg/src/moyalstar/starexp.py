"""Star exponential of the scaled oscillator Hamiltonian and Wigner-function evolution.

Everything here lives in the scaled frame ``(xi, pi, tau)`` where
``H = (pi^2 + Omega^2 xi^2)/2`` does not depend on time.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.fft as sfft
from scipy.ndimage import map_coordinates

from .ermakov import ErmakovSolution
from .errors import BranchError, CoverageError, PoleError
from .invariant import LAGUERRE_MAX_N
from .star import star_grid
from .symbols import GridSymbol, PhaseGrid

POLE_BAND = 1e-3
DAMPING = 1e-8


def harmonic_symbol(grid: PhaseGrid, omega_cap: float = 1.0) -> GridSymbol:
    X, P = grid.mesh()
    return GridSymbol(grid, 0.5 * (P * P + omega_cap ** 2 * X * X))


def _pole_distance(theta: float) -> float:
    """Distance of ``theta/pi`` from the nearest odd integer."""
    r = (theta / math.pi - 1.0) % 2.0
    return min(r, 2.0 - r)


def star_exp_closed(H: GridSymbol, tau: float, hbar: float = 1.0, omega_cap: float = 1.0) -> GridSymbol:
    """``sec(Omega tau/2) exp[(2H/(i hbar Omega)) tan(Omega tau/2)]`` pointwise."""
    theta = omega_cap * tau
    dist = _pole_distance(theta)
    if dist < POLE_BAND:
        raise PoleError(f"Omega*tau = {theta:.17g} lies {dist:.3g} (in units of pi) from a pole of sec",
                        distance=dist)
    half = 0.5 * theta
    vals = np.exp(H.values * (2.0 / (1j * hbar * omega_cap) * math.tan(half))) / math.cos(half)
    return GridSymbol(H.grid, vals)


def star_exp_via_propagator(grid: PhaseGrid, tau: float, hbar: float = 1.0,
                            omega_cap: float = 1.0) -> GridSymbol:
    """Weyl symbol of the oscillator propagator.

    ``2 int exp(-2i xi' pi/hbar) K(xi+xi', tau; xi-xi', 0) dxi'`` with the
    Mehler kernel ``K``. The integrand is a complex Gaussian
    ``exp(-a xi'^2 - b xi')`` with purely imaginary ``a``; the integral is
    ``sqrt(pi/a) exp(b^2/(4a))`` where the square-root branch is picked with
    ``a + DAMPING`` (the limit of a convergent Gaussian) while the value
    uses the exact ``a``. The kernel prefactor carries the Maslov phase.
    """
    theta = omega_cap * tau
    dist = _pole_distance(theta)
    if dist < POLE_BAND:
        raise PoleError(f"Omega*tau = {theta:.17g} lies {dist:.3g} (in units of pi) from a pole "
                        "of the propagator symbol", distance=dist)
    s, c = math.sin(theta), math.cos(theta)
    if abs(s) < 1e-12:
        raise PoleError(f"kernel degenerate at Omega*tau = {theta:.17g}", distance=abs(s))
    maslov = math.floor(theta / math.pi)
    pref = math.sqrt(omega_cap / (2 * math.pi * hbar * abs(s))) * np.exp(
        -0.25j * math.pi - 0.5j * math.pi * maslov)
    # exp[i Omega/(hbar s) (xi^2 (c-1) + xi'^2 (c+1))] exp(-2i xi' pi/hbar)
    a = -1j * omega_cap * (1 + c) / (hbar * s)
    a_damped = a + DAMPING
    if a_damped.real <= 0:
        raise BranchError("Gaussian exponent not damped", a=a)
    gauss = np.sqrt(math.pi / a)
    damped = np.sqrt(math.pi / a_damped)
    if abs(gauss - damped) > abs(gauss + damped):
        gauss = -gauss
    X, P = grid.mesh()
    b = 2j * P / hbar
    phase = 1j * omega_cap * (c - 1) / (hbar * s) * X * X + b * b / (4 * a)
    return GridSymbol(grid, 2 * pref * gauss * np.exp(phase))


def fourier_dirichlet_sum(grid: PhaseGrid, tau: float, n_max: int, abel_r: float = 1.0,
                          hbar: float = 1.0, omega_cap: float = 1.0) -> GridSymbol:
    """Partial sum ``2 pi hbar sum_{n<=n_max} r^n exp(-i tau Omega (n+1/2)) W_n``.

    ``W_n`` carries unit integral; the ``2 pi hbar`` prefactor follows from
    ``W_n * W_n = W_n / (2 pi hbar)``.
    """
    if not 0 <= n_max <= LAGUERRE_MAX_N:
        raise ValueError(f"n_max must lie in [0, {LAGUERRE_MAX_N}]")
    if not 0 < abel_r <= 1:
        raise ValueError("abel_r must lie in (0, 1]")
    X, P = grid.mesh()
    z = 2.0 * (P * P + omega_cap ** 2 * X * X) / (hbar * omega_cap)
    gauss = np.exp(-z / 2) / (math.pi * hbar)
    phase = np.exp(-1j * tau * omega_cap)
    coef = np.exp(-0.5j * tau * omega_cap)
    acc = np.zeros(grid.shape, dtype=complex)
    prev, cur = np.ones_like(z), 1.0 - z
    for n in range(n_max + 1):
        if n == 0:
            lag = prev
        elif n == 1:
            lag = cur
        else:
            k = n - 1
            prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
            lag = cur
        acc += coef * ((-1) ** n) * lag
        coef *= abel_r * phase
    return GridSymbol(grid, 2 * math.pi * hbar * gauss * acc)


def phase_function(sol: ErmakovSolution, n: int, t, epsabs: float = 1e-10):
    """``exp(-i Omega (n+1/2) tau(t))``."""
    return np.exp(-1j * sol.model.omega_cap * (n + 0.5) * np.asarray(sol.tau(t, epsabs=epsabs)))


def rotation_sources(grid: PhaseGrid, tau: float, omega_cap: float = 1.0):
    """Backward characteristics of the oscillator flow for every node."""
    X, P = grid.mesh()
    c, s = math.cos(omega_cap * tau), math.sin(omega_cap * tau)
    return X * c - P / omega_cap * s, omega_cap * X * s + P * c


def _upsample2(v: np.ndarray, axis: int) -> np.ndarray:
    """Band-limited 2x refinement along ``axis`` (new nodes interleave the old)."""
    n = v.shape[axis]
    spec = sfft.fft(v, axis=axis)
    shape = list(v.shape)
    shape[axis] = 2 * n
    out = np.zeros(shape, dtype=complex)
    idx = [slice(None)] * v.ndim
    h = n // 2
    idx[axis] = slice(0, h)
    src = tuple(idx)
    out[src] = spec[src]
    idx[axis] = slice(2 * n - h, 2 * n)
    dst = tuple(idx)
    idx[axis] = slice(n - h, n)
    out[dst] = spec[tuple(idx)]
    # split the Nyquist bin so real input stays real
    idx[axis] = slice(h, h + 1)
    nyq = spec[tuple(idx)]
    out[tuple(idx)] = 0.5 * nyq
    idx[axis] = slice(2 * n - h, 2 * n - h + 1)
    out[tuple(idx)] = 0.5 * nyq
    return 2 * sfft.ifft(out, axis=axis)


def _shear(v: np.ndarray, axis: int, shifts: np.ndarray, h: float) -> np.ndarray:
    """``g[..., i, ...] = f(node_i + shifts)`` along ``axis``; ``shifts`` varies along the other axis.

    Exact Fourier translation on a copy zero-padded to twice the length.
    """
    v = np.moveaxis(v, axis, 0)
    n = v.shape[0]
    lo = n // 2
    padded = np.zeros((2 * n,) + v.shape[1:], dtype=complex)
    padded[lo:lo + n] = v
    k = 2 * np.pi * sfft.fftfreq(2 * n, d=h)
    out = sfft.ifft(sfft.fft(padded, axis=0) * np.exp(1j * np.outer(k, shifts)), axis=0)
    return np.moveaxis(out[lo:lo + n], 0, axis)


def _rotate_spectral(values: np.ndarray, grid: PhaseGrid, theta: float, omega_cap: float) -> np.ndarray:
    """``f(R(theta) z)`` in the coordinates ``z = (Omega xi, pi)`` by three Fourier shears."""
    theta = math.remainder(theta, 2 * math.pi)
    v = values.astype(complex)
    if abs(theta) > math.pi / 2:
        # rotation by pi is the point reflection z -> -z
        v = np.roll(v[::-1, ::-1], 1, axis=(0, 1))
        theta = math.remainder(theta - math.pi, 2 * math.pi)
    if theta == 0:
        return v
    fine = _upsample2(_upsample2(v, 0), 1)
    x = -grid.x_max + 0.5 * grid.dx * np.arange(2 * grid.n_x)
    p = -grid.p_max + 0.5 * grid.dp * np.arange(2 * grid.n_p)
    alpha, beta = -math.tan(theta / 2), math.sin(theta)
    fine = _shear(fine, 0, alpha * p / omega_cap, 0.5 * grid.dx)
    fine = _shear(fine, 1, beta * omega_cap * x, 0.5 * grid.dp)
    fine = _shear(fine, 0, alpha * p / omega_cap, 0.5 * grid.dx)
    return fine[::2, ::2]


def evolve_wigner(W0: GridSymbol, tau: float, omega_cap: float = 1.0, method: str = "spectral",
                  decay_tol: float = 1e-10) -> GridSymbol:
    """Moyal evolution under the oscillator Hamiltonian: a rigid phase-space rotation.

    ``W(xi, pi, tau) = W0(xi cos - (pi/Omega) sin, Omega xi sin + pi cos)``.
    ``method="spectral"`` factors the rotation into three shears, each an
    exact Fourier translation on a 2x refined grid; ``method="spline"``
    resamples with quintic splines. Content rotated in from outside the grid
    is taken as zero, so ``W0`` must have decayed at the boundary.
    """
    grid = W0.grid
    if tau == 0:
        return W0
    xs, ps = rotation_sources(grid, tau, omega_cap)
    ix = (xs + grid.x_max) / grid.dx
    ip = (ps + grid.p_max) / grid.dp
    outside = (ix < 0) | (ix > grid.n_x - 1) | (ip < 0) | (ip > grid.n_p - 1)
    sup = np.abs(W0.values).max()
    edge = W0.boundary_max()
    if sup > 0 and edge > decay_tol * sup:
        raise CoverageError(
            f"{outside.mean():.3g} of the rotated nodes leave the grid and W0 is not decayed "
            f"there (|edge|/sup = {edge / sup:.3g})", clipped_fraction=float(outside.mean()))
    if method == "spectral":
        vals = _rotate_spectral(W0.values, grid, omega_cap * tau, omega_cap)
        if np.isrealobj(W0.values) or not np.any(W0.values.imag):
            vals = vals.real
        return GridSymbol(grid, vals)
    if method != "spline":
        raise ValueError(f"unknown method {method!r}")
    coords = np.array([ix, ip])

    def resample(v):
        return map_coordinates(v, coords, order=5, mode="constant", cval=0.0, prefilter=True)

    vals = resample(W0.values.real)
    if np.any(W0.values.imag != 0):
        vals = vals + 1j * resample(W0.values.imag)
    return GridSymbol(grid, vals)


def smooth_window(grid: PhaseGrid, radius: float, width: float, omega_cap: float = 1.0) -> np.ndarray:
    """Radial window equal to 1 inside ``radius`` and decaying as a Gaussian beyond it.

    The radius is measured in ``sqrt(pi^2 + Omega^2 xi^2)``.
    """
    X, P = grid.mesh()
    r = np.sqrt(P * P + (omega_cap * X) ** 2)
    excess = np.maximum(r - radius, 0.0)
    return np.exp(-(excess / width) ** 2)


def evolve_wigner_star(W0: GridSymbol, tau: float, hbar: float = 1.0, omega_cap: float = 1.0,
                       radius: float | None = None, width: float = 1.0) -> GridSymbol:
    """Evolution by star conjugation ``Exp(tau) * W0 * Exp(-tau)``.

    The star exponentials do not decay, so both are multiplied by
    :func:`smooth_window` before entering the integral star product; the
    result is accurate where the window equals one with margin. The default
    radius leaves four window widths to the grid edge.
    """
    grid = W0.grid
    if radius is None:
        radius = min(grid.p_max, omega_cap * grid.x_max) - 4 * width
    win = smooth_window(grid, radius, width, omega_cap)
    H = harmonic_symbol(grid, omega_cap)
    fwd = star_exp_closed(H, tau, hbar, omega_cap) * win
    bwd = star_exp_closed(H, -tau, hbar, omega_cap) * win
    inner = star_grid(W0, bwd, hbar, decay_tol=None)
    return star_grid(fwd, inner, hbar, decay_tol=None)
