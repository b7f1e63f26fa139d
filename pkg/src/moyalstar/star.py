"""The Moyal star product.

Three evaluation paths share the bidifferential kernel
``exp[(i hbar/2)(<-d_x ->d_p - <-d_p ->d_x)]``:

* :func:`star_poly` -- exact, terminating series on polynomials;
* :func:`star_mixed` -- polynomial times sampled symbol, series with grid
  derivatives of the sampled factor;
* :func:`star_grid` -- two sampled symbols, the integral (twisted
  convolution) form evaluated spectrally.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import BoundaryDecayError, GridMismatchError, StencilError
from .symbols import GridSymbol, PhaseGrid, PolySymbol


def _series_coeff(hbar: float, m: int, n: int) -> complex:
    if m + n == 0:
        return 1.0
    return (0.5j * hbar) ** (m + n) * (-1) ** m / (math.factorial(m) * math.factorial(n))


def star_poly(f: PolySymbol, g: PolySymbol, hbar: float = 1.0) -> PolySymbol:
    """Exact star product of two polynomials.

    The series terminates once the derivative orders exceed the degrees, so
    the result carries no truncation error. ``hbar = 0`` gives the pointwise
    product.
    """
    if hbar < 0:
        raise ValueError("hbar must be non-negative")
    out = PolySymbol()
    if f.is_zero() or g.is_zero():
        return out
    for m in range(min(f.degree_p, g.degree_x) + 1):
        for n in range(min(f.degree_x, g.degree_p) + 1):
            c = _series_coeff(hbar, m, n)
            if c == 0:
                continue
            left = f.deriv(order_x=n, order_p=m)
            right = g.deriv(order_x=m, order_p=n)
            if left.is_zero() or right.is_zero():
                continue
            out = out + (left * right) * c
    return out


# grid derivatives ----------------------------------------------------------

def fornberg_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights for ``d^order/dz^order`` at 0 from nodes ``offsets`` (unit spacing)."""
    z = np.asarray(offsets, dtype=float)
    n = len(z)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, z[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5 = 1.0, c4
        c4 = z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@lru_cache(maxsize=None)
def _fd_plan(n: int, order: int):
    """Per-node (start, weights) for a 4th-order accurate stencil on ``n`` nodes."""
    width_c = 2 * ((order + 1) // 2) + 3
    half = width_c // 2
    width_e = order + 4
    central = fornberg_weights(np.arange(-half, half + 1), order)
    edges = {}
    for i in list(range(half)) + list(range(n - half, n)):
        start = 0 if i < half else n - width_e
        edges[i] = (start, fornberg_weights(np.arange(width_e) + start - i, order))
    return half, central, edges


def fd_derivative(values: np.ndarray, axis: int, order: int, h: float) -> np.ndarray:
    """4th-order accurate derivative along ``axis``.

    Central stencils in the interior; one-sided stencils of the same order at
    the edges, so polynomial data of degree < order + 4 is differentiated
    exactly everywhere.
    """
    if order == 0:
        return values
    v = np.moveaxis(np.asarray(values), axis, 0)
    n = v.shape[0]
    half, central, edges = _fd_plan(n, order)
    out = np.zeros_like(v, dtype=np.result_type(v, float))
    for k, w in enumerate(central):
        out[half:n - half] += w * v[k:n - 2 * half + k]
    for i, (start, w) in edges.items():
        out[i] = np.tensordot(w, v[start:start + len(w)], axes=(0, 0))
    return np.moveaxis(out, 0, axis) / h ** order


def spectral_derivative(values: np.ndarray, axis: int, order: int, h: float) -> np.ndarray:
    """Periodic Fourier derivative; only meaningful for data decayed at the edges."""
    if order == 0:
        return values
    n = values.shape[axis]
    k = 2 * np.pi * sfft.fftfreq(n, d=h)
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    return sfft.ifft(sfft.fft(values, axis=axis) * mult.reshape(shape), axis=axis)


def grid_derivative(g: GridSymbol, order_x: int, order_p: int, method: str = "fd4") -> np.ndarray:
    if method == "fd4":
        d = fd_derivative
    elif method == "spectral":
        d = spectral_derivative
    else:
        raise ValueError(f"unknown derivative method {method!r}")
    out = d(g.values, 0, order_x, g.grid.dx)
    return d(out, 1, order_p, g.grid.dp)


def star_mixed(f: PolySymbol, g: GridSymbol, hbar: float = 1.0, max_order: int | None = None,
               side: str = "left", method: str = "fd4") -> GridSymbol:
    """Star product of a polynomial with a sampled symbol.

    ``side="left"`` returns ``f * g``; ``side="right"`` returns ``g * f``.
    Derivatives of ``f`` are exact, derivatives of ``g`` come from 4th-order
    finite differences (``method="fd4"``) or FFT differentiation
    (``method="spectral"``, requires ``g`` decayed at the boundary).
    """
    if max_order is None:
        max_order = f.degree
    if max_order < f.degree:
        raise ValueError(f"max_order={max_order} below polynomial degree {f.degree}")
    grid = g.grid
    if method == "fd4" and min(grid.n_x, grid.n_p) < 2 * max_order + 5:
        raise StencilError(
            f"grid {grid.n_x}x{grid.n_p} too coarse for derivative order {max_order}",
            required=2 * max_order + 5)
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    X, P = grid.mesh()
    out = np.zeros(grid.shape, dtype=complex)
    cache: dict = {}
    for m in range(max_order + 1):
        for n in range(max_order + 1 - m):
            c = _series_coeff(hbar, m, n)
            if c == 0:
                continue
            if side == "left":
                # (d_p^m d_x^n f)(d_p^n d_x^m g)
                df, order_g = f.deriv(order_x=n, order_p=m), (m, n)
            else:
                # (d_p^m d_x^n g)(d_p^n d_x^m f)
                df, order_g = f.deriv(order_x=m, order_p=n), (n, m)
            if df.is_zero():
                continue
            if order_g not in cache:
                cache[order_g] = grid_derivative(g, *order_g, method=method)
            out += c * df(X, P) * cache[order_g]
    return GridSymbol(grid, out)


# integral form -------------------------------------------------------------

def _check_decay(f: GridSymbol, tol: float, name: str) -> None:
    sup = np.abs(f.values).max()
    edge = f.boundary_max()
    if sup > 0 and edge > tol * sup:
        raise BoundaryDecayError(
            f"{name} does not decay at the grid boundary: |edge|/sup = {edge / sup:.3g} > {tol:g}",
            boundary=edge, sup=sup)


def _constant_value(f: GridSymbol):
    v = f.values.reshape(-1)
    return v[0] if np.all(v == v[0]) else None


def star_grid(f: GridSymbol, g: GridSymbol, hbar: float = 1.0, pad: int = 2,
              decay_tol: float | None = 1e-12, skip_tol: float = 1e-17) -> GridSymbol:
    """Star product of two sampled symbols via the integral representation.

    Partial Fourier transform along x turns the twisted convolution into

        (f*g)~(K, p) = (1/M) sum_b F_b(p + hbar k_{K-b}/2) G_{K-b}(p - hbar k_b/2),

    a discrete convolution over x-frequencies in which each term needs its
    factors translated along p by an exactly known amount. Translations are
    done as FFT phase ramps on a p-axis zero-padded by ``pad``. Cost is
    O(n_x^2 n_p log n_p). Both inputs must decay to ``decay_tol * sup`` at the
    boundary (pass ``decay_tol=None`` to skip the check); a constant factor is
    handled exactly as a multiple of the unit.
    """
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")
    # constants are multiples of the unit and need no decay
    for a, b in ((f, g), (g, f)):
        c = _constant_value(a)
        if c is not None:
            return GridSymbol(f.grid, c * b.values)
    if decay_tol is not None:
        _check_decay(f, decay_tol, "left factor")
        _check_decay(g, decay_tol, "right factor")
    grid = f.grid
    nx, np_ = grid.shape
    mp = pad * np_
    lo = (mp - np_) // 2

    def padded(v):
        out = np.zeros((nx, mp), dtype=complex)
        out[:, lo:lo + np_] = v
        return out

    kx = 2 * np.pi * sfft.fftfreq(nx, d=grid.dx)
    q = 2 * np.pi * sfft.fftfreq(mp, d=grid.dp)
    # ramp[b, q] translates a p-profile by -hbar*k_b/2
    ramp = np.exp(-0.5j * hbar * np.outer(kx, q))

    F = sfft.fft(padded(f.values), axis=0)
    G = sfft.fft(padded(g.values), axis=0)
    Fq = sfft.fft(F, axis=1)
    Gq = sfft.fft(G, axis=1)

    gmag = np.abs(G).max(axis=1)
    fmag = np.abs(F).max()
    cutoff = skip_tol * gmag.max() * fmag
    H = np.zeros((nx, mp), dtype=complex)
    for c in range(nx):
        if gmag[c] * fmag <= cutoff:
            continue
        A = sfft.ifft(Fq * ramp[c].conj(), axis=1)        # F_b(p + hbar k_c/2)
        B = sfft.ifft(Gq[c][None, :] * ramp, axis=1)      # G_c(p - hbar k_b/2)
        H += np.roll(A * B, c, axis=0)
    out = sfft.ifft(H / nx, axis=0)
    return GridSymbol(grid, out[:, lo:lo + np_])


def star_series(f: GridSymbol, g: GridSymbol, hbar: float = 1.0, max_order: int = 8,
                method: str = "spectral") -> GridSymbol:
    """Differential series truncated at total order ``max_order``, both factors sampled.

    Converges geometrically for symbols that vary slowly on the scale
    ``sqrt(hbar)``; an independent check of :func:`star_grid`.
    """
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")
    df: dict = {}
    dg: dict = {}
    out = np.zeros(f.grid.shape, dtype=complex)
    for m in range(max_order + 1):
        for n in range(max_order + 1 - m):
            if (n, m) not in df:
                df[(n, m)] = grid_derivative(f, n, m, method)
            if (m, n) not in dg:
                dg[(m, n)] = grid_derivative(g, m, n, method)
            out += _series_coeff(hbar, m, n) * df[(n, m)] * dg[(m, n)]
    return GridSymbol(f.grid, out)


def moyal_bracket(f, g, hbar: float = 1.0, **kwargs):
    """``(f*g - g*f)/(i hbar)`` for any mix of polynomial and sampled symbols."""
    if isinstance(f, PolySymbol) and isinstance(g, PolySymbol):
        d = star_poly(f, g, hbar) - star_poly(g, f, hbar)
        return d * (1 / (1j * hbar))
    if isinstance(f, PolySymbol):
        d = star_mixed(f, g, hbar, side="left", **kwargs) - star_mixed(f, g, hbar, side="right", **kwargs)
    elif isinstance(g, PolySymbol):
        d = star_mixed(g, f, hbar, side="right", **kwargs) - star_mixed(g, f, hbar, side="left", **kwargs)
    else:
        d = star_grid(f, g, hbar, **kwargs) - star_grid(g, f, hbar, **kwargs)
    return d / (1j * hbar)


def poisson_bracket_poly(f: PolySymbol, g: PolySymbol) -> PolySymbol:
    """Canonical Poisson bracket ``f_x g_p - f_p g_x``."""
    return f.deriv(1, 0) * g.deriv(0, 1) - f.deriv(0, 1) * g.deriv(1, 0)
