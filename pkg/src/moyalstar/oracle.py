"""Brute-force Weyl calculus on dense matrices.

Used as ground truth for :mod:`moyalstar.star`: symbols are quantized to
operator matrices, multiplied as matrices and mapped back to phase space.

Discretization convention: a kernel ``kappa(x, x')`` on a position grid with
spacing ``dq`` is stored as the matrix ``A[i, j] = kappa(x_i, x_j) * dq``, so
operator composition is the plain matrix product and ``trace(A)`` is the
operator trace. Every identity checked in this module relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.fft as sfft
from scipy.interpolate import RectBivariateSpline, make_interp_spline

from .errors import CoverageError
from .symbols import GridSymbol, PhaseGrid, PolySymbol

MAX_NQ = 512


@dataclass(frozen=True)
class PositionGrid:
    """``n_q`` nodes ``q_j = -q_max + j*dq``; conjugate momenta on the FFT lattice."""

    n_q: int
    q_max: float

    def __post_init__(self):
        n = self.n_q
        if n < 8 or n & (n - 1):
            raise ValueError(f"n_q must be a power of two >= 8, got {n}")
        if n > MAX_NQ:
            raise ValueError(f"dense oracle capped at n_q <= {MAX_NQ}")
        if self.q_max <= 0:
            raise ValueError("q_max must be positive")

    @property
    def dq(self) -> float:
        return 2.0 * self.q_max / self.n_q

    @property
    def q(self) -> np.ndarray:
        return -self.q_max + self.dq * np.arange(self.n_q)

    def momenta(self, hbar: float) -> np.ndarray:
        """Momentum lattice in FFT order, covering ``[-pi hbar/dq, pi hbar/dq)``."""
        return 2 * np.pi * hbar * sfft.fftfreq(self.n_q, d=self.dq)

    def matching_phase_grid(self, n_p: int, p_max: float, refine: int = 2) -> PhaseGrid:
        """Phase grid whose x nodes coincide with the oracle's Wigner output nodes."""
        return PhaseGrid(self.n_q * refine, n_p, self.q_max, p_max)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    matrix: np.ndarray
    grid: PositionGrid

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.grid.n_q, self.grid.n_q):
            raise ValueError("matrix shape does not match grid")
        if not np.all(np.isfinite(m)):
            raise ValueError("OperatorMatrix entries must be finite")
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.grid != self.grid:
            raise ValueError("operator grids differ")
        return OperatorMatrix(self.matrix @ other.matrix, self.grid)

    def __add__(self, other):
        return OperatorMatrix(self.matrix + other.matrix, self.grid)

    def __sub__(self, other):
        return OperatorMatrix(self.matrix - other.matrix, self.grid)

    def __mul__(self, s):
        return OperatorMatrix(self.matrix * s, self.grid)

    __rmul__ = __mul__

    @property
    def H(self) -> "OperatorMatrix":
        return OperatorMatrix(self.matrix.conj().T, self.grid)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hs_norm_sq(self) -> float:
        """``int |kappa|^2 dx dx'`` in the continuum normalization."""
        return float(np.sum(np.abs(self.matrix) ** 2))


Symbol = Union[GridSymbol, PolySymbol, Callable]


def _evaluator(f: Symbol) -> Callable:
    if isinstance(f, PolySymbol):
        return f
    if isinstance(f, GridSymbol):
        g = f.grid
        re = RectBivariateSpline(g.x, g.p, f.values.real, kx=5, ky=5)
        im = RectBivariateSpline(g.x, g.p, f.values.imag, kx=5, ky=5)
        x_lo, x_hi = g.x[0], g.x[-1]
        p_lo, p_hi = g.p[0], g.p[-1]

        def ev(X, P):
            X, P = np.broadcast_arrays(X, P)
            inside = (X >= x_lo) & (X <= x_hi) & (P >= p_lo) & (P <= p_hi)
            out = np.zeros(X.shape, dtype=complex)
            out[inside] = re.ev(X[inside], P[inside]) + 1j * im.ev(X[inside], P[inside])
            return out

        return ev
    if callable(f):
        return f
    raise TypeError(f"cannot quantize {type(f).__name__}")


def weyl_quantize(f: Symbol, qgrid: PositionGrid, hbar: float = 1.0,
                  lattice: int | None = None) -> OperatorMatrix:
    """Matrix of the Weyl operator with symbol ``f``.

    ``kappa(x, x') = (1/2 pi hbar) int f((x+x')/2, p) exp(i p (x-x')/hbar) dp``
    evaluated as a discrete Fourier sum over ``lattice * n_q`` momenta spanning
    ``[-pi hbar/dq, pi hbar/dq)``. The sum is periodic in ``x - x'`` with period
    ``lattice * 2 q_max``: ``lattice=2`` (default for sampled and callable
    symbols) keeps every node pair alias-free, ``lattice=1`` (default for
    polynomials) reproduces the periodic spectral operators exactly, e.g.
    ``x p -> (X P + P X)/2``.

    ``f`` may be a :class:`PolySymbol`, a vectorized callable ``f(x, p)`` or a
    :class:`GridSymbol` (quintic spline interpolation, zero outside its grid).
    """
    if lattice is None:
        lattice = 1 if isinstance(f, PolySymbol) else 2
    ev = _evaluator(f)
    n = qgrid.n_q
    nk = lattice * n
    s = np.arange(n)[:, None] + np.arange(n)[None, :]  # i + j indexes distinct midpoints
    mids = -qgrid.q_max + 0.5 * qgrid.dq * np.arange(2 * n - 1)
    pk = 2 * np.pi * hbar * sfft.fftfreq(nk, d=qgrid.dq / lattice) / lattice
    vals = np.asarray(ev(mids[:, None], pk[None, :]), dtype=complex)
    vals = np.broadcast_to(vals, (2 * n - 1, nk))
    # table[s, d] = (1/nk) sum_k f(mid_s, p_k) exp(2 pi i k d / nk)
    table = sfft.ifft(vals, axis=1)
    d = (np.arange(n)[:, None] - np.arange(n)[None, :]) % nk
    return OperatorMatrix(table[s, d], qgrid)


def position_operator(qgrid: PositionGrid) -> OperatorMatrix:
    return OperatorMatrix(np.diag(qgrid.q).astype(complex), qgrid)


def momentum_operator(qgrid: PositionGrid, hbar: float = 1.0) -> OperatorMatrix:
    """Spectral ``-i hbar d/dx``: ``F^-1 diag(p_k) F``."""
    n = qgrid.n_q
    eye = np.eye(n)
    m = sfft.ifft(qgrid.momenta(hbar)[:, None] * sfft.fft(eye, axis=0), axis=0)
    return OperatorMatrix(m, qgrid)


def _upsample_matrix(n: int, factor: int) -> np.ndarray:
    """Trigonometric interpolation from ``n`` periodic samples to ``factor*n``.

    Uses the FFT frequency set ``-n/2 .. n/2-1`` unsymmetrized, so that
    ``U @ U.conj().T`` restricted to integer node offsets is exactly the
    identity (the discrete delta survives refinement).
    """
    m = factor * n
    spec = sfft.fft(np.eye(n), axis=0)
    big = np.zeros((m, n), dtype=complex)
    h = n // 2
    big[:h] = spec[:h]
    big[m - h:] = spec[h:]
    return sfft.ifft(big, axis=0) * factor


def wigner_transform(A: OperatorMatrix, target: PhaseGrid | None = None, hbar: float = 1.0,
                     p: np.ndarray | None = None, refine: int = 2):
    """Phase-space symbol ``A_W(x, p) = int <x - y/2|A|x + y/2> exp(i p y/hbar) dy``.

    The kernel is refined ``refine``-fold by trigonometric interpolation so
    that both ``x -/+ y/2`` land on nodes for every integer multiple ``y`` of
    ``dq``; the ``y``-integral is then a direct Fourier sum at the requested
    momenta. Output x nodes are ``-q_max + i*dq/refine``. With a ``target``
    grid, nodes that coincide are copied and others are spline-interpolated
    along x; a target reaching outside the position grid raises
    :class:`CoverageError`. Without a target, returns ``(x, p, values)``.
    """
    g = A.grid
    n = g.n_q
    dq = g.dq
    if refine % 2:
        raise ValueError("refine must be even")
    m = refine * n
    U = _upsample_matrix(n, refine)
    K = U @ (A.matrix / dq) @ U.conj().T
    h = dq / refine
    xs = -g.q_max + h * np.arange(m)
    half = refine // 2                 # y = j*dq shifts the refined index by j*half
    if target is not None:
        p = target.p
        if target.x[0] < xs[0] - 1e-12 or target.x[-1] > xs[-1] + 1e-12:
            raise CoverageError("target grid extends beyond the position grid",
                                target=(target.x[0], target.x[-1]), cover=(xs[0], xs[-1]))
    if p is None:
        raise ValueError("need a target grid or momentum samples")
    p = np.asarray(p, dtype=float)
    jmax = (m - 1) // half
    js = np.arange(-jmax, jmax + 1)
    rows = np.arange(m)[:, None] - half * js[None, :]
    cols = np.arange(m)[:, None] + half * js[None, :]
    ok = (rows >= 0) & (rows < m) & (cols >= 0) & (cols < m)
    samples = np.where(ok, K[np.clip(rows, 0, m - 1), np.clip(cols, 0, m - 1)], 0.0)
    phase = np.exp(1j * np.outer(js * dq, p) / hbar)
    W = samples @ phase * dq
    if target is None:
        return xs, p, W
    idx = (target.x - xs[0]) / h
    if np.allclose(idx, np.round(idx), atol=1e-9):
        out = W[np.round(idx).astype(int)]
    else:
        spl_re = make_interp_spline(xs, W.real, k=5, axis=0)
        spl_im = make_interp_spline(xs, W.imag, k=5, axis=0)
        out = spl_re(target.x) + 1j * spl_im(target.x)
    return GridSymbol(target, out)


def star_via_operators(f: Symbol, g: Symbol, target: PhaseGrid, qgrid: PositionGrid,
                       hbar: float = 1.0) -> GridSymbol:
    """Star product by way of operator multiplication."""
    A = weyl_quantize(f, qgrid, hbar)
    B = weyl_quantize(g, qgrid, hbar)
    return wigner_transform(A @ B, target, hbar)


def sho_eigenstates(qgrid: PositionGrid, n_states: int = 1, hbar: float = 1.0,
                    omega: float = 1.0, mass: float = 1.0):
    """Lowest eigenpairs of the quantized ``p^2/2m + m omega^2 x^2/2``.

    Obtained by dense Hermitian diagonalization; no closed forms involved.
    Returns ``(energies, vectors)`` with unit-norm columns.
    """
    H = weyl_quantize(PolySymbol({(0, 2): 0.5 / mass, (2, 0): 0.5 * mass * omega ** 2}), qgrid, hbar)
    Hm = 0.5 * (H.matrix + H.matrix.conj().T)
    vals, vecs = np.linalg.eigh(Hm)
    return vals[:n_states], vecs[:, :n_states]


def projector(vec: np.ndarray, qgrid: PositionGrid) -> OperatorMatrix:
    """``|psi><psi|`` for a unit-norm vector (entries include the ``dq`` weight)."""
    v = np.asarray(vec)
    return OperatorMatrix(np.outer(v, v.conj()), qgrid)


def measure_idempotency(qgrid: PositionGrid, target: PhaseGrid, hbar: float = 1.0,
                        omega: float = 1.0, interior: float = 0.5) -> float:
    """Constant ``c`` in ``W0 * W0 = c W0`` measured entirely through matrices.

    ``W0`` is the Wigner transform of the numerically obtained ground-state
    projector, normalized to unit phase-space integral.
    """
    _, vecs = sho_eigenstates(qgrid, 1, hbar, omega)
    P = projector(vecs[:, 0], qgrid)
    W = wigner_transform(P, target, hbar)
    norm = W.values.sum().real * target.dx * target.dp
    W0 = W / norm
    sq = wigner_transform((P * (1 / norm)) @ (P * (1 / norm)), target, hbar)
    mask = target.interior(interior) & (np.abs(W0.values) > 1e-3 * np.abs(W0.values).max())
    ratio = sq.values[mask] / W0.values[mask]
    return float(np.median(ratio.real))
