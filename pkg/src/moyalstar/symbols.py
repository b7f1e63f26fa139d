"""Phase-space value types: grids, sampled symbols and exact polynomial symbols."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import GridMismatchError


@dataclass(frozen=True)
class PhysContext:
    """Physical constants shared by a computation (natural units by default)."""

    hbar: float = 1.0
    omega_cap: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if not (self.omega_cap > 0 and math.isfinite(self.omega_cap)):
            raise ValueError(f"omega_cap must be positive and finite, got {self.omega_cap}")


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform origin-centred sampling of the (x, p) plane.

    Nodes are ``x_i = -x_max + i*dx`` for ``i = 0..n_x-1`` with
    ``dx = 2*x_max/n_x`` (periodic convention: ``+x_max`` itself is not a node,
    ``x = 0`` is node ``n_x//2``). Same for p.
    """

    n_x: int
    n_p: int
    x_max: float
    p_max: float

    def __post_init__(self):
        for name in ("n_x", "n_p"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or not _is_pow2(int(n)):
                raise ValueError(f"{name} must be a power of two >= 8, got {n}")
        if not (self.x_max > 0 and self.p_max > 0):
            raise ValueError("grid half-extents must be positive")

    @classmethod
    def square(cls, n: int, extent: float) -> "PhaseGrid":
        return cls(n, n, extent, extent)

    @property
    def dx(self) -> float:
        return 2.0 * self.x_max / self.n_x

    @property
    def dp(self) -> float:
        return 2.0 * self.p_max / self.n_p

    @property
    def x(self) -> np.ndarray:
        return -self.x_max + self.dx * np.arange(self.n_x)

    @property
    def p(self) -> np.ndarray:
        return -self.p_max + self.dp * np.arange(self.n_p)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_p)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(X, P)`` arrays of shape ``(n_x, n_p)``; x varies along axis 0."""
        return np.meshgrid(self.x, self.p, indexing="ij")

    def interior(self, fraction: float = 0.5) -> np.ndarray:
        """Boolean mask of nodes with ``|x| <= fraction*x_max`` and ``|p| <= fraction*p_max``."""
        X, P = self.mesh()
        return (np.abs(X) <= fraction * self.x_max) & (np.abs(P) <= fraction * self.p_max)

    def to_dict(self) -> dict:
        return {"n_x": self.n_x, "n_p": self.n_p, "x_max": self.x_max, "p_max": self.p_max}


@dataclass(frozen=True, eq=False)
class GridSymbol:
    """Complex function sampled on a :class:`PhaseGrid`; ``values[i, j] = f(x_i, p_j)``."""

    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("GridSymbol values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, func: Callable, grid: PhaseGrid) -> "GridSymbol":
        X, P = grid.mesh()
        return cls(grid, np.broadcast_to(func(X, P), grid.shape))

    @classmethod
    def constant(cls, grid: PhaseGrid, c: complex = 1.0) -> "GridSymbol":
        return cls(grid, np.full(grid.shape, c, dtype=complex))

    def _coerce(self, other):
        if isinstance(other, GridSymbol):
            if other.grid != self.grid:
                raise GridMismatchError(f"grid mismatch: {self.grid} vs {other.grid}")
            return other.values
        return other

    def __add__(self, other):
        return GridSymbol(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridSymbol(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return GridSymbol(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return GridSymbol(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridSymbol(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return GridSymbol(self.grid, -self.values)

    def conj(self) -> "GridSymbol":
        return GridSymbol(self.grid, self.values.conj())

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def boundary_max(self) -> float:
        """Largest modulus on the outermost ring of nodes."""
        v = np.abs(self.values)
        return float(max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max()))


Monomial = tuple[int, int]


@dataclass(frozen=True, eq=False)
class PolySymbol:
    """Bivariate polynomial ``sum c[i, j] x**i p**j`` with complex coefficients.

    Keys of ``coefficients`` are ``(degree_x, degree_p)``. Exact zeros are
    dropped on construction.
    """

    coefficients: Mapping[Monomial, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), c in dict(self.coefficients).items():
            if int(i) != i or int(j) != j or i < 0 or j < 0:
                raise ValueError(f"bad monomial exponents {(i, j)}")
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("PolySymbol coefficients must be finite")
            if c != 0:
                clean[(int(i), int(j))] = c
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    # constructors

    @classmethod
    def const(cls, c: complex = 1.0) -> "PolySymbol":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "PolySymbol":
        return cls({(1, 0): 1.0})

    @classmethod
    def p(cls) -> "PolySymbol":
        return cls({(0, 1): 1.0})

    @classmethod
    def monomial(cls, i: int, j: int, c: complex = 1.0) -> "PolySymbol":
        return cls({(i, j): c})

    # structure

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.coefficients), default=0)

    @property
    def degree_x(self) -> int:
        return max((i for i, _ in self.coefficients), default=0)

    @property
    def degree_p(self) -> int:
        return max((j for _, j in self.coefficients), default=0)

    def is_zero(self) -> bool:
        return not self.coefficients

    def items(self) -> Iterable[tuple[Monomial, complex]]:
        return self.coefficients.items()

    def coeff(self, i: int, j: int) -> complex:
        return self.coefficients.get((i, j), 0j)

    # algebra

    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.coefficients)
        for k, c in other.items():
            out[k] = out.get(k, 0) + c
        return PolySymbol(out)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol({k: -c for k, c in self.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        """Pointwise (commutative) product; see :func:`moyalstar.star.star_poly` for the star product."""
        if isinstance(other, PolySymbol):
            out: dict = {}
            for (i1, j1), c1 in self.items():
                for (i2, j2), c2 in other.items():
                    k = (i1 + i2, j1 + j2)
                    out[k] = out.get(k, 0) + c1 * c2
            return PolySymbol(out)
        if np.isscalar(other):
            return PolySymbol({k: c * other for k, c in self.items()})
        return NotImplemented

    __rmul__ = __mul__

    def conj(self) -> "PolySymbol":
        return PolySymbol({k: c.conjugate() for k, c in self.items()})

    def deriv(self, order_x: int = 0, order_p: int = 0) -> "PolySymbol":
        """Exact partial derivative ``d^order_x/dx d^order_p/dp``."""
        out = {}
        for (i, j), c in self.items():
            if i < order_x or j < order_p:
                continue
            fx = math.perm(i, order_x)
            fp = math.perm(j, order_p)
            out[(i - order_x, j - order_p)] = c * fx * fp
        return PolySymbol(out)

    def prune(self, tol: float) -> "PolySymbol":
        return PolySymbol({k: c for k, c in self.items() if abs(c) > tol})

    def allclose(self, other, atol: float = 1e-12) -> bool:
        other = _as_poly(other)
        keys = set(self.coefficients) | set(other.coefficients)
        return all(abs(self.coeff(*k) - other.coeff(*k)) <= atol for k in keys)

    def __call__(self, x, p):
        """Evaluate by Horner's rule, x outermost."""
        x = np.asarray(x)
        p = np.asarray(p)
        if not self.coefficients:
            return np.zeros(np.broadcast(x, p).shape, dtype=complex)
        dx, dp = self.degree_x, self.degree_p
        out = np.zeros(np.broadcast(x, p).shape, dtype=complex)
        for i in range(dx, -1, -1):
            inner = np.zeros_like(out)
            for j in range(dp, -1, -1):
                inner = inner * p + self.coeff(i, j)
            out = out * x + inner
        return out

    def __repr__(self):
        terms = " + ".join(f"({c:g})x^{i}p^{j}" for (i, j), c in self.items())
        return f"PolySymbol({terms or '0'})"


def _as_poly(obj) -> PolySymbol:
    if isinstance(obj, PolySymbol):
        return obj
    if np.isscalar(obj):
        return PolySymbol.const(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a PolySymbol")


def sample_poly(poly: PolySymbol, grid: PhaseGrid) -> GridSymbol:
    X, P = grid.mesh()
    return GridSymbol(grid, poly(X, P))


def symbol_norms(f: GridSymbol) -> tuple[float, float, complex]:
    """Return ``(l2, sup, integral)`` with uniform quadrature weights ``dx*dp``."""
    w = f.grid.dx * f.grid.dp
    v = f.values
    l2 = float(np.sqrt(np.sum(np.abs(v) ** 2) * w))
    sup = float(np.abs(v).max())
    integral = complex(np.sum(v) * w)
    return l2, sup, integral


# serialization -------------------------------------------------------------

_FMT = "{:.17g}"


def write_csv(f: GridSymbol, path) -> None:
    """Header ``x,p,re,im``; rows run p-fastest (x outer)."""
    x, p = f.grid.x, f.grid.p
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "p", "re", "im"])
        for i, xi in enumerate(x):
            for j, pj in enumerate(p):
                v = f.values[i, j]
                w.writerow([_FMT.format(xi), _FMT.format(pj), _FMT.format(v.real), _FMT.format(v.imag)])


def read_csv(path) -> GridSymbol:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs = np.unique(data[:, 0])
    ps = np.unique(data[:, 1])
    n_x, n_p = len(xs), len(ps)
    if n_x * n_p != len(data):
        raise ValueError(f"{path}: rows do not form a rectangular grid")
    # the first node is exactly -x_max, so the grid is recovered bit for bit
    grid = PhaseGrid(n_x, n_p, -xs[0], -ps[0])
    if not (np.allclose(grid.x, xs, rtol=0, atol=1e-9 * grid.x_max)
            and np.allclose(grid.p, ps, rtol=0, atol=1e-9 * grid.p_max)):
        raise ValueError(f"{path}: nodes are not a uniform origin-centred grid")
    values = (data[:, 2] + 1j * data[:, 3]).reshape(n_x, n_p)
    return GridSymbol(grid, values)


def write_json(f: GridSymbol, path, extra: dict | None = None) -> None:
    v = f.values.reshape(-1)
    doc = {"grid": f.grid.to_dict(), "values": [[float(z.real), float(z.imag)] for z in v]}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc))


def read_json(path) -> GridSymbol:
    doc = json.loads(Path(path).read_text())
    grid = PhaseGrid(**doc["grid"])
    arr = np.asarray(doc["values"], dtype=float)
    return GridSymbol(grid, (arr[:, 0] + 1j * arr[:, 1]).reshape(grid.shape))


def write_symbol(f: GridSymbol, path, fmt: str | None = None) -> None:
    fmt = fmt or Path(path).suffix.lstrip(".").lower()
    if fmt == "csv":
        write_csv(f, path)
    elif fmt == "json":
        write_json(f, path)
    else:
        raise ValueError(f"unknown symbol format {fmt!r}")


def read_symbol(path) -> GridSymbol:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return read_csv(path)
    if suffix == ".json":
        return read_json(path)
    raise ValueError(f"unknown symbol format {suffix!r}")
