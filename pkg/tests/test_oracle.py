import math

import numpy as np
import pytest

from moyalstar.errors import CoverageError
from moyalstar.oracle import (PositionGrid, measure_idempotency, momentum_operator, position_operator,
                              projector, sho_eigenstates, star_via_operators, weyl_quantize,
                              wigner_transform)
from moyalstar.symbols import GridSymbol, PhaseGrid, PolySymbol, sample_poly

X, P = PolySymbol.x(), PolySymbol.p()
QG = PositionGrid(64, 8.0)


def gaussian(s2=2.0, x0=0.0, p0=0.0):
    return lambda x, p: np.exp(-((x - x0) ** 2 + (p - p0) ** 2) / (2 * s2)) + 0j


def test_position_grid_validation():
    with pytest.raises(ValueError):
        PositionGrid(100, 1.0)
    with pytest.raises(ValueError):
        PositionGrid(1024, 1.0)
    assert math.isclose(QG.dq * QG.n_q, 2 * QG.q_max)


def test_unit_and_position():
    assert np.abs(weyl_quantize(PolySymbol.const(1.0), QG).matrix - np.eye(64)).max() < 1e-12
    assert np.abs(weyl_quantize(X, QG).matrix - position_operator(QG).matrix).max() < 1e-12


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_xp_is_symmetrized(hbar):
    Xo, Po = position_operator(QG), momentum_operator(QG, hbar)
    ref = 0.5 * (Xo @ Po + Po @ Xo).matrix
    got = weyl_quantize(X * P, QG, hbar).matrix
    assert np.abs(got - ref).max() <= 1e-6 * np.abs(ref).max()


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_hermitian_for_real_symbol(hbar):
    A = weyl_quantize(gaussian(3.0, 0.5, -1.0), QG, hbar).matrix
    assert np.abs(A - A.conj().T).max() <= 1e-10 * np.abs(A).max()


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_hilbert_schmidt_and_trace(hbar):
    qg = PositionGrid(128, 12.0)
    f = gaussian(2.0, 1.0, 0.5)
    A = weyl_quantize(f, qg, hbar)
    # closed-form phase-space integrals of the Gaussian
    int_f = 2 * math.pi * 2.0
    int_f2 = math.pi * 2.0
    assert abs(A.hs_norm_sq() - int_f2 / (2 * math.pi * hbar)) <= 1e-4 * int_f2 / (2 * math.pi * hbar)
    assert abs(A.trace() - int_f / (2 * math.pi * hbar)) <= 1e-4 * int_f / (2 * math.pi * hbar)


def test_identity_transforms_to_one():
    target = PhaseGrid(128, 16, 8.0, 3.0)
    W = wigner_transform(weyl_quantize(PolySymbol.const(1.0), QG), target)
    assert np.abs(W.values - 1).max() < 1e-12


def test_round_trip_gaussian():
    qg = PositionGrid(128, 12.0)
    target = PhaseGrid(256, 64, 12.0, 8.0)
    f = gaussian(3.0, 0.7, -0.4)
    W = wigner_transform(weyl_quantize(f, qg), target)
    ref = GridSymbol.from_function(f, target).values
    m = target.interior(0.5)
    assert np.abs(W.values - ref)[m].max() <= 1e-6 * np.abs(ref).max()


def test_coverage_error():
    with pytest.raises(CoverageError):
        wigner_transform(weyl_quantize(X, QG), PhaseGrid(64, 16, 9.0, 3.0))


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_ground_state_projector(hbar):
    qg = PositionGrid(128, 10.0 * math.sqrt(hbar))
    target = PhaseGrid(256, 64, qg.q_max, 8.0 * math.sqrt(hbar))
    energies, vecs = sho_eigenstates(qg, 2, hbar)
    assert np.allclose(energies, [0.5 * hbar, 1.5 * hbar], rtol=1e-8)
    W = wigner_transform(projector(vecs[:, 0], qg), target, hbar)
    Xg, Pg = target.mesh()
    ref = 2 * np.exp(-(Xg ** 2 + Pg ** 2) / hbar)  # 2 pi hbar times the unit-integral W_0
    m = target.interior(0.5)
    assert np.abs(W.values - ref)[m].max() <= 1e-5 * ref.max()


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_star_via_operators_x_left(hbar):
    # x * g = x g + (i hbar/2) dg/dp holds exactly; g = p w keeps the kernels decaying
    qg = PositionGrid(256, 14.0)
    target = PhaseGrid(512, 64, 14.0, 10.0)
    s2 = 4.0
    got = star_via_operators(X, lambda x, p: p * np.exp(-(x * x + p * p) / (2 * s2)) + 0j, target, qg, hbar)
    x, p = target.mesh()
    w = np.exp(-(x * x + p * p) / (2 * s2))
    ref = x * p * w + 0.5j * hbar * (1 - p * p / s2) * w
    m = target.interior(0.5)
    assert np.abs(got.values - ref)[m].max() <= 1e-5 * np.abs(ref[m]).max()


def test_star_via_operators_unit():
    qg = PositionGrid(128, 12.0)
    target = PhaseGrid(256, 64, 12.0, 8.0)
    g = gaussian(2.0, 0.5, 0.5)
    got = star_via_operators(PolySymbol.const(1.0), g, target, qg)
    ref = GridSymbol.from_function(g, target).values
    m = target.interior(0.5)
    assert np.abs(got.values - ref)[m].max() <= 1e-6


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_idempotency_constant(hbar):
    qg = PositionGrid(128, 10.0 * math.sqrt(hbar))
    target = PhaseGrid(256, 64, qg.q_max, 8.0 * math.sqrt(hbar))
    c = measure_idempotency(qg, target, hbar)
    assert abs(c * 2 * math.pi * hbar - 1) < 1e-6
