"""Preset oscillators: the simple harmonic baseline, Caldirola-Kanai and time-dependent frequency."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ermakov import TDModel
from .symbols import PolySymbol

MODEL_ALIASES = {"sho": "sho", "ck": "caldirola_kanai", "caldirola_kanai": "caldirola_kanai",
                 "tdf": "td_frequency", "td_frequency": "td_frequency"}

DEFAULTS = {
    "sho": {"omega0": 1.0},
    "caldirola_kanai": {"m0": 1.0, "gamma0": 0.6, "omega0": 1.0},
    "td_frequency": {"profile": "paul", "a": 1.0, "b": 0.3, "omega1": 1.0, "omega2": 2.0,
                     "t_on": 2.0, "duration": 3.0, "omega0": 1.0},
}


@dataclass(frozen=True)
class ModelPreset:
    """Model identifier plus parameter overrides on top of :data:`DEFAULTS`."""

    id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in MODEL_ALIASES:
            raise ValueError(f"unknown model {self.id!r}; choose from sho, ck, tdf")
        object.__setattr__(self, "id", MODEL_ALIASES[self.id])
        unknown = set(self.params) - set(DEFAULTS[self.id])
        if unknown:
            raise ValueError(f"unknown parameter(s) for {self.id}: {sorted(unknown)}")

    def resolved(self) -> dict:
        out = dict(DEFAULTS[self.id])
        out.update(self.params)
        return out


def _const(value: float) -> Callable:
    return lambda t: np.full(np.shape(t), value, dtype=float) if np.ndim(t) else float(value)


def _positive(params: dict, *names: str) -> None:
    for k in names:
        if not float(params[k]) > 0:
            raise ValueError(f"parameter {k} must be positive, got {params[k]}")


def smootherstep(s):
    """Quintic ramp from 0 to 1 on [0, 1] with vanishing first and second derivatives at the ends."""
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (s * (6 * s - 15) + 10)


def tdf_frequency_specs() -> dict:
    """Catalog of frequency profiles for the unit-mass model.

    Each entry maps a profile name to ``(description, parameter names, builder)``
    where ``builder(params)`` returns a vectorized ``omega(t)``.
    """

    def paul(pr):
        a, b = float(pr["a"]), float(pr["b"])
        if a - abs(b) <= 0:
            raise ValueError("Paul-trap profile needs a > |b| so that omega^2 stays positive")
        return lambda t: np.sqrt(a + b * np.cos(t))

    def quench(pr):
        w1, w2 = float(pr["omega1"]), float(pr["omega2"])
        t_on, dur = float(pr["t_on"]), float(pr["duration"])
        if min(w1, w2, dur) <= 0:
            raise ValueError("quench profile needs positive omega1, omega2 and duration")
        return lambda t: w1 + (w2 - w1) * smootherstep((np.asarray(t, dtype=float) - t_on) / dur)

    def constant(pr):
        return _const(float(pr["omega0"]))

    return {
        "paul": ("omega^2 = a + b cos t", ("a", "b"), paul),
        "quench": ("omega = omega1 + (omega2 - omega1) smootherstep((t - t_on)/duration)",
                   ("omega1", "omega2", "t_on", "duration"), quench),
        "constant": ("omega = omega0", ("omega0",), constant),
    }


def _ck(pr: dict) -> TDModel:
    _positive(pr, "m0", "omega0")
    m0, g0, w0 = float(pr["m0"]), float(pr["gamma0"]), float(pr["omega0"])
    if g0 < 0:
        raise ValueError("gamma0 must be non-negative")
    if g0 >= 2 * w0:
        raise ValueError(f"overdamped Caldirola-Kanai (gamma0={g0} >= 2 omega0={2 * w0}) is not supported")
    big = math.sqrt(w0 * w0 - g0 * g0 / 4)

    def rho(t):
        return np.exp(-g0 * np.asarray(t, dtype=float) / 2) / math.sqrt(m0 * big)

    def invariant_coefficients(t):
        """``(c_pp, c_xp, c_xx)`` of ``I = c_pp p^2 + c_xp x p + c_xx x^2``."""
        e = np.exp(g0 * np.asarray(t, dtype=float))
        return 1 / (2 * m0 * big * e), g0 / (2 * big), m0 * w0 * w0 * e / (2 * big)

    closed = {
        "rho": rho,
        "rhodot": lambda t: -g0 / 2 * rho(t),
        "tau": lambda t: big * np.asarray(t, dtype=float),
        "omega0_cap": big,
        "invariant_coefficients": invariant_coefficients,
    }
    return TDModel(mass=lambda t: m0 * np.exp(g0 * np.asarray(t, dtype=float)),
                   omega=_const(w0), omega_cap=1.0,
                   mass_dot=lambda t: g0 * m0 * np.exp(g0 * np.asarray(t, dtype=float)),
                   label="caldirola_kanai", unit_mass=(g0 == 0 and m0 == 1.0),
                   params=pr, closed_forms=closed)


def _sho(pr: dict) -> TDModel:
    _positive(pr, "omega0")
    w0 = float(pr["omega0"])
    closed = {"rho": _const(1.0), "rhodot": _const(0.0), "tau": lambda t: np.asarray(t, dtype=float)}
    return TDModel(mass=_const(1.0), omega=_const(w0), omega_cap=w0, mass_dot=_const(0.0),
                   label="sho", unit_mass=True, params=pr, closed_forms=closed)


def _tdf(pr: dict) -> TDModel:
    specs = tdf_frequency_specs()
    profile = pr["profile"]
    if profile not in specs:
        raise ValueError(f"unknown frequency profile {profile!r}; choose from {sorted(specs)}")
    omega = specs[profile][2](pr)
    closed = {}
    if profile == "constant" or (profile == "paul" and float(pr["b"]) == 0):
        w = float(pr["omega0"]) if profile == "constant" else math.sqrt(float(pr["a"]))
        closed = {"rho": _const(w ** -0.5), "rhodot": _const(0.0),
                  "tau": lambda t: w * np.asarray(t, dtype=float)}
    return TDModel(mass=_const(1.0), omega=omega, omega_cap=1.0, mass_dot=_const(0.0),
                   label="td_frequency", unit_mass=True, params=pr, closed_forms=closed)


def build_model(preset: ModelPreset | str, **params) -> TDModel:
    """Instantiate a preset. ``build_model("ck", gamma0=0.2)`` is shorthand for a :class:`ModelPreset`."""
    if isinstance(preset, str):
        preset = ModelPreset(preset, params)
    elif params:
        preset = ModelPreset(preset.id, {**preset.params, **params})
    pr = preset.resolved()
    return {"sho": _sho, "caldirola_kanai": _ck, "td_frequency": _tdf}[preset.id](pr)


def hamiltonian_symbol(model: TDModel, t: float) -> PolySymbol:
    """``H = p^2/(2m) + m omega^2 x^2/2`` at time ``t``."""
    m = float(model.mass(t))
    w = float(model.omega(t))
    return PolySymbol({(0, 2): 1 / (2 * m), (2, 0): m * w * w / 2})
