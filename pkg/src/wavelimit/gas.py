"""Ideal-gas thermodynamics shared by every other module.

All relations are for a perfect gas in specific-volume form,

    p = R*theta/v = A * v**(-gamma) * exp((gamma-1)*s/R),
    e = R*theta/(gamma-1),

so pressure can be evaluated either from (v, theta) or from (v, s).
Functions accept scalars or numpy arrays and broadcast elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError

#: Gas constant used by the kinetic model, chosen so that the specific
#: internal energy equals the temperature (E = (3/2) R theta = theta).
KINETIC_GAS_CONSTANT = 2.0 / 3.0


@dataclass(frozen=True)
class GasParams:
    """Gas constants: R (gas constant), gamma (adiabatic exponent), A
    (entropy normalization in the isentropic pressure law)."""

    R: float = 1.0
    gamma: float = 5.0 / 3.0
    A: float = 1.0

    def __post_init__(self):
        if not (self.R > 0.0):
            raise InvalidStateError(f"gas constant R must be > 0, got {self.R}")
        if not (self.gamma > 1.0):
            raise InvalidStateError(f"adiabatic exponent must be > 1, got {self.gamma}")
        if not (self.A > 0.0):
            raise InvalidStateError(f"entropy normalization A must be > 0, got {self.A}")


def kinetic_params(gamma: float = 5.0 / 3.0, A: float = 1.0) -> GasParams:
    """Gas parameters with R pinned to the kinetic normalization 2/3."""
    return GasParams(R=KINETIC_GAS_CONSTANT, gamma=gamma, A=A)


@dataclass(frozen=True)
class ThermoState:
    """A point value of specific volume, velocity and temperature."""

    v: float
    u: float
    theta: float

    def __post_init__(self):
        if not (self.v > 0.0 and math.isfinite(self.v)):
            raise InvalidStateError(f"specific volume must be > 0, got {self.v}")
        if not (self.theta > 0.0 and math.isfinite(self.theta)):
            raise InvalidStateError(f"temperature must be > 0, got {self.theta}")

    def as_tuple(self):
        return (self.v, self.u, self.theta)


def _require_positive(name, value):
    arr = np.asarray(value, dtype=float)
    if np.any(~(arr > 0.0)):
        raise InvalidStateError(f"{name} must be > 0, got {value!r}")


def pressure(v, theta, params: GasParams):
    """Thermal pressure R*theta/v."""
    _require_positive("specific volume", v)
    _require_positive("temperature", theta)
    out = params.R * np.asarray(theta, dtype=float) / v
    return float(out) if np.ndim(out) == 0 else out


def internal_energy(theta, params: GasParams):
    """Specific internal energy R*theta/(gamma-1)."""
    _require_positive("temperature", theta)
    out = params.R * np.asarray(theta, dtype=float) / (params.gamma - 1.0)
    return float(out) if np.ndim(out) == 0 else out


def entropy(v, theta, params: GasParams):
    """Specific entropy, the closed-form inversion of the isentropic
    pressure law against R*theta/v.

    The round trip pressure_isentropic(v, entropy(v, theta)) == R*theta/v
    holds exactly up to floating point.
    """
    _require_positive("specific volume", v)
    _require_positive("temperature", theta)
    g = params.gamma
    out = (params.R / (g - 1.0)) * np.log(
        params.R * np.asarray(theta, dtype=float) * np.asarray(v, dtype=float) ** (g - 1.0) / params.A
    )
    return float(out) if np.ndim(out) == 0 else out


def pressure_isentropic(v, s, params: GasParams):
    """Pressure A * v**(-gamma) * exp((gamma-1)*s/R) along an isentrope."""
    _require_positive("specific volume", v)
    g = params.gamma
    out = params.A * np.asarray(v, dtype=float) ** (-g) * np.exp((g - 1.0) * np.asarray(s, dtype=float) / params.R)
    return float(out) if np.ndim(out) == 0 else out


def theta_isentropic(v, s, params: GasParams):
    """Temperature on the isentrope: p(v, s)*v/R."""
    out = pressure_isentropic(v, s, params) * np.asarray(v, dtype=float) / params.R
    return float(out) if np.ndim(out) == 0 else out


def isentrope_coefficient(s, params: GasParams):
    """Coefficient K of the isentrope p = K * v**(-gamma)."""
    out = params.A * np.exp((params.gamma - 1.0) * np.asarray(s, dtype=float) / params.R)
    return float(out) if np.ndim(out) == 0 else out


def _check_family(family):
    if family not in (1, 3):
        raise ValueError(f"wave family must be 1 or 3, got {family!r}")


def char_speed(v, s, family, params: GasParams):
    """Characteristic speed of the mass-coordinate Euler system.

    Family 1 is -sqrt(gamma*p/v), family 3 is +sqrt(gamma*p/v) with
    p = p(v, s); the two are always of opposite sign.
    """
    _check_family(family)
    _require_positive("specific volume", v)
    p = pressure_isentropic(v, s, params)
    mag = np.sqrt(params.gamma * p / np.asarray(v, dtype=float))
    out = -mag if family == 1 else mag
    return float(out) if np.ndim(out) == 0 else out


def v_from_char_speed(w, s, family, params: GasParams):
    """Invert char_speed along an isentrope (closed form for a gamma-law gas).

    lambda**2 = gamma*K*v**-(gamma+1) with K the isentrope coefficient, so
    v = (gamma*K/w**2)**(1/(gamma+1)).  The sign of w must match the family.
    """
    _check_family(family)
    w_arr = np.asarray(w, dtype=float)
    if family == 1 and np.any(w_arr >= 0.0):
        raise ValueError("family-1 characteristic speed must be negative")
    if family == 3 and np.any(w_arr <= 0.0):
        raise ValueError("family-3 characteristic speed must be positive")
    K = isentrope_coefficient(s, params)
    out = (params.gamma * K / w_arr**2) ** (1.0 / (params.gamma + 1.0))
    return float(out) if np.ndim(out) == 0 else out


def v_from_pressure(p, s, params: GasParams):
    """Invert the isentropic pressure law for v."""
    _require_positive("pressure", p)
    K = isentrope_coefficient(s, params)
    out = (K / np.asarray(p, dtype=float)) ** (1.0 / params.gamma)
    return float(out) if np.ndim(out) == 0 else out


def eulerian_sound_speed(v, s, params: GasParams):
    """Eulerian sound speed sqrt(gamma*p*v) on an isentrope."""
    _require_positive("specific volume", v)
    p = pressure_isentropic(v, s, params)
    out = np.sqrt(params.gamma * p * np.asarray(v, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def state_pressure(state: ThermoState, params: GasParams) -> float:
    return pressure(state.v, state.theta, params)


def state_entropy(state: ThermoState, params: GasParams) -> float:
    return entropy(state.v, state.theta, params)
