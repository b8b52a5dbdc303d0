"""Exact Riemann solver for the rarefaction-contact-rarefaction pattern.

Solves the Euler equations in mass (Lagrangian) coordinates for initial
data connected by a 1-rarefaction, a stationary contact at x = 0 and a
3-rarefaction.  The two intermediate states share a common pressure p_m,
found by a bracketed one-dimensional root find on the velocity mismatch
of the two rarefaction curves; p_m must lie below both end pressures or
the configuration would require a shock and is rejected.

An Eulerian-frame evaluator is also provided: the kinetic solver runs in
the Eulerian frame, where the same intermediate states appear but wave
speeds are u -+ c with c the Eulerian sound speed and the contact moves
with the fluid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import gas
from .errors import NotRarefactionPatternError
from .gas import GasParams, ThermoState

#: relative tolerance of the middle-pressure root find
PRESSURE_RTOL = 1e-13


@dataclass(frozen=True)
class WavePattern:
    """Solved wave structure: end states, intermediate states, fan speeds.

    fan1/fan3 are (head, tail) characteristic speeds in mass coordinates,
    ordered increasingly; fan1 is negative, fan3 positive.  The contact
    sits at x = 0 for all time in this frame.
    """

    left: ThermoState
    star: ThermoState
    starstar: ThermoState
    right: ThermoState
    fan1: tuple[float, float]
    fan3: tuple[float, float]
    contact_speed: float = 0.0

    def middle_pressure(self, params: GasParams) -> float:
        return gas.state_pressure(self.star, params)

    def contact_strength(self) -> float:
        """Temperature jump across the contact."""
        return abs(self.starstar.theta - self.star.theta)

    def to_dict(self) -> dict:
        return {
            "left": self.left.as_tuple(),
            "star": self.star.as_tuple(),
            "starstar": self.starstar.as_tuple(),
            "right": self.right.as_tuple(),
            "fan1": list(self.fan1),
            "fan3": list(self.fan3),
            "contact_speed": self.contact_speed,
        }


def curve_velocity(v, v_anchor, u_anchor, s, family, params: GasParams):
    """Velocity on the family-1/3 curve through (v_anchor, u_anchor) at
    entropy s:  u = u_anchor - integral_{v_anchor}^{v} lambda_family.

    Closed form for a gamma-law gas; no restriction on which side of the
    anchor v lies (the curve is smooth through it).
    """
    c = gas.eulerian_sound_speed(v, s, params)
    c_anchor = gas.eulerian_sound_speed(v_anchor, s, params)
    sign = -1.0 if family == 1 else 1.0
    out = u_anchor + sign * (2.0 / (params.gamma - 1.0)) * (np.asarray(c) - c_anchor)
    return float(out) if np.ndim(out) == 0 else out


def rarefaction_u(v, anchor: ThermoState, family, params: GasParams):
    """Velocity on the rarefaction curve through `anchor`, evaluated at
    specific volume v on the admissible side (v <= anchor.v)."""
    gas._check_family(family)
    gas._require_positive("specific volume", v)
    if np.any(np.asarray(v) > anchor.v * (1.0 + 1e-12)):
        raise gas.InvalidStateError(
            f"v={v!r} is on the inadmissible side of the curve through v_anchor={anchor.v}"
        )
    s = gas.state_entropy(anchor, params)
    return curve_velocity(v, anchor.v, anchor.u, s, family, params)


def solve_pattern(left: ThermoState, right: ThermoState, params: GasParams) -> WavePattern:
    """Find the unique intermediate states of the R1-CD-R3 connection.

    Parametrized by the common middle pressure p_m in (0, min(p_left,
    p_right)): for a candidate p_m the middle velocity is computed from
    each rarefaction curve and the mismatch is driven to zero by brentq
    after bracketing.  Raises NotRarefactionPatternError (carrying the
    offending family) when the bracket does not exist.
    """
    p_l = gas.state_pressure(left, params)
    p_r = gas.state_pressure(right, params)
    s_l = gas.state_entropy(left, params)
    s_r = gas.state_entropy(right, params)

    def u_from_left(p):
        v = gas.v_from_pressure(p, s_l, params)
        return curve_velocity(v, left.v, left.u, s_l, 1, params)

    def u_from_right(p):
        v = gas.v_from_pressure(p, s_r, params)
        return curve_velocity(v, right.v, right.u, s_r, 3, params)

    def mismatch(p):
        return u_from_left(p) - u_from_right(p)

    p_hi = min(p_l, p_r)
    f_hi = mismatch(p_hi)
    scale = max(abs(left.u), abs(right.u), 1.0)
    if f_hi > 1e-14 * scale:
        family = 1 if p_l <= p_r else 3
        raise NotRarefactionPatternError(
            f"configuration is not R1-CD-R3: family {family} would need "
            f"p_m > {p_hi:.6g} (compression), velocity mismatch {f_hi:.3e}",
            family=family,
        )
    if f_hi >= 0.0:
        p_m = p_hi
    else:
        # mismatch is strictly decreasing in p, so walk the lower end down
        # until it brackets the root; failure to bracket means vacuum.
        p_lo = p_hi
        f_lo = f_hi
        while f_lo < 0.0:
            p_lo *= 0.5
            if p_lo < 1e-14 * p_hi:
                raise NotRarefactionPatternError(
                    "configuration is not R1-CD-R3: no positive middle pressure "
                    "(end states pull apart into vacuum)",
                    family=None,
                )
            f_lo = mismatch(p_lo)
        p_m = brentq(mismatch, p_lo, p_hi, rtol=PRESSURE_RTOL, maxiter=200)

    v_star = gas.v_from_pressure(p_m, s_l, params)
    v_starstar = gas.v_from_pressure(p_m, s_r, params)
    star = ThermoState(v_star, u_from_left(p_m), gas.theta_isentropic(v_star, s_l, params))
    starstar = ThermoState(
        v_starstar, u_from_right(p_m), gas.theta_isentropic(v_starstar, s_r, params)
    )
    fan1 = (
        gas.char_speed(left.v, s_l, 1, params),
        gas.char_speed(star.v, s_l, 1, params),
    )
    fan3 = (
        gas.char_speed(starstar.v, s_r, 3, params),
        gas.char_speed(right.v, s_r, 3, params),
    )
    return WavePattern(left, star, starstar, right, fan1, fan3)


def eval_riemann_fields(pattern: WavePattern, t, x, params: GasParams):
    """Vectorized piecewise evaluation of the Riemann solution in mass
    coordinates; returns (v, u, theta) arrays of the shape of x.

    Self-similar in xi = x/t: constant outside the fans, closed-form fan
    interior from inverting the characteristic speed on the isentrope,
    and the starstar value exactly at x = 0 (tie-break).
    """
    if not t > 0.0:
        raise ValueError(f"Riemann evaluation needs t > 0, got t={t}")
    xi = np.asarray(x, dtype=float) / t
    s_l = gas.state_entropy(pattern.left, params)
    s_r = gas.state_entropy(pattern.right, params)

    v = np.empty_like(xi)
    u = np.empty_like(xi)
    th = np.empty_like(xi)

    def fill(mask, state):
        v[mask], u[mask], th[mask] = state.v, state.u, state.theta

    fill(xi <= pattern.fan1[0], pattern.left)
    m1 = (xi > pattern.fan1[0]) & (xi < pattern.fan1[1])
    if np.any(m1):
        v1 = gas.v_from_char_speed(xi[m1], s_l, 1, params)
        v[m1] = v1
        u[m1] = curve_velocity(v1, pattern.left.v, pattern.left.u, s_l, 1, params)
        th[m1] = gas.theta_isentropic(v1, s_l, params)
    fill((xi >= pattern.fan1[1]) & (xi < 0.0), pattern.star)
    fill((xi >= 0.0) & (xi <= pattern.fan3[0]), pattern.starstar)
    m3 = (xi > pattern.fan3[0]) & (xi < pattern.fan3[1])
    if np.any(m3):
        v3 = gas.v_from_char_speed(xi[m3], s_r, 3, params)
        v[m3] = v3
        u[m3] = curve_velocity(v3, pattern.right.v, pattern.right.u, s_r, 3, params)
        th[m3] = gas.theta_isentropic(v3, s_r, params)
    fill(xi >= pattern.fan3[1], pattern.right)
    return v, u, th


def eval_riemann(pattern: WavePattern, t, x, params: GasParams) -> ThermoState:
    """Pointwise Riemann solution (v, u, theta)(t, x) in mass coordinates."""
    v, u, th = eval_riemann_fields(pattern, t, np.asarray([x], dtype=float), params)
    return ThermoState(float(v[0]), float(u[0]), float(th[0]))


def eulerian_wave_speeds(pattern: WavePattern, params: GasParams):
    """(fan1, contact, fan3) speeds of the same pattern in the Eulerian frame."""
    s_l = gas.state_entropy(pattern.left, params)
    s_r = gas.state_entropy(pattern.right, params)
    fan1 = (
        pattern.left.u - gas.eulerian_sound_speed(pattern.left.v, s_l, params),
        pattern.star.u - gas.eulerian_sound_speed(pattern.star.v, s_l, params),
    )
    contact = 0.5 * (pattern.star.u + pattern.starstar.u)
    fan3 = (
        pattern.starstar.u + gas.eulerian_sound_speed(pattern.starstar.v, s_r, params),
        pattern.right.u + gas.eulerian_sound_speed(pattern.right.v, s_r, params),
    )
    return fan1, contact, fan3


def eval_riemann_eulerian_fields(pattern: WavePattern, t, x, params: GasParams):
    """Riemann solution in the Eulerian frame; returns (v, u, theta) arrays.

    Same intermediate states as the mass-coordinate solution; the fans
    move at u -+ c and the contact travels with the middle velocity.
    """
    if not t > 0.0:
        raise ValueError(f"Riemann evaluation needs t > 0, got t={t}")
    xi = np.asarray(x, dtype=float) / t
    g = params.gamma
    s_l = gas.state_entropy(pattern.left, params)
    s_r = gas.state_entropy(pattern.right, params)
    K_l = gas.isentrope_coefficient(s_l, params)
    K_r = gas.isentrope_coefficient(s_r, params)
    fan1, contact, fan3 = eulerian_wave_speeds(pattern, params)

    v = np.empty_like(xi)
    u = np.empty_like(xi)
    th = np.empty_like(xi)

    def fill(mask, state):
        v[mask], u[mask], th[mask] = state.v, state.u, state.theta

    fill(xi <= fan1[0], pattern.left)
    m1 = (xi > fan1[0]) & (xi < fan1[1])
    if np.any(m1):
        c_l = gas.eulerian_sound_speed(pattern.left.v, s_l, params)
        c = ((g - 1.0) * (pattern.left.u - xi[m1]) + 2.0 * c_l) / (g + 1.0)
        v1 = (c**2 / (g * K_l)) ** (1.0 / (1.0 - g))
        v[m1] = v1
        u[m1] = xi[m1] + c
        th[m1] = gas.theta_isentropic(v1, s_l, params)
    fill((xi >= fan1[1]) & (xi < contact), pattern.star)
    fill((xi >= contact) & (xi <= fan3[0]), pattern.starstar)
    m3 = (xi > fan3[0]) & (xi < fan3[1])
    if np.any(m3):
        c_r = gas.eulerian_sound_speed(pattern.right.v, s_r, params)
        c = ((g - 1.0) * (xi[m3] - pattern.right.u) + 2.0 * c_r) / (g + 1.0)
        v3 = (c**2 / (g * K_r)) ** (1.0 / (1.0 - g))
        v[m3] = v3
        u[m3] = xi[m3] - c
        th[m3] = gas.theta_isentropic(v3, s_r, params)
    fill(xi >= fan3[1], pattern.right)
    return v, u, th
