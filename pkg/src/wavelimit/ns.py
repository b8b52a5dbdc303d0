"""Explicit finite-difference solver for the 1-D viscous system in mass
coordinates, run from superposed-ansatz initial data.

Scheme: unlimited central-slope reconstruction with a Rusanov (local
Lax-Friedrichs) flux on the convective part, second-order centered
differences on the diffusive fluxes, and two-stage second-order explicit
time integration.  The total-energy equation is discretized in its
conservative form, so the discrete cell sums of (v, u, E) change only
through the boundary fluxes; that budget is asserted every step.
Far-field boundary values are pinned to the end states via ghost cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import riemann
from .errors import InvalidStateError, SolverAbort
from .gas import GasParams
from .profiles import NU_MIN, ProfileConfig, superpose_fields


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on [x_min, x_max] with n cells."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"grid needs at least 16 cells, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("empty grid domain")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx


def grid_for_pattern(pattern: riemann.WavePattern, sigma: float, t_end: float, dx: float) -> Grid:
    """Domain sized so both wave families stay away from the boundaries
    through t_end, with a 10-sigma margin for the smoothing tails."""
    x_min = pattern.fan1[0] * max(t_end, 1.0) * 1.5 - 10.0 * sigma
    x_max = pattern.fan3[1] * max(t_end, 1.0) * 1.5 + 10.0 * sigma
    n = max(16, int(math.ceil((x_max - x_min) / dx)))
    return Grid(x_min, x_min + n * dx, n)


@dataclass
class FieldState:
    """Cell-centered (v, u, theta) fields at time t, plus grid metadata
    and the pinned far-field states used by the boundary conditions."""

    t: float
    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    grid: Grid
    bc_left: tuple
    bc_right: tuple
    max_drift: float = 0.0  # worst per-step conservation drift so far

    def __post_init__(self):
        if np.min(self.v) <= 0.0 or np.min(self.theta) <= 0.0:
            raise InvalidStateError("field state violates positivity")


@dataclass(frozen=True)
class SolverConfig:
    """Viscosity eps, heat-conduction ratio nu (kappa = nu*eps), gas
    parameters and step-size safety factors."""

    eps: float
    nu: float
    params: GasParams
    t_end: float
    snapshot_times: tuple = ()
    cfl: float = 0.4
    diff_safety: float = 0.4

    def __post_init__(self):
        if not self.eps > 0.0:
            raise InvalidStateError(f"eps must be > 0, got {self.eps}")
        if self.nu < NU_MIN:
            raise InvalidStateError(f"nu must be >= {NU_MIN}, got {self.nu}")
        if not 0.0 < self.cfl <= 0.9:
            raise InvalidStateError(f"cfl must be in (0, 0.9], got {self.cfl}")
        if not 0.0 < self.diff_safety <= 0.45:
            raise InvalidStateError(f"diff_safety must be in (0, 0.45], got {self.diff_safety}")

    @property
    def kappa(self) -> float:
        return self.nu * self.eps


@njit(cache=True, nogil=True)
def _rhs(v, u, E, bl, br, dx, eps, kappa, R, gamma):
    """Semi-discrete right-hand side in flux form.

    Returns the cell tendencies and the combined (convective - diffusive)
    fluxes at the two boundary faces for conservation accounting.
    """
    n = v.shape[0]
    m = n + 4
    vp = np.empty(m)
    up = np.empty(m)
    Ep = np.empty(m)
    for i in range(n):
        vp[i + 2] = v[i]
        up[i + 2] = u[i]
        Ep[i + 2] = E[i]
    vp[0] = vp[1] = bl[0]
    up[0] = up[1] = bl[1]
    Ep[0] = Ep[1] = bl[2]
    vp[m - 1] = vp[m - 2] = br[0]
    up[m - 1] = up[m - 2] = br[1]
    Ep[m - 1] = Ep[m - 2] = br[2]

    sv = np.zeros(m)
    su = np.zeros(m)
    sE = np.zeros(m)
    for j in range(1, m - 1):
        sv[j] = 0.5 * (vp[j + 1] - vp[j - 1])
        su[j] = 0.5 * (up[j + 1] - up[j - 1])
        sE[j] = 0.5 * (Ep[j + 1] - Ep[j - 1])

    nf = n + 1
    F0 = np.empty(nf)
    F1 = np.empty(nf)
    F2 = np.empty(nf)
    gm1 = gamma - 1.0
    for k in range(nf):
        j = k + 1
        vL = vp[j] + 0.5 * sv[j]
        uL = up[j] + 0.5 * su[j]
        EL = Ep[j] + 0.5 * sE[j]
        vR = vp[j + 1] - 0.5 * sv[j + 1]
        uR = up[j + 1] - 0.5 * su[j + 1]
        ER = Ep[j + 1] - 0.5 * sE[j + 1]
        pL = gm1 * (EL - 0.5 * uL * uL) / vL
        pR = gm1 * (ER - 0.5 * uR * uR) / vR
        cL = math.sqrt(gamma * abs(pL) / abs(vL))
        cR = math.sqrt(gamma * abs(pR) / abs(vR))
        al = cL if cL > cR else cR
        f0 = 0.5 * (-uL - uR) - 0.5 * al * (vR - vL)
        f1 = 0.5 * (pL + pR) - 0.5 * al * (uR - uL)
        f2 = 0.5 * (pL * uL + pR * uR) - 0.5 * al * (ER - EL)
        # diffusive fluxes, centered on the cell values
        vf = 0.5 * (vp[j] + vp[j + 1])
        uf = 0.5 * (up[j] + up[j + 1])
        ux = (up[j + 1] - up[j]) / dx
        thj = (Ep[j] - 0.5 * up[j] * up[j]) * gm1 / R
        thj1 = (Ep[j + 1] - 0.5 * up[j + 1] * up[j + 1]) * gm1 / R
        thx = (thj1 - thj) / dx
        F0[k] = f0
        F1[k] = f1 - eps * ux / vf
        F2[k] = f2 - kappa * thx / vf - eps * uf * ux / vf

    dv = np.empty(n)
    du = np.empty(n)
    dE = np.empty(n)
    for i in range(n):
        dv[i] = -(F0[i + 1] - F0[i]) / dx
        du[i] = -(F1[i + 1] - F1[i]) / dx
        dE[i] = -(F2[i + 1] - F2[i]) / dx
    fl = np.array([F0[0], F1[0], F2[0]])
    fr = np.array([F0[nf - 1], F1[nf - 1], F2[nf - 1]])
    return dv, du, dE, fl, fr


def _total_energy(u, theta, params: GasParams):
    return params.R * theta / (params.gamma - 1.0) + 0.5 * u * u


def _theta_of(u, E, params: GasParams):
    return (E - 0.5 * u * u) * (params.gamma - 1.0) / params.R


def stable_dt(state: FieldState, cfg: SolverConfig) -> float:
    """Step size limit.

    Besides the separate convective and diffusive restrictions, the
    two-stage integrator needs the combined constraint c + 2*mu <= 1
    (c the convective Courant number, mu the diffusion number): the von
    Neumann boundary of this flux/diffusion pairing is exactly that line,
    so taking only min(conv, diff) admits unstable pairs in the crossover
    regime dx ~ eps.
    """
    p = cfg.params.R * state.theta / state.v
    cmax = float(np.max(np.sqrt(cfg.params.gamma * p / state.v)))
    dx = state.grid.dx
    dt_conv = cfg.cfl * dx / cmax
    diff_coeff = max(cfg.eps, cfg.kappa * (cfg.params.gamma - 1.0) / cfg.params.R)
    diffusivity = diff_coeff / float(np.min(state.v))
    dt_diff = cfg.diff_safety * dx * dx / diffusivity
    dt_combined = 0.85 / (cmax / dx + 2.0 * diffusivity / (dx * dx))
    return min(dt_conv, dt_diff, dt_combined)


def step(state: FieldState, cfg: SolverConfig, dt: float | None = None, source=None) -> FieldState:
    """One two-stage explicit step; asserts the conservation budget and
    positivity before accepting.

    `source`, used by manufactured-solution tests, is a callable
    (t, x) -> (S_v, S_u, S_E) added to the tendencies at each stage.
    """
    if dt is None:
        dt = stable_dt(state, cfg)
    if not dt > 1e-15:
        raise SolverAbort(f"time step underflow: dt={dt}", t=state.t)
    params = cfg.params
    dx = state.grid.dx
    x = state.grid.centers()
    bl = np.array([state.bc_left[0], state.bc_left[1],
                   _total_energy(state.bc_left[1], state.bc_left[2], params)])
    br = np.array([state.bc_right[0], state.bc_right[1],
                   _total_energy(state.bc_right[1], state.bc_right[2], params)])
    v0, u0 = state.v, state.u
    E0 = _total_energy(u0, state.theta, params)

    k1 = _rhs(v0, u0, E0, bl, br, dx, cfg.eps, cfg.kappa, params.R, params.gamma)
    if source is not None:
        s = source(state.t, x)
        k1 = (k1[0] + s[0], k1[1] + s[1], k1[2] + s[2], k1[3], k1[4])
    v1 = v0 + dt * k1[0]
    u1 = u0 + dt * k1[1]
    E1 = E0 + dt * k1[2]
    k2 = _rhs(v1, u1, E1, bl, br, dx, cfg.eps, cfg.kappa, params.R, params.gamma)
    if source is not None:
        s = source(state.t + dt, x)
        k2 = (k2[0] + s[0], k2[1] + s[1], k2[2] + s[2], k2[3], k2[4])
    v_new = 0.5 * (v0 + v1 + dt * k2[0])
    u_new = 0.5 * (u0 + u1 + dt * k2[1])
    E_new = 0.5 * (E0 + E1 + dt * k2[2])

    # conservation budget: cell sums may move only by the boundary fluxes
    drift = 0.0
    if source is None:
        flux_l = 0.5 * (k1[3] + k2[3])
        flux_r = 0.5 * (k1[4] + k2[4])
        for w_old, w_new_, comp in ((v0, v_new, 0), (u0, u_new, 1), (E0, E_new, 2)):
            change = (np.sum(w_new_) - np.sum(w_old)) * dx
            budget = dt * (flux_l[comp] - flux_r[comp])
            scale = max(1.0, float(np.sum(np.abs(w_old))) * dx)
            drift = max(drift, abs(change - budget) / scale)
        if drift > 1e-12:
            raise SolverAbort(
                f"conservation drift {drift:.3e} exceeds 1e-12 of the flux budget",
                t=state.t,
            )

    theta_new = _theta_of(u_new, E_new, params)
    if np.min(v_new) <= 0.0 or np.min(theta_new) <= 0.0:
        bad = int(np.argmin(np.minimum(v_new, theta_new)))
        raise SolverAbort(
            f"positivity lost at t={state.t + dt:.6g}, cell {bad}",
            t=state.t + dt,
            cell=bad,
        )
    return FieldState(
        t=state.t + dt,
        v=v_new,
        u=u_new,
        theta=theta_new,
        grid=state.grid,
        bc_left=state.bc_left,
        bc_right=state.bc_right,
        max_drift=max(state.max_drift, drift),
    )


def init_from_ansatz(grid: Grid, cfg: ProfileConfig, params: GasParams) -> FieldState:
    """Initial fields sampled from the superposed profile at t = 0."""
    x = grid.centers()
    v, u, th = superpose_fields(0.0, x, cfg, params)
    left, right = cfg.pattern.left, cfg.pattern.right
    edge_err = max(
        abs(v[0] - left.v), abs(u[0] - left.u), abs(th[0] - left.theta),
        abs(v[-1] - right.v), abs(u[-1] - right.u), abs(th[-1] - right.theta),
    )
    if edge_err > 1e-8:
        raise ValueError(
            f"domain too narrow: end states missed by {edge_err:.3e} at the boundary"
        )
    return FieldState(
        t=0.0,
        v=v,
        u=u,
        theta=th,
        grid=grid,
        bc_left=left.as_tuple(),
        bc_right=right.as_tuple(),
    )


def run(grid: Grid, profile_cfg: ProfileConfig, solver_cfg: SolverConfig) -> list[FieldState]:
    """Integrate from the ansatz to t_end, returning snapshots at the
    requested times (dt is clamped so each snapshot time is hit exactly;
    the actual time is recorded on the snapshot).  t_end is always
    included."""
    state = init_from_ansatz(grid, profile_cfg, solver_cfg.params)
    times = sorted({float(ts) for ts in solver_cfg.snapshot_times if 0.0 < ts <= solver_cfg.t_end}
                   | ({solver_cfg.t_end} if solver_cfg.t_end > 0.0 else set()))
    snapshots = []
    if solver_cfg.t_end <= 0.0 or (solver_cfg.snapshot_times and 0.0 in solver_cfg.snapshot_times):
        snapshots.append(state)
    if solver_cfg.t_end <= 0.0:
        return snapshots or [state]
    for t_target in times:
        while state.t < t_target - 1e-13:
            dt = min(stable_dt(state, solver_cfg), t_target - state.t)
            state = step(state, solver_cfg, dt=dt)
        snapshots.append(state)
    return snapshots


def sup_error_on_sigma(snapshot: FieldState, pattern: riemann.WavePattern, h: float,
                       alpha: float, eps: float, params: GasParams,
                       contact_speed: float = 0.0) -> float:
    """Max-norm distance to the Riemann solution over the cells of the
    exclusion set: |x - contact_speed*t| / sqrt(1+t) >= h*eps**alpha.

    The snapshot time must be past the initial-layer cut t >= h.
    """
    if not h > 0.0:
        raise ValueError(f"h must be > 0, got {h}")
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must be in (0, 1/2), got {alpha}")
    if snapshot.t < h:
        raise ValueError(f"snapshot at t={snapshot.t} is before the t >= h={h} cut")
    x = snapshot.grid.centers()
    t = snapshot.t
    mask = np.abs(x - contact_speed * t) / math.sqrt(1.0 + t) >= h * eps**alpha
    if not np.any(mask):
        raise ValueError("exclusion set does not intersect the grid")
    v, u, th = riemann.eval_riemann_fields(pattern, t, x[mask], params)
    err = np.maximum(
        np.abs(snapshot.v[mask] - v),
        np.maximum(np.abs(snapshot.u[mask] - u), np.abs(snapshot.theta[mask] - th)),
    )
    return float(np.max(err))
