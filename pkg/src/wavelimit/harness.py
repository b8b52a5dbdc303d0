"""Experiment orchestration: epsilon sweeps of both models, convergence
rate fitting, the ansatz-vs-Riemann bound ledger, and all file I/O.

Everything here is deterministic: identical configurations produce
byte-identical CSV and JSON outputs (floats are written with shortest
round-trip repr and JSON keys are sorted).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bgk, ns, profiles, riemann
from .errors import ConfigError, SolverAbort
from .gas import KINETIC_GAS_CONSTANT, GasParams, ThermoState

CONFIG_KEYS = {
    "model", "gamma", "R", "A",
    "v_left", "u_left", "theta_left", "v_right", "u_right", "theta_right",
    "eps_list", "nu", "h", "alpha", "t_end", "snapshot_times", "dx_per_eps",
    "out_dir",
}

#: noise floor below which errors are treated as exactly zero for fitting
FIT_FLOOR = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: model, end states, epsilon ladder, exclusion-set
    parameters and grid slaving rule (dx = eps / dx_per_eps)."""

    model: str
    left: ThermoState
    right: ThermoState
    params: GasParams
    eps_list: tuple
    nu: float = 1.0
    h: float = 0.5
    alpha: float = 0.25
    t_end: float = 1.0
    snapshot_times: tuple = ()
    dx_per_eps: float = 8.0
    out_dir: str = "out"

    def __post_init__(self):
        if self.model not in (profiles.NAVIER_STOKES, profiles.KINETIC):
            raise ConfigError(f"unknown model {self.model!r}")
        if len(self.eps_list) == 0:
            raise ConfigError("eps_list is empty")
        if any(e <= 0.0 for e in self.eps_list):
            raise ConfigError("eps values must be > 0")
        if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
            raise ConfigError(f"eps_list must be strictly decreasing, got {self.eps_list}")
        if not self.h > 0.0:
            raise ConfigError(f"h must be > 0, got {self.h}")
        if not 0.0 < self.alpha < 0.5:
            raise ConfigError(f"alpha must be in (0, 1/2), got {self.alpha}")
        if self.model == profiles.KINETIC and abs(self.params.R - KINETIC_GAS_CONSTANT) > 1e-12:
            raise ConfigError("kinetic model requires R = 2/3")

    def times_to_record(self):
        ts = tuple(t for t in self.snapshot_times if 0.0 < t <= self.t_end)
        if self.t_end not in ts:
            ts = ts + (self.t_end,)
        return tuple(sorted(set(ts)))


def parse_config_text(text: str) -> dict:
    """Parse the documented `key = value` format (one pair per line,
    '#' comments, UTF-8)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    return experiment_from_mapping(parse_config_text(p.read_text(encoding="utf-8")))


def _floats(text):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"bad float list {text!r}") from exc


def _float(mapping, key, default=None):
    if key not in mapping:
        if default is None:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    try:
        return float(mapping[key])
    except ValueError as exc:
        raise ConfigError(f"bad float for {key!r}: {mapping[key]!r}") from exc


def experiment_from_mapping(m: dict) -> ExperimentConfig:
    model = m.get("model", profiles.NAVIER_STOKES)
    default_R = KINETIC_GAS_CONSTANT if model == profiles.KINETIC else 1.0
    params = GasParams(
        R=_float(m, "R", default_R),
        gamma=_float(m, "gamma", 5.0 / 3.0),
        A=_float(m, "A", 1.0),
    )
    left = ThermoState(_float(m, "v_left"), _float(m, "u_left"), _float(m, "theta_left"))
    right = ThermoState(_float(m, "v_right"), _float(m, "u_right"), _float(m, "theta_right"))
    if "eps_list" not in m:
        raise ConfigError("missing required config key 'eps_list'")
    return ExperimentConfig(
        model=model,
        left=left,
        right=right,
        params=params,
        eps_list=_floats(m["eps_list"]),
        nu=_float(m, "nu", 1.0),
        h=_float(m, "h", 0.5),
        alpha=_float(m, "alpha", 0.25),
        t_end=_float(m, "t_end", 1.0),
        snapshot_times=_floats(m.get("snapshot_times", "")),
        dx_per_eps=_float(m, "dx_per_eps", 8.0),
        out_dir=m.get("out_dir", "out"),
    )


# ---------------------------------------------------------------------------
# Rate fitting


def fit_rate(eps_values, errors):
    """Ordinary least squares of log(error) against log(eps).

    Returns (rate, constant, residual) with error ~= constant * eps**rate
    and residual the RMS misfit in log space.
    """
    eps_arr = np.asarray(eps_values, dtype=float)
    err_arr = np.asarray(errors, dtype=float)
    if eps_arr.size < 2:
        raise ValueError("rate fit needs at least two points")
    le, lr = np.log(eps_arr), np.log(err_arr)
    slope, intercept = np.polyfit(le, lr, 1)
    resid = float(np.sqrt(np.mean((lr - (slope * le + intercept)) ** 2)))
    return float(slope), float(math.exp(intercept)), resid


# ---------------------------------------------------------------------------
# Single-model runs


def pattern_for(config: ExperimentConfig) -> riemann.WavePattern:
    return riemann.solve_pattern(config.left, config.right, config.params)


def profile_config_for(config: ExperimentConfig, eps: float,
                       pattern: riemann.WavePattern | None = None,
                       contact: profiles.ContactWaveTable | None = None) -> profiles.ProfileConfig:
    pattern = pattern if pattern is not None else pattern_for(config)
    if contact is None:
        return profiles.build_profile_config(
            eps, pattern, config.params, nu=config.nu, model=config.model
        )
    # the contact table does not depend on eps, so sweeps share one
    cfg = profiles.ProfileConfig(eps=eps, pattern=pattern, nu=config.nu, model=config.model)
    cfg.contact = contact
    return cfg


def grid_for(config: ExperimentConfig, eps: float, pattern: riemann.WavePattern,
             sigma: float) -> ns.Grid:
    dx = eps / config.dx_per_eps
    if config.model == profiles.NAVIER_STOKES:
        return ns.grid_for_pattern(pattern, sigma, config.t_end, dx)
    fan1, _, fan3 = riemann.eulerian_wave_speeds(pattern, config.params)
    x_min = fan1[0] * max(config.t_end, 1.0) * 1.5 - 10.0 * sigma
    x_max = fan3[1] * max(config.t_end, 1.0) * 1.5 + 10.0 * sigma
    n = max(16, int(math.ceil((x_max - x_min) / dx)))
    return ns.Grid(x_min, x_min + n * dx, n)


def global_maxwellian_for(pattern: riemann.WavePattern) -> bgk.GlobalMaxwellian:
    states = (pattern.left, pattern.star, pattern.starstar, pattern.right)
    thetas = [s.theta for s in states]
    return bgk.choose_global_maxwellian(
        min(thetas), max(thetas),
        float(np.mean([s.v for s in states])),
        float(np.mean([s.u for s in states])),
    )


def velocity_grid_for(config: ExperimentConfig, pattern: riemann.WavePattern,
                      count=64, spread=12.0) -> bgk.VelocityGrid:
    states = (pattern.left, pattern.star, pattern.starstar, pattern.right)
    thetas = [s.theta for s in states]
    us = [s.u for s in states]
    vg = bgk.VelocityGrid.build(config.params.R, max(thetas), min(us), max(us),
                                count=count, spread=spread)
    vg.validate_for(config.params.R, (min(thetas), max(thetas)), (min(us), max(us)))
    return vg


def run_ns_entry(config: ExperimentConfig, eps: float, pattern=None, contact=None):
    """One Navier-Stokes run; returns (snapshots, pattern, cfg, grid)."""
    pattern = pattern if pattern is not None else pattern_for(config)
    cfg = profile_config_for(config, eps, pattern, contact)
    grid = grid_for(config, eps, pattern, cfg.sigma)
    solver_cfg = ns.SolverConfig(
        eps=eps, nu=config.nu, params=config.params, t_end=config.t_end,
        snapshot_times=config.times_to_record(),
    )
    snaps = ns.run(grid, cfg, solver_cfg)
    return snaps, pattern, cfg, grid


def run_bgk_entry(config: ExperimentConfig, eps: float, pattern=None, vgrid=None,
                  contact=None):
    """One kinetic run; returns (snapshots, pattern, cfg, grid, vgrid)."""
    pattern = pattern if pattern is not None else pattern_for(config)
    cfg = profile_config_for(config, eps, pattern, contact)
    grid = grid_for(config, eps, pattern, cfg.sigma)
    vgrid = vgrid if vgrid is not None else velocity_grid_for(config, pattern)
    snaps = bgk.bgk_run(grid, vgrid, cfg, eps, config.t_end, config.params,
                        snapshot_times=config.times_to_record())
    return snaps, pattern, cfg, grid, vgrid


def kinetic_sup_distance(field: bgk.KineticField, pattern: riemann.WavePattern,
                         config: ExperimentConfig, eps: float,
                         m_star: bgk.GlobalMaxwellian) -> float:
    """Sup over the exclusion-set cells of the weighted distance to the
    Maxwellian of the Eulerian Riemann solution (contact core excluded
    along its Eulerian path)."""
    x = field.grid.centers()
    t = field.t
    _, contact, _ = riemann.eulerian_wave_speeds(pattern, config.params)
    mask = np.abs(x - contact * t) / math.sqrt(1.0 + t) >= config.h * eps**config.alpha
    if not np.any(mask):
        raise ValueError("exclusion set does not intersect the grid")
    ref = riemann.eval_riemann_eulerian_fields(pattern, t, x[mask], config.params)
    sub = bgk.KineticField(t=t, grid=field.grid, vgrid=field.vgrid,
                           g=field.g[mask], h=field.h[mask])
    dist = bgk.weighted_distance_fields(sub, ref, m_star, config.params.R)
    return float(np.max(dist))


# ---------------------------------------------------------------------------
# Ansatz bound ledger


def check_ansatz_bound(config: ExperimentConfig, eps: float, t_samples,
                       pattern=None, contact=None) -> list[dict]:
    """Per-time ledger comparing sup |ansatz - Riemann| outside the
    contact core |x| <= sqrt(eps*(1+t))*ln(1/eps) against the envelope

        (1/t)*(sigma*ln(1+t+t0) + sigma*|ln sigma| + t0)
        + delta_cd * exp(-c * core^2 / (eps*(1+t))),

    with c fitted from the contact table's Gaussian tail.  The fitted
    prefactor C is lhs/envelope; a stable C across (t, eps) validates the
    bound shape.
    """
    pattern = pattern if pattern is not None else pattern_for(config)
    cfg = profile_config_for(config, eps, pattern, contact)
    sigma, t0 = cfg.sigma, cfg.t0
    delta = cfg.contact.delta_cd
    if delta > 0.0:
        eta = np.linspace(2.0, 8.0, 200)
        th, _ = cfg.contact.eval(eta)
        c_fit, _ = profiles.fit_gaussian_decay(eta, th, cfg.contact.theta_right)
    else:
        c_fit = 1.0
    rows = []
    for t in t_samples:
        if not t > 0.0:
            raise ValueError(f"bound check needs t > 0, got {t}")
        core = math.sqrt(eps * (1.0 + t)) * math.log(1.0 / eps)
        lo = pattern.fan1[0] * (t + t0) - 12.0 * sigma
        hi = pattern.fan3[1] * (t + t0) + 12.0 * sigma
        x = np.arange(lo, hi, sigma / 16.0)
        x = x[np.abs(x) > core]
        va, ua, ta = profiles.superpose_fields(t, x, cfg, config.params)
        vr, ur, tr = riemann.eval_riemann_fields(pattern, t, x, config.params)
        gap = np.maximum(np.abs(va - vr), np.maximum(np.abs(ua - ur), np.abs(ta - tr)))
        lhs = float(np.max(gap))
        shape = (sigma * math.log(1.0 + t + t0) + sigma * abs(math.log(sigma)) + t0) / t
        tail = delta * math.exp(-c_fit * core**2 / (eps * (1.0 + t)))
        envelope = shape + tail
        rows.append({
            "t": t,
            "eps": eps,
            "sup_gap": lhs,
            "envelope": envelope,
            "c": c_fit,
            "C": lhs / envelope,
        })
    return rows


# ---------------------------------------------------------------------------
# Sweeps and the convergence report


@dataclass
class ConvergenceReport:
    """Per-epsilon sweep results plus the fitted convergence law."""

    model: str
    h: float
    alpha: float
    eps: list
    errors: list          # per eps: list of {"t": ..., "sup_error": ...}
    status: list          # per eps: "ok" or "failed: ..."
    meta: list            # per eps: {"n": ..., "dx": ...}
    fitted_rate: float | None
    fitted_constant: float | None
    fit_residual: float | None
    fit_note: str
    bound_checks: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "h": self.h,
            "alpha": self.alpha,
            "eps": list(self.eps),
            "errors": self.errors,
            "status": self.status,
            "meta": self.meta,
            "fitted_rate": self.fitted_rate,
            "fitted_constant": self.fitted_constant,
            "fit_residual": self.fit_residual,
            "fit_note": self.fit_note,
            "bound_checks": self.bound_checks,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceReport":
        return cls(**d)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path):
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ConvergenceReport":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _sweep_entry(config: ExperimentConfig, eps: float, pattern, vgrid, m_star, contact):
    try:
        if config.model == profiles.NAVIER_STOKES:
            snaps, *_ = run_ns_entry(config, eps, pattern, contact)
            errs = [
                {"t": s.t, "sup_error": ns.sup_error_on_sigma(
                    s, pattern, config.h, config.alpha, eps, config.params)}
                for s in snaps if s.t >= config.h
            ]
            meta = {"n": snaps[0].grid.n, "dx": snaps[0].grid.dx}
        else:
            snaps, _, _, grid, _ = run_bgk_entry(config, eps, pattern, vgrid, contact)
            errs = [
                {"t": s.t, "sup_error": kinetic_sup_distance(s, pattern, config, eps, m_star)}
                for s in snaps if s.t >= config.h
            ]
            meta = {"n": grid.n, "dx": grid.dx}
        return "ok", errs, meta, snaps
    except SolverAbort as exc:
        return f"failed: {exc}", [], {}, []


def sweep(config: ExperimentConfig, keep_snapshots=False):
    """Run the configured model over the epsilon ladder and fit the
    convergence law on the per-epsilon sup errors (the max over recorded
    times past the t >= h cut).  Failed runs are excluded from the fit,
    which requires at least 3 surviving points.

    Returns the report, or (report, snapshots-by-eps) if keep_snapshots.
    """
    pattern = pattern_for(config)
    contact = profile_config_for(config, config.eps_list[0], pattern).contact
    vgrid = None
    m_star = None
    if config.model == profiles.KINETIC:
        vgrid = velocity_grid_for(config, pattern)
        m_star = global_maxwellian_for(pattern)
    with ThreadPoolExecutor(max_workers=min(len(config.eps_list), 2)) as pool:
        futures = [
            pool.submit(_sweep_entry, config, eps, pattern, vgrid, m_star, contact)
            for eps in config.eps_list
        ]
        outcomes = [f.result() for f in futures]

    status = [o[0] for o in outcomes]
    errors = [o[1] for o in outcomes]
    meta = [o[2] for o in outcomes]
    snapshots = {eps: o[3] for eps, o in zip(config.eps_list, outcomes)}

    surviving = [
        (eps, max(e["sup_error"] for e in errs))
        for eps, st, errs in zip(config.eps_list, status, errors)
        if st == "ok" and errs
    ]
    fitted_rate = fitted_constant = fit_residual = None
    if surviving and all(err < FIT_FLOOR for _, err in surviving):
        fit_note = "below noise floor"
    elif len(surviving) < 3:
        fit_note = f"fit requires >= 3 surviving points, have {len(surviving)}"
    else:
        fitted_rate, fitted_constant, fit_residual = fit_rate(
            [e for e, _ in surviving], [r for _, r in surviving]
        )
        fit_note = "ok"

    bound_checks = []
    for eps in config.eps_list:
        ts = [t for t in config.times_to_record() if t > 0.0]
        bound_checks.extend(check_ansatz_bound(config, eps, ts, pattern, contact))

    report = ConvergenceReport(
        model=config.model,
        h=config.h,
        alpha=config.alpha,
        eps=list(config.eps_list),
        errors=errors,
        status=status,
        meta=meta,
        fitted_rate=fitted_rate,
        fitted_constant=fitted_constant,
        fit_residual=fit_residual,
        fit_note=fit_note,
        bound_checks=bound_checks,
    )
    if keep_snapshots:
        return report, snapshots
    return report


# ---------------------------------------------------------------------------
# Delimited output


def _fmt(x) -> str:
    return repr(float(x))


def write_profile_csv(path, t, x, v, u, theta):
    lines = ["t,x,v,u,theta"]
    for xi, vi, ui, ti in zip(x, v, u, theta):
        lines.append(",".join((_fmt(t), _fmt(xi), _fmt(vi), _fmt(ui), _fmt(ti))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_snapshot_csv(path, state: ns.FieldState):
    write_profile_csv(path, state.t, state.grid.centers(), state.v, state.u, state.theta)


def write_residuals_csv(path, t, x, q1, q2):
    lines = ["t,x,q1,q2"]
    for xi, a, b in zip(x, q1, q2):
        lines.append(",".join((_fmt(t), _fmt(xi), _fmt(a), _fmt(b))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_kinetic_csv(path, field: bgk.KineticField, dist):
    lines = ["t,x,rho,u1,theta,dist_weighted"]
    rho, u, theta = bgk.moments_fields(field)
    for xi, r, ui, ti, di in zip(field.grid.centers(), rho, u, theta, dist):
        lines.append(",".join((_fmt(field.t), _fmt(xi), _fmt(r), _fmt(ui), _fmt(ti), _fmt(di))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def snapshot_name(prefix: str, eps: float, t: float) -> str:
    return f"{prefix}_eps{_fmt(eps)}_t{_fmt(t)}.csv"
