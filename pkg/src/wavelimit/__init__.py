"""Numerical laboratory for the small-dissipation limit of
rarefaction/contact wave patterns in 1-D gas dynamics, with a BGK
kinetic companion model."""

from .errors import (
    BracketError,
    ConfigError,
    InvalidStateError,
    NotRarefactionPatternError,
    SolverAbort,
)
from .gas import GasParams, ThermoState, kinetic_params
from .riemann import WavePattern, eval_riemann, rarefaction_u, solve_pattern
from .profiles import (
    ContactWaveTable,
    ProfileConfig,
    build_profile_config,
    burgers_exact,
    burgers_smooth,
    contact_profile,
    rarefaction_profile,
    solve_contact_selfsimilar,
    superpose,
)
from .ns import FieldState, Grid, SolverConfig
from .bgk import GlobalMaxwellian, KineticField, VelocityGrid
from .harness import ConvergenceReport, ExperimentConfig, sweep

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "ConfigError",
    "ContactWaveTable",
    "ConvergenceReport",
    "ExperimentConfig",
    "FieldState",
    "GasParams",
    "GlobalMaxwellian",
    "Grid",
    "InvalidStateError",
    "KineticField",
    "NotRarefactionPatternError",
    "ProfileConfig",
    "SolverAbort",
    "SolverConfig",
    "ThermoState",
    "VelocityGrid",
    "WavePattern",
    "build_profile_config",
    "burgers_exact",
    "burgers_smooth",
    "contact_profile",
    "eval_riemann",
    "kinetic_params",
    "rarefaction_profile",
    "solve_contact_selfsimilar",
    "solve_pattern",
    "superpose",
    "sweep",
]
