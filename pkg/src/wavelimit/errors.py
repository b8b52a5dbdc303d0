"""Exception types shared across the package.

ValueError subclasses signal bad input (rejected before any computation);
RuntimeError subclasses signal a numerical failure during a run.  The CLI
maps the former to exit code 1 and the latter to exit code 2.
"""


class InvalidStateError(ValueError):
    """A thermodynamic input is outside its physical domain (e.g. v <= 0)."""


class ConfigError(ValueError):
    """A configuration file or experiment description is malformed."""


class NotRarefactionPatternError(ValueError):
    """End states do not connect by rarefaction-contact-rarefaction waves."""

    def __init__(self, message, family=None):
        super().__init__(message)
        self.family = family


class SolverAbort(RuntimeError):
    """A time integration failed (positivity loss, dt underflow).

    Carries the failure time and, when applicable, the offending cell index.
    """

    def __init__(self, message, t=None, cell=None):
        super().__init__(message)
        self.t = t
        self.cell = cell


class BracketError(RuntimeError):
    """A root-finding bracket could not be established (internal bug)."""
