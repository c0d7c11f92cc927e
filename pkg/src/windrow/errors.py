"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the validity region of the model."""


class ConvergenceError(RuntimeError):
    """A root-finding or iterative procedure failed to converge."""


class InfeasibleMarginError(DomainError):
    """The requested de-loading margin cannot be met within the operating limits."""


class DegenerateWakeError(DomainError):
    """The wake recursion produced a non-physical (non-positive) wind speed."""


class InfeasibleProblemError(RuntimeError):
    """No feasible operating schedule exists for the given farm problem."""


class SimulationError(RuntimeError):
    """Time-domain integration aborted (instability, NaN, or a rotor limit)."""


class ConfigError(ValueError):
    """A study configuration failed schema validation."""
