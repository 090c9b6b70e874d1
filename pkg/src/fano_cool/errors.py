"""Exception hierarchy shared by every fano_cool module."""

from __future__ import annotations


class FanoCoolError(Exception):
    """Base class for all package errors."""


class ConfigError(FanoCoolError, ValueError):
    """Malformed configuration document or override."""


class SpecError(ConfigError):
    """Invalid sweep specification."""


class InvalidParameter(FanoCoolError, ValueError):
    def __init__(self, name: str, value, constraint: str):
        self.name = name
        self.value = value
        self.constraint = constraint
        super().__init__(f"{name}={value!r} violates {constraint}")


class ValidationError(FanoCoolError, ValueError):
    """Aggregate of every violated parameter invariant."""

    def __init__(self, errors: list[InvalidParameter]):
        self.errors = list(errors)
        lines = "; ".join(str(e) for e in self.errors)
        super().__init__(f"{len(self.errors)} invalid parameter(s): {lines}")


class SolverError(FanoCoolError):
    """Numerical failure; ``context`` carries the parameter point when known."""

    def __init__(self, message: str = "", context: dict | None = None):
        self.context = dict(context or {})
        super().__init__(message)

    def __str__(self) -> str:
        base = super().__str__()
        if self.context:
            return f"{base} [context: {self.context}]"
        return base


class UnstableDrift(SolverError):
    pass


class IllConditioned(SolverError):
    def __init__(self, message: str, V=None, residual: float = float("nan"), context=None):
        super().__init__(message, context)
        self.V = V
        self.residual = residual


class StepTooLarge(SolverError):
    pass


class ConvergenceFailure(SolverError):
    pass


class SingularSteadyState(SolverError):
    pass


class NegativeDiffusion(SolverError):
    pass


class AllUnstable(FanoCoolError):
    """Every cell of a sweep was unstable or failed."""
