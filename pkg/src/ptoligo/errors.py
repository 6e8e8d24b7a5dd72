"""Exception types shared across the package."""

from __future__ import annotations


class PtoligoError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(PtoligoError, ValueError):
    """Malformed or dimensionally inconsistent input."""


class InvalidRegimeError(PtoligoError, ValueError):
    """Parameters outside the regime where an operation is defined."""


class NoConvergenceError(PtoligoError, RuntimeError):
    """Iterative refinement failed to reach the requested residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class SingularJacobianError(PtoligoError, RuntimeError):
    """Newton correction hit a numerically singular Jacobian."""

    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class EmptyBranchError(PtoligoError, RuntimeError):
    """A requested branch has no points inside the swept interval."""


class StepUnderflowError(PtoligoError, RuntimeError):
    """Adaptive integrator step shrank below the hard floor."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class NumericalFailureError(PtoligoError, RuntimeError):
    """A residual certificate failed; the result cannot be trusted."""


class SchemaError(PtoligoError, ValueError):
    """A config or data file violates the expected schema."""
