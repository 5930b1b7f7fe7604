"""Exception hierarchy shared by all rabi2 modules."""

from __future__ import annotations


class Rabi2Error(Exception):
    """Base class for errors raised by rabi2."""


class UsageError(Rabi2Error, ValueError):
    """Bad arguments: wrong order, malformed strings, mismatched inputs."""


class RingMismatchError(UsageError, TypeError):
    """Operands live in different coefficient rings."""


class SingularRecurrenceError(Rabi2Error, ZeroDivisionError):
    """The series recurrence divides by 2g(n+1)(n+2) and g is zero."""


class SpectralCollapseError(Rabi2Error, ValueError):
    """Coupling at or beyond the two-photon collapse point |4g| >= omega."""


class SolverError(Rabi2Error, ArithmeticError):
    """The iterative stage of the eigensolver did not converge."""

    def __init__(self, message: str, iterations: int | None = None):
        if iterations is not None:
            message = f"{message} (after {iterations} iterations)"
        super().__init__(message)
        self.iterations = iterations
