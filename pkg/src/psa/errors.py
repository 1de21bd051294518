"""Exception hierarchy.

Every error the library raises on purpose derives from :class:`PsaError`, so
callers (the CLI in particular) can separate bad input from programming bugs.
"""


class PsaError(Exception):
    """Base class for all library errors."""


class DataError(PsaError, ValueError):
    """Input data violates a precondition (shape, finiteness, parsing)."""


class ConvergenceError(PsaError, ArithmeticError):
    """An iterative routine hit its iteration cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularModelError(PsaError, ValueError):
    """A block of eigenvalues averages to zero, so the density is degenerate."""


class UndefinedThresholdError(PsaError, ValueError):
    """A criterion has no defined eigengap threshold for this (n, p)."""


class SelectionError(PsaError, ValueError):
    """A selection strategy cannot run with the requested options."""
