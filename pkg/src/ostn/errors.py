"""Exception hierarchy shared across the package."""

from __future__ import annotations


class OSTNError(Exception):
    """Base class for all package errors."""


class DomainError(OSTNError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConfigurationError(OSTNError, ValueError):
    """A scenario or evaluator configuration is invalid or unsupported."""


class NumericError(OSTNError, ArithmeticError):
    """A numerical procedure failed to reach its accuracy target.

    ``estimate`` holds the best value obtained and ``error`` the achieved
    error estimate, when available.
    """

    def __init__(self, message: str, estimate: float | None = None,
                 error: float | None = None, term: str | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.term = term
