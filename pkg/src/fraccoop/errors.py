"""Exception types raised across the package."""

from __future__ import annotations


class FraccoopError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(FraccoopError, ValueError):
    pass


class GridError(FraccoopError, ValueError):
    """Sampled data is not on a uniform grid starting at zero."""


class DimensionMismatchError(FraccoopError, ValueError):
    pass


class DegenerateFieldError(FraccoopError):
    """The field vanishes at every probe point, so no degree can be estimated."""


class FieldEvaluationError(FraccoopError):
    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class BlowUpError(FraccoopError):
    """Integration produced a non-finite or runaway state.

    ``last_valid`` is the index of the last accepted grid point and
    ``trajectory`` holds the states computed up to that index.
    """

    def __init__(self, message: str, last_valid: int, trajectory=None):
        super().__init__(message)
        self.last_valid = last_valid
        self.trajectory = trajectory


class InfeasibleError(FraccoopError):
    """No decay rate satisfies the envelope condition."""


class HypothesisViolationError(FraccoopError):
    pass


class ConvergenceError(FraccoopError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DomainViolationError(FraccoopError):
    pass


class FieldParseError(FraccoopError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message
