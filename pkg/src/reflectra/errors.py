"""Exception hierarchy used across the package."""


class ReflectraError(Exception):
    """Base class for all package errors."""


class DomainError(ReflectraError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ConfigurationError(ReflectraError, ValueError):
    """Grids, tolerances or family parameters are inconsistent."""


class AccuracyError(ReflectraError, ArithmeticError):
    """A requested tolerance could not be reached.

    Carries the error actually achieved in ``achieved``.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ParityError(ReflectraError, ValueError):
    """An operator was applied to input of the wrong parity."""


class SupportError(ReflectraError, ValueError):
    """Input is not compactly supported inside the grid (tail too large)."""


class TruncationError(ReflectraError, ArithmeticError):
    """A truncated integral cannot meet the requested tolerance."""


class UnsupportedFamilyError(ReflectraError, ValueError):
    """The operation is only implemented for a subset of weight families."""


class ConsistencyError(ReflectraError, ArithmeticError):
    """An internal cross-check failed, indicating a numerical defect."""
