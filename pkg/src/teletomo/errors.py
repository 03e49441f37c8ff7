"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the command layer can
translate failures without inspecting messages.
"""


class TeletomoError(Exception):
    exit_code = 1


class InvalidInputError(TeletomoError, ValueError):
    """Malformed arguments, states or configuration (exit 2)."""

    exit_code = 2


class DimensionError(InvalidInputError):
    pass


class NonHermitianError(InvalidInputError):
    pass


class InsufficientDataError(TeletomoError):
    """A required data cell is missing or empty (exit 3)."""

    exit_code = 3


class NumericalError(TeletomoError, ArithmeticError):
    exit_code = 4


class SingularSystemError(NumericalError):
    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class ImprobableOutcomeError(NumericalError):
    """Conditioning on an outcome whose probability is numerically zero."""


class DegenerateDataError(NumericalError):
    """No positive spectral weight left to build a physical state from."""
