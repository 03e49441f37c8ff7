"""Teleportation-based quantum state tomography.

Simulates Bell-measurement teleportation of known single-qubit inputs through
an unknown shared n-qubit state and inverts the resulting data on Bob's qubit
to recover that state.
"""

from .errors import (
    DegenerateDataError,
    DimensionError,
    ImprobableOutcomeError,
    InsufficientDataError,
    InvalidInputError,
    NonHermitianError,
    NumericalError,
    SingularSystemError,
    TeletomoError,
)
from .qstate import (
    BellOutcome,
    DensityMatrix,
    InputState,
    bell_projector,
    frobenius_distance,
    random_density,
    standard_inputs,
    trace_distance,
)

__version__ = "0.1.0"

__all__ = [
    "BellOutcome",
    "DegenerateDataError",
    "DensityMatrix",
    "DimensionError",
    "ImprobableOutcomeError",
    "InputState",
    "InsufficientDataError",
    "InvalidInputError",
    "NonHermitianError",
    "NumericalError",
    "SingularSystemError",
    "TeletomoError",
    "bell_projector",
    "frobenius_distance",
    "random_density",
    "standard_inputs",
    "trace_distance",
]
