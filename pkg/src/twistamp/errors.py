"""Exception taxonomy shared across the package.

Validation-type errors mean the input was bad; invariant/precision errors
mean a numerical run broke one of the quantities the math guarantees.
"""


class TwistampError(Exception):
    """Base class for everything raised on purpose by this package."""


class StructuralError(TwistampError):
    """Shape or wiring problem: disconnected graph, non-square matrix, ..."""


class ValidationError(TwistampError):
    """Input values violate a precondition (bad mass, non-conserving momenta)."""


class UnsupportedTopology(ValidationError):
    """Graph does not satisfy N = 2n + 2 (or N = 2n where required)."""


class DegenerateInput(ValidationError):
    """Input is structurally fine but degenerate for the requested operation."""


class InvariantViolation(TwistampError):
    """A runtime check of a mathematically guaranteed property failed."""


class PrecisionError(TwistampError):
    """A numerical result is too noisy to report."""


__all__ = [
    "TwistampError",
    "StructuralError",
    "ValidationError",
    "UnsupportedTopology",
    "DegenerateInput",
    "InvariantViolation",
    "PrecisionError",
]
