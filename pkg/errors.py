"""
Exception hierarchy for RBN Lab.
"""


class RBNLabError(Exception):
    """Base class for all library errors."""


class StateValidationError(RBNLabError, ValueError):
    """A matrix is not a valid density matrix (Hermitian, unit trace, positive)."""


class StateParseError(RBNLabError, ValueError):
    """A state file could not be read or decoded."""


class ParameterRangeError(RBNLabError, ValueError):
    """A physical parameter lies outside its admissible range."""


class DimensionMismatchError(RBNLabError, ValueError):
    """Operand dimensions do not match the selected subsystem."""


class NonHermitianError(RBNLabError, ValueError):
    """Eigensolver input is not Hermitian within tolerance."""


class NotMutuallyUnbiasedError(RBNLabError, ValueError):
    """Two bases were required to be mutually unbiased but are not."""
