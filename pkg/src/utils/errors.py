"""Exception hierarchy shared by the algebra, determinantal and groebner packages."""
from typing import Any, Optional


class DeterminantalF5Error(Exception):
    """Base class for every error raised by this package."""


class DivisionByZeroError(DeterminantalF5Error, ArithmeticError):
    """Inversion of zero in GF(p)."""


class DimensionError(DeterminantalF5Error, ValueError):
    """Operands live in different rings or modules (variable count, rank, field)."""


class HomogeneityError(DeterminantalF5Error, ValueError):
    """Arithmetic would produce an inhomogeneous polynomial where one is required."""


class EmptySupportError(DeterminantalF5Error, ValueError):
    """A leading term was requested from the zero element."""


class ContractViolationError(DeterminantalF5Error):
    """An internal precondition was broken (row order, degree order, ...)."""


class WrongCorankError(DeterminantalF5Error, ValueError):
    """A corank-one construction was asked for a system with r != n - 2."""


class NonGenericInstanceError(DeterminantalF5Error):
    """An instance behaved non-generically (degenerate rank or unexpected zero reduction)."""

    def __init__(self, message: str, signature: Optional[Any] = None, seed: Optional[int] = None):
        super().__init__(message)
        self.signature = signature
        self.seed = seed


class OracleTooLargeError(DeterminantalF5Error):
    """The brute-force oracle exceeded its configured resource cap."""


class DegreeCapError(DeterminantalF5Error):
    """A degree-bounded linear solve was asked beyond its degree cap."""


class InstanceFormatError(DeterminantalF5Error, ValueError):
    """An instance file is malformed."""
