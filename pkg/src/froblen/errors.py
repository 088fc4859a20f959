"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: usage errors exit 1,
precondition violations exit 2, resource-cap violations exit 3, and
table mismatches exit 4.
"""


class FroblenError(Exception):
    """Base class for all package-specific errors."""


class PreconditionError(FroblenError, ValueError):
    """A documented mathematical precondition was violated."""


class UnsupportedDomainError(PreconditionError):
    """The operation is not defined over the coefficient domain supplied."""


class ResourceLimitError(FroblenError, RuntimeError):
    """A configured desk-scale cap (dimension, iteration, exponent) was exceeded."""


class PolyParseError(FroblenError, ValueError):
    """A polynomial string could not be parsed."""
