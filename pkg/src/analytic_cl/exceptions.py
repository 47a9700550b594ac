"""Exception hierarchy shared by all modules."""


class AnalyticCLError(Exception):
    """Base class for all library errors."""


class ShapeError(AnalyticCLError, ValueError):
    """Operands have incompatible or invalid dimensions."""


class ParameterError(AnalyticCLError, ValueError):
    """A configuration value is out of its admissible range."""


class StateError(AnalyticCLError, RuntimeError):
    """An operation was called on an object in the wrong state."""


class SingularMatrixError(AnalyticCLError, ArithmeticError):
    """A symmetric factorization hit a non-positive pivot.

    ``pivot`` is the 1-based index of the leading minor that failed,
    as reported by the factorization routine.
    """

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class FileFormatError(AnalyticCLError):
    """Base class for binary file parse failures."""


class MagicError(FileFormatError):
    """Unexpected magic bytes."""


class VersionError(FileFormatError):
    """Unsupported format version."""


class TruncationError(FileFormatError):
    """File ended before the declared payload was complete."""


class DimensionError(FileFormatError):
    """Declared dimensions are inconsistent with the payload."""


class CorruptionError(FileFormatError):
    """Checksum mismatch."""
