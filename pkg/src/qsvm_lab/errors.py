"""Exception hierarchy.

Every error raised by the library derives from :class:`QsvmLabError`.  The
three intermediate bases (:class:`ConfigError`, :class:`DataError`,
:class:`NumericalError`) decide the CLI exit code.
"""


class QsvmLabError(Exception):
    """Base class for all library errors."""


class ConfigError(QsvmLabError, ValueError):
    """Invalid experiment or circuit configuration."""


class DataError(QsvmLabError):
    """Unreadable, malformed or inconsistent input data."""


class NumericalError(QsvmLabError, ArithmeticError):
    """A numerical precondition failed (singular system, starved post-selection)."""


class CapacityError(ConfigError):
    """Register size outside the supported range."""


class ShapeError(ConfigError):
    """Mismatched lengths, qubit counts or register layouts."""


class QubitIndexError(ConfigError, IndexError):
    """Gate references a qubit outside the register, or repeats one."""


class PatternParseError(ConfigError):
    """Malformed measurement outcome pattern."""


class PreconditionError(ConfigError):
    """Input violates a documented precondition (e.g. not unit norm)."""


class DegenerateVectorError(PreconditionError):
    """All-zero vector where a direction is required."""


class InvalidRotationError(ConfigError):
    """HHL rotation constant exceeds the smallest eigenvalue."""


class ParseError(DataError):
    """A data row could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(DataError):
    """Wrong number of columns or an unexpected label value."""


class DegenerateSplitError(DataError):
    """A class needed by a pre-processing step is absent."""


class SingularityError(NumericalError):
    """The F matrix is not invertible."""


class StarvedPostSelectionError(NumericalError):
    """Post-selection success probability too small to condition on."""
