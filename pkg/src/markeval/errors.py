"""Exception taxonomy shared across the package.

Every error the library raises on bad input derives from MarkEvalError, so
callers (including the CLI) can distinguish data problems from genuine bugs
with a single except clause.
"""


class MarkEvalError(Exception):
    """Base class for all errors raised by this package."""


class MinSamplesError(MarkEvalError):
    """A sample set is too small for the requested operation."""


class NonFiniteError(MarkEvalError):
    """Input contains NaN or infinite entries."""


class DimensionMismatchError(MarkEvalError):
    """Vectors or series of incompatible shape were combined."""


class UnknownEstimatorError(MarkEvalError):
    """A metric or estimator name is not one of the supported names."""


class DomainError(MarkEvalError):
    """An argument lies outside the mathematical domain of a function."""


class DegenerateInputError(MarkEvalError):
    """Input carries no usable variation (zero variance, all pairs tied)."""


class NumericalFailureError(MarkEvalError):
    """A numerical routine failed to converge."""


class FormatError(MarkEvalError):
    """A file does not conform to a supported format."""


class RaggedRowsError(FormatError):
    """Rows of a tabular file have inconsistent widths."""


class EmptyFileError(FormatError):
    """A file contains no data rows."""


class IoError(MarkEvalError):
    """Filesystem failure while reading inputs or writing reports."""
