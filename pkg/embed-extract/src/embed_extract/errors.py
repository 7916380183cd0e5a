"""Error taxonomy for the extraction pipeline.

Everything raised on purpose derives from ExtractError so callers (and the
CLI) can separate data problems from programming errors.
"""


class ExtractError(Exception):
    """Base class for all extraction failures."""


class ConfigError(ExtractError):
    """Invalid extraction configuration (unknown mode, empty encoder id)."""


class EncoderUnavailableError(ExtractError):
    """The encoder runtime or the named encoder cannot be loaded."""


class EmptyInputError(ExtractError):
    """The input file contains nothing to encode."""


class IoError(ExtractError):
    """File could not be read or written."""
