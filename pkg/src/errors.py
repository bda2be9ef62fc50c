"""
Exception hierarchy shared by every package.
"""


class MsqError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(MsqError, ValueError):
    """A precondition of an operation was violated."""


class DimensionError(ContractError):
    """Operand shapes are incompatible."""

    def __init__(self, message: str, *shapes):
        if shapes:
            message = f"{message}: " + " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(message)
        self.shapes = shapes


class ShortSequenceError(ContractError):
    """A sequence is shorter than the mask it should receive."""


class ConfigError(ContractError):
    """Invalid configuration file or configuration object."""


class DataError(MsqError, ValueError):
    """Problem with input data on disk or in memory."""


class IngestionError(DataError):
    """A dataset record could not be ingested."""


class FormatError(DataError):
    """A binary file does not match the expected layout."""

    def __init__(self, message: str, expected=None, found=None):
        if expected is not None or found is not None:
            message = f"{message} (expected {expected!r}, found {found!r})"
        super().__init__(message)
        self.expected = expected
        self.found = found


class NumericError(MsqError, ArithmeticError):
    """A value that must be finite was not, or a numeric check failed."""
