"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``DataError`` -> 2, ``NumericError`` -> 3.
"""


class CitetreeError(Exception):
    """Base class for all package errors."""


class DataError(CitetreeError, ValueError):
    """Malformed input: schema violations, bad tokens, invalid records."""


class MalformedRecordError(DataError):
    pass


class SchemaError(DataError):
    pass


class ConfigError(DataError):
    pass


class TreeFormatError(DataError):
    pass


class NumericError(CitetreeError, ArithmeticError):
    """A quantity is undefined or degenerate for the given input."""


class UndefinedQuotientError(NumericError, ZeroDivisionError):
    pass


class DegenerateTreeError(NumericError):
    pass


class EmptyNodeError(NumericError):
    pass
