"""Exception taxonomy shared by the library and the CLI.

The CLI maps these onto exit codes: ConfigError -> 1 (usage),
DataError and subclasses -> 2, NumericError -> 3.
"""


class SentselError(Exception):
    """Base class for everything this package raises deliberately."""


class ConfigError(SentselError):
    """Invalid configuration, flag, or parameter value."""


class DataError(SentselError):
    """Input data that cannot be used as requested."""


class ParseError(DataError):
    """Malformed input stream. Carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class SchemaError(DataError):
    """Structurally valid input missing a required element. Carries the JSON path."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.path = path


class FormatError(DataError):
    """Line-oriented file that violates its format. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class NumericError(SentselError):
    """Non-finite values or a numerical routine that failed to converge."""
