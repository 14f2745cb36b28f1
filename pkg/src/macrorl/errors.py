"""Exception hierarchy shared across the package.

Two broad families matter to callers: data problems (bad input files,
not enough usable observations) and numeric problems (singular designs,
diverging training runs). The CLI maps them to distinct exit codes.
"""


class MacroRlError(Exception):
    """Base class for all package-specific errors."""


class DataError(MacroRlError):
    """Input data is malformed, inconsistent, or insufficient."""


class FredParseError(DataError):
    """A FRED-format CSV could not be parsed.

    Carries the 1-based line number of the offending row when known.
    """

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DomainError(DataError):
    """A value is outside the mathematical domain of an operation."""


class InsufficientDataError(DataError):
    """Fewer usable observations than an operation requires."""


class MissingColumnError(DataError):
    """A required series/column is absent from the input frame."""


class ModelFileError(DataError):
    """A saved model or agent file is malformed or has a bad version."""


class NumericError(MacroRlError):
    """A numeric computation failed or produced non-finite values."""


class SingularDesignError(NumericError):
    """Regressor matrix is rank deficient."""


class DivergenceError(NumericError):
    """Training or simulation produced non-finite values."""
