"""Exception types shared across the package."""


class CalibLabError(Exception):
    """Base class for all caliblab errors."""


class EmptyInputError(CalibLabError, ValueError):
    """An operation that needs at least one record received none."""


class NotApplicableError(CalibLabError):
    """A gated check was asked about a point outside its precondition.

    Distinct from returning False: the question itself does not apply.
    """


class NotFittedError(CalibLabError, AttributeError):
    """Estimator method called before fit()."""


class DivergenceError(CalibLabError, RuntimeError):
    """Training produced a non-finite loss or gradient."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class LogParseError(CalibLabError, ValueError):
    """A prediction-log line could not be parsed."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class LogValidationError(CalibLabError, ValueError):
    """A parsed log line carried values outside the allowed ranges."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DegenerateBinsWarning(UserWarning):
    """Equal-mass binning collapsed duplicate edges into fewer bins."""
