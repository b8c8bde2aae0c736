"""Exception types raised across the package."""


class BBARMAError(Exception):
    """Base class for all package errors."""


class DomainError(BBARMAError, ValueError):
    """An argument lies outside the domain of a function."""


class NumericError(BBARMAError, ArithmeticError):
    """A recursion produced a non-finite value.

    Parameters
    ----------
    message : str
    index : int, optional
        Zero-based time index where the blowup was detected.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InitializationError(BBARMAError):
    """Least-squares starting values could not be computed."""


class FitError(BBARMAError):
    """Estimation failed or its result cannot support the requested inference."""


class DetectionError(BBARMAError):
    """A detector could not produce a decision."""


class DiagnosticError(BBARMAError, ValueError):
    """A residual diagnostic is undefined for the given input."""


class IngestionError(BBARMAError, ValueError):
    """Input data file is malformed.

    Parameters
    ----------
    message : str
    row : int, optional
        One-based line of the file (the header is line 1) that triggered the error.
    """

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
