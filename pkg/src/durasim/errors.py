"""Exception types shared across the package."""


class DurasimError(Exception):
    """Base class for all package errors."""


class ParameterError(DurasimError, ValueError):
    """A scalar argument or model parameter is outside its domain."""


class ConfigurationError(DurasimError, ValueError):
    """A multi-part specification (weights, grids, config file) is inconsistent."""


class UnsupportedModelError(DurasimError, TypeError):
    """No closed form exists for this combination of component models."""


class InsufficientDataError(DurasimError, ValueError):
    """Too few observations to estimate the requested quantity."""


class NumericError(DurasimError, ArithmeticError):
    """An iterative routine failed to converge within its budget.

    Diagnostic values (achieved error estimate, last iterate, ...) are kept
    in ``details``.
    """

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details
