"""Exception hierarchy shared by all modules."""


class JLError(Exception):
    """Base class for errors raised by jlparadox."""


class InvalidInputError(JLError, ValueError):
    """An argument is outside the domain of the operation."""


class DegenerateInputError(InvalidInputError):
    """The inputs make the question ill-posed (e.g. identical hypotheses)."""


class NumericalError(JLError, ArithmeticError):
    """Quadrature or optimization failed to converge.

    ``diagnostics`` carries whatever the underlying routine reported.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UnsupportedRegimeError(JLError):
    """The requested approximation is not valid for the flagged regime."""


class ConfigError(JLError, ValueError):
    """A bump-hunt configuration is malformed. ``path`` names the field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class GeometryError(InvalidInputError):
    """A signal window or sideband falls off the histogram."""


class ConsistencyError(JLError):
    """Results violate an ordering that must hold up to MC noise."""


class CalibrationError(JLError):
    """Upcrossing calibration saw no upcrossings at the reference level."""
