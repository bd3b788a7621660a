"""Exception types shared across the package."""


class RadialMPError(Exception):
    """Base class for all package-specific errors."""


class DomainError(RadialMPError, ValueError):
    """Evaluation outside a potential's domain (r <= 0, table hull, ...)."""


class ExtrapolationRefused(DomainError):
    """Tabulated potential queried outside its sample hull."""


class FitFailedError(RadialMPError):
    """Log-log regression residual above tolerance (non power-like tail)."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ParameterError(RadialMPError, ValueError):
    """Arguments violate a documented precondition."""


class GridMismatchError(RadialMPError):
    """Operands live on different grids."""


class SingularOperatorError(RadialMPError):
    """The discrete energy operator is not invertible."""


class NoScaleError(RadialMPError):
    """Ray scaling undefined: positive part of u is trivial where K > 0."""


class EscapeFailedError(RadialMPError):
    """No negative-energy scaling found along the escape ray."""
