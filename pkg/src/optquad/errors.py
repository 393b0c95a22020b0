"""Exception types raised by optquad."""


class DomainError(ValueError):
    """Argument outside the domain on which a formula is evaluated."""


class ConstraintError(ValueError):
    """Quadrature weights violate the exactness constraints.

    ``residuals`` maps the constraint name to its measured residual.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class SingularSystemError(ArithmeticError):
    """Elimination hit a pivot below the singularity threshold."""


class InsufficientDataError(ValueError):
    """Too few usable rows to fit a convergence order."""
