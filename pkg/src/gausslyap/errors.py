"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class EllipticPoleError(DomainError):
    """Third-kind elliptic integral evaluated at or beyond its characteristic pole."""


class InvalidSpectrumError(ValueError):
    """Covariance spectrum fails validation (wrong sign, NaN, wrong dimension...)."""


class DegenerateSpectrumError(ValueError):
    """Residue-type closed form requested for (nearly) coincident eigenvalues.

    Raised instead of silently switching methods; the quadrature path accepts
    repeated eigenvalues and remains available to the caller.
    """


class ConvergenceError(RuntimeError):
    """Adaptive quadrature hit its subdivision limit before reaching tolerance.

    Attributes:
        value: best available estimate of the integral / exponent.
        error_estimate: the achieved (not requested) error bound.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class RankCollapseError(RuntimeError):
    """A simulated frame lost rank (a QR scale factor underflowed)."""
