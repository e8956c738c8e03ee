"""Exception hierarchy shared across the package.

Exit-code mapping used by the command line driver:
validation problems -> 1, numerical failures (CFL, monotonicity floor,
bookkeeping) -> 2, I/O problems -> 3.
"""


class CPrandtlError(Exception):
    """Base class for all package errors."""


class ValidationError(CPrandtlError):
    """Bad input data or configuration."""


class NumericalError(CPrandtlError):
    """A solver left its admissible regime."""


class CflError(NumericalError):
    """Explicit step size violates the advective CFL bound."""

    def __init__(self, dt, dt_max, message=None):
        self.dt = dt
        self.dt_max = dt_max
        super().__init__(
            message
            or f"explicit CFL violation: dt={dt:.3e} exceeds stable dt={dt_max:.3e}"
        )


class MonotonicityError(NumericalError):
    """Background shear dropped below the positive floor required by the
    Crocco-type transform."""


class BookkeepingError(NumericalError):
    """The iteration's telescoping source identity failed, which indicates
    an internal bug rather than a modelling problem."""


class DivergenceError(NumericalError):
    """Iteration residual grew for several consecutive steps."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DecayFloorWarning(UserWarning):
    """A tail integral was requested for data that has not decayed at the
    grid's truncation height."""
