"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConvergenceError(ArithmeticError):
    """A series, root search or iterative solve failed to converge."""


class CertificationError(ArithmeticError):
    """Interval arithmetic could not decide the rank of a system.

    Raised when no exact algebraic fallback is available for the angle in
    question. The caller may retry with float arithmetic, which gives a
    numerical answer without a certificate.
    """


class ResolutionError(ValueError):
    """A grid is too coarse for the requested wavenumber and contrast."""


class SolverError(RuntimeError):
    """The volume integral solver did not reach its residual target."""


class ResolutionWarning(UserWarning):
    """Grid resolution is marginal but was allowed to proceed."""


class GeometryWarning(UserWarning):
    """The requested geometry is degenerate or needs care."""
