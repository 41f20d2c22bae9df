"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`OscRHPError`
so callers (and the CLI) can map failures to exit codes without catching
unrelated bugs.
"""


class OscRHPError(Exception):
    """Base class for all package errors."""


class ParameterError(OscRHPError, ValueError):
    """Invalid or mutually inconsistent parameters (mismatched beta, tol <= trunc_tol, ...)."""


class DomainError(OscRHPError, ValueError):
    """An operation was called outside of its domain (e.g. off-axis Cauchy on the axis)."""


class PoleError(DomainError):
    """Pointwise evaluation exactly at a pole of the basis."""


class NonDecayingInputError(OscRHPError, ValueError):
    """The function handed to an expansion does not vanish at infinity."""


class ConvergenceError(OscRHPError, ArithmeticError):
    """An iterative or adaptive-precision computation did not converge."""


class ReflectionBoundError(OscRHPError, ValueError):
    """The reflection coefficient violates sup|rho| < 1 on the test grid."""


class FactorizationError(OscRHPError, ArithmeticError):
    """A jump matrix could not be inverted or factored on the grid."""


class FileFormatError(OscRHPError, ValueError):
    """A coefficient, jump or solution file is malformed."""
