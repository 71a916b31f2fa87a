"""Exception hierarchy.

Every failure mode named by the library has its own class so callers (and the
CLI exit-code mapping) can dispatch on type instead of parsing messages.
"""


class LerchError(Exception):
    """Base class for all library errors."""


class DomainError(LerchError, ValueError):
    """Arguments outside the supported domain."""


class PoleAtOne(DomainError):
    """Evaluation requested at the pole s = 1."""


class PrecisionLoss(LerchError, ArithmeticError):
    """The error estimate could not be pushed below the requested tolerance."""


class EdgeOfDomain(DomainError):
    """A finite-difference stencil in lambda leaves (0, 1]."""


class ZeroOnBoundary(LerchError):
    """A zero sits (numerically) on the integration contour."""

    def __init__(self, message, edge=None, where=None):
        super().__init__(message)
        self.edge = edge
        self.where = where


class NonIntegerWinding(LerchError):
    """The argument-principle integral did not round cleanly to an integer."""


class NoConvergence(LerchError):
    """An iterative root refinement ran out of iterations."""


class Escaped(NoConvergence):
    """A root iteration wandered too far from its seed."""


class SingularJacobian(LerchError):
    """The s-derivative vanished (numerically) along a continuation path."""

    def __init__(self, message, last_lambda=None, partial=None):
        super().__init__(message)
        self.last_lambda = last_lambda
        self.partial = partial


class StepUnderflow(LerchError):
    """Continuation step size dropped below its floor."""

    def __init__(self, message, last_lambda=None, partial=None):
        super().__init__(message)
        self.last_lambda = last_lambda
        self.partial = partial


class EmptyList(LerchError, ValueError):
    pass


class IncompleteBox(LerchError):
    """A mirrored point falls outside the region that was scanned."""
