from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .errors import DomainError


@dataclass(frozen=True)
class Params:
    """The parameter pair (lambda, alpha), both in (0, 1]."""

    lam: float
    alpha: float

    def __post_init__(self):
        for name, v in (("lambda", self.lam), ("alpha", self.alpha)):
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise DomainError(f"{name} must be a finite real, got {v!r}")
            if not 0.0 < v <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {v!r}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def equal(cls, lam: float) -> "Params":
        return cls(lam, lam)

    @property
    def equal_params(self) -> bool:
        return self.lam == self.alpha


class Method(str, enum.Enum):
    DIRECT_SERIES = "DirectSeries"
    EULER_MACLAURIN = "EulerMaclaurin"
    RATIONAL_HURWITZ = "RationalHurwitz"
    FUNCTIONAL_EQUATION = "FunctionalEquation"
    CAUCHY = "Cauchy"
    FINITE_DIFFERENCE = "FiniteDifference"


@dataclass(frozen=True)
class PrecisionPolicy:
    """Accuracy knobs shared by every evaluator.

    ``em_terms_factor`` is the ``c`` in N = max(64, ceil(c (|t| + 10))).
    ``em_order`` caps the number of Bernoulli corrections; the sum stops early
    once corrections fall below rounding level.
    """

    target_tol: float = 1e-10
    series_margin: float = 0.5
    em_terms_factor: float = 2.0
    em_min_terms: int = 64
    em_order: int = 40
    max_escalations: int = 4
    cauchy_radius: float = 0.05
    cauchy_nodes: int = 32
    lambda_fd_step: float = 1e-6
    direct_max_terms: int = 1 << 16
    laguerre_nodes: int = 64

    def __post_init__(self):
        from .special import MAX_BERNOULLI_ORDER

        positives = ("target_tol", "em_terms_factor", "cauchy_radius", "lambda_fd_step")
        for name in positives:
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("em_min_terms", "em_order", "cauchy_nodes", "direct_max_terms",
                     "laguerre_nodes"):
            if int(getattr(self, name)) < 1:
                raise DomainError(f"{name} must be a positive integer")
        if self.em_order > MAX_BERNOULLI_ORDER:
            raise DomainError(f"em_order must be <= {MAX_BERNOULLI_ORDER}")
        if self.cauchy_nodes % 2:
            raise DomainError("cauchy_nodes must be even (the half rule is the error check)")
        if self.max_escalations < 0:
            raise DomainError("max_escalations must be >= 0")

    def em_terms(self, t: float) -> int:
        return max(self.em_min_terms, math.ceil(self.em_terms_factor * (abs(t) + 10.0)))

    def with_tol(self, tol: float) -> "PrecisionPolicy":
        return replace(self, target_tol=tol)


DEFAULT_POLICY = PrecisionPolicy()


@dataclass(frozen=True)
class EvalResult:
    value: complex
    err_estimate: float
    method: Method
    meta: dict = field(default_factory=dict, compare=False)

    def __complex__(self):
        return complex(self.value)
