"""Lerch zeta-function evaluation, zero location and zero-trajectory tracing."""

__version__ = "0.1.0"

from .errors import (DomainError, EdgeOfDomain, EmptyList, Escaped, IncompleteBox,
                     LerchError, NoConvergence, NonIntegerWinding, PoleAtOne,
                     PrecisionLoss, SingularJacobian, StepUnderflow, ZeroOnBoundary)
from .evaluate import (dlambda_derivative, ds_derivative, hurwitz_zeta, lerch,
                       lerch_direct, lerch_em, lerch_fe, lerch_rational)
from .kernels import BACKEND
from .types import DEFAULT_POLICY, EvalResult, Method, Params, PrecisionPolicy
