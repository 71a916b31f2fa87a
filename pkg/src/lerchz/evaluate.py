"""Evaluation of the Lerch zeta-function, Hurwitz zeta and their derivatives.

L(lam, alpha, s) = sum_{m>=0} exp(2 pi i lam m) (m + alpha)^(-s), continued to
the whole plane.  Everything funnels into a handful of vectorised batch
routines (``_em_batch``, ``_fe_batch``) so that contour and circle work can
amortise the per-call overhead; the public functions wrap single points in
``EvalResult``.

Method map
----------
* Euler-Maclaurin on f(x) = exp(2 pi i mu x)(x + alpha)^(-s), mu the reduced
  frequency in [-1/2, 1/2].  The tail integral is closed form for mu = 0, a
  rotated-ray Gauss-Laguerre rule when |mu| is large enough, and a lower
  incomplete-gamma series when |mu| is tiny.
* The reflection formula for sigma <= -2, fed by Euler-Maclaurin at 1 - s.
* A d-term Hurwitz combination for lam = alpha = b/d.
* Cauchy circles for s-derivatives, Richardson-extrapolated differences for
  the lam-derivative.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import kernels
from ._kernels_numpy import frac_mul
from .errors import DomainError, EdgeOfDomain, PoleAtOne, PrecisionLoss
from .special import binomial_table, em_coefficients, laguerre_rule, loggamma
from .types import DEFAULT_POLICY, EvalResult, Method, Params, PrecisionPolicy

EPS = np.finfo(float).eps
TWO_PI = 2.0 * math.pi
LOG_TWO_PI = math.log(TWO_PI)
FE_SIGMA = -2.0
HARD_TERM_CAP = 1 << 22
_STOP_REL = 1e-17
# rounding noise cannot be cured by more terms; it only fails a result beyond this factor
ROUND_SLACK = 100.0


def reduced_frequency(lam: float) -> float:
    """mu in [-1/2, 1/2] with exp(2 pi i lam m) = exp(2 pi i mu m) for integer m."""
    lam = float(lam) % 1.0
    return lam if lam <= 0.5 else lam - 1.0


def _as_complex_array(s) -> np.ndarray:
    return np.atleast_1d(np.asarray(s, dtype=complex))


def _check_pole(mu: float, s: np.ndarray):
    if mu == 0.0 and np.any(np.abs(s - 1.0) < 1e-12):
        raise PoleAtOne("s = 1 is a pole when lambda is an integer")


def _tolerance_ok(values, errs, tol):
    return errs <= tol * np.maximum(1.0, np.abs(values))


# ---------------------------------------------------------------------------
# Euler-Maclaurin
# ---------------------------------------------------------------------------

def _series_tail(s, mu, alpha, n):
    """Tail integral from N via Gamma(1-s) minus the lower incomplete gamma series.

    Used only when |2 pi mu (N + alpha)| < 0.9 |1 - s|.
    """
    om = TWO_PI * mu
    x = n + alpha
    a = 1.0 - s
    z = -1j * om * x
    term = 1.0 / a
    acc = term.copy()
    for k in range(1, 400):
        term = term * z / (a + k)
        acc = acc + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(acc)):
            break
    phase_n = np.exp(1j * TWO_PI * frac_mul(mu, n))
    lower = np.exp(a * np.log(x)) * phase_n * acc
    log_mi_om = np.log(complex(-1j * om))
    expo = (s - 1.0) * log_mi_om + loggamma(a) - 1j * om * alpha
    upper = np.exp(expo)
    # exp() turns an absolute error in its argument into a relative error of the result
    err = EPS * (np.abs(upper) * (1.0 + 2.0 * np.abs(expo))
                 + np.abs(lower) * (1.0 + 2.0 * np.abs(a) * np.log(x) + np.abs(s)))
    return upper - lower, err


def _choose_terms(s, mu, alpha, policy):
    """Per-point head length and tail regime ('closed', 'ray', 'series')."""
    t = s.imag
    n0 = np.maximum(policy.em_min_terms,
                    np.ceil(policy.em_terms_factor * (np.abs(t) + 10.0))).astype(np.int64)
    if mu == 0.0:
        return n0, np.zeros(s.shape, dtype=np.int8)
    a = 1.0 - s
    abs_a = np.abs(a)
    k_near = np.maximum(0.0, np.round(-a.real))
    dist_int = np.abs(a + k_near)
    z_abs = TWO_PI * abs(mu) * (n0 + alpha)
    series = (z_abs <= 0.9 * abs_a) & (dist_int >= 0.25)
    need = np.ceil((2.0 * np.abs(s) + 2.0) / (TWO_PI * abs(mu)) - alpha).astype(np.int64)
    n = np.where(series, n0, np.maximum(n0, need))
    regime = np.where(series, 2, 1).astype(np.int8)
    return n, regime


def _em_once(s, mu, alpha, n, regime, policy):
    head, abs1, abs2 = kernels.head_sums(s, mu, alpha, n)
    coef = em_coefficients()
    binom = binomial_table()
    corr, corr_err, _ = kernels.em_corrections(s, mu, alpha, n, coef, binom,
                                               policy.em_order, _STOP_REL)
    x = n + alpha
    tail = np.empty_like(s)
    tail_err = np.zeros(s.shape)     # rounding in the tail
    tail_trunc = np.zeros(s.shape)   # quadrature truncation in the tail
    closed = regime == 0
    if closed.any():
        sc = s[closed]
        tail[closed] = np.exp((1.0 - sc) * np.log(x[closed])) / (sc - 1.0)
        tail_err[closed] = EPS * np.abs(tail[closed]) * (1.0 + np.abs(sc) * np.log(x[closed]))
    ray = regime == 1
    if ray.any():
        nodes, weights = laguerre_rule(policy.laguerre_nodes)
        coarse = max(8, (3 * policy.laguerre_nodes) // 4)
        cn, cw = laguerre_rule(coarse)
        fine = kernels.laguerre_tail(s[ray], mu, alpha, n[ray], nodes, weights)
        rough = kernels.laguerre_tail(s[ray], mu, alpha, n[ray], cn, cw)
        tail[ray] = fine
        tail_trunc[ray] = np.abs(fine - rough)
        tail_err[ray] = EPS * np.abs(fine) * (1.0 + np.abs(s[ray]))
    ser = regime == 2
    if ser.any():
        v, e = _series_tail(s[ser], mu, alpha, n[ser])
        tail[ser] = v
        tail_err[ser] = e
    value = head + tail + corr
    round_err = 2.0 * EPS * (1.0 + np.abs(s.imag) * np.log(x)) * np.sqrt(abs2) + EPS * abs1
    trunc = corr_err + tail_trunc
    return value, trunc + tail_err + round_err, trunc


def _em_batch(lam, alpha, s, policy=DEFAULT_POLICY):
    """Euler-Maclaurin values for an array of s (any lam in [0, 1], alpha > 0)."""
    s = _as_complex_array(s)
    mu = reduced_frequency(lam)
    _check_pole(mu, s)
    n, regime = _choose_terms(s, mu, alpha, policy)
    if np.any(n > HARD_TERM_CAP):
        raise PrecisionLoss(
            f"Euler-Maclaurin would need more than {HARD_TERM_CAP} terms "
            f"(mu={mu:.3g} too close to 0 for this s)")
    values, errs, trunc = _em_once(s, mu, alpha, n, regime, policy)
    tol = policy.target_tol
    # only the truncation part is reduced by a longer head
    bad = ~_tolerance_ok(values, trunc, tol) | ~np.isfinite(values)
    escalations = 0
    while bad.any() and escalations < policy.max_escalations:
        escalations += 1
        n = np.where(bad, 2 * n, n)
        idx = np.nonzero(bad)[0]
        v, e, tr = _em_once(s[idx], mu, alpha, n[idx], regime[idx], policy)
        values[idx] = v
        errs[idx] = e
        trunc[idx] = tr
        bad = ~_tolerance_ok(values, trunc, tol) | ~np.isfinite(values)
    bad |= ~_tolerance_ok(values, errs, ROUND_SLACK * tol)
    if bad.any():
        j = int(np.nonzero(bad)[0][0])
        raise PrecisionLoss(
            f"Euler-Maclaurin error {errs[j]:.3e} above tolerance at s={s[j]} "
            f"after {escalations} escalations")
    return values, errs, {"terms": n, "escalations": escalations}


# ---------------------------------------------------------------------------
# Reflection formula
# ---------------------------------------------------------------------------

def _fe_batch(lam, alpha, w, policy=DEFAULT_POLICY):
    """L(lam, alpha, w) through the reflection formula, evaluated at s = 1 - w.

    L(lam, alpha, 1-s) = (2 pi)^-s Gamma(s) [ e^{i pi s/2 - 2 pi i alpha lam} L(1-alpha, lam, s)
                         + e^{-i pi s/2 + 2 pi i alpha (1-{lam})} L(alpha, 1-{lam}, s) ]
    Exponential factors are combined in log space so |t| up to a few hundred
    cannot overflow.
    """
    w = _as_complex_array(w)
    s = 1.0 - w
    frac_lam = lam % 1.0
    common = -s * LOG_TWO_PI + loggamma(s)
    log_a = common + 0.5j * math.pi * s - 2j * math.pi * ((alpha * lam) % 1.0)
    log_b = common - 0.5j * math.pi * s + 2j * math.pi * ((alpha * (1.0 - frac_lam)) % 1.0)
    l1, e1, _ = _em_batch(1.0 - alpha, lam, s, policy)
    l2, e2, _ = _em_batch(alpha, 1.0 - frac_lam, s, policy)
    fa = np.exp(log_a)
    fb = np.exp(log_b)
    pa = fa * l1
    pb = fb * l2
    value = pa + pb
    log_scale = np.abs(log_a) + np.abs(log_b) + 1.0
    err = np.abs(fa) * e1 + np.abs(fb) * e2 + EPS * log_scale * (np.abs(pa) + np.abs(pb))
    if not np.all(np.isfinite(value)):
        raise PrecisionLoss("reflection formula overflowed")
    return value, err


def _route_batch(lam, alpha, s, policy, route_sigma=None):
    """Values for an array of s, routing each point by ``route_sigma`` (default Re s)."""
    s = _as_complex_array(s)
    rs = s.real if route_sigma is None else np.broadcast_to(route_sigma, s.shape)
    values = np.empty_like(s)
    errs = np.empty(s.shape)
    fe = rs <= FE_SIGMA
    if fe.any():
        values[fe], errs[fe] = _fe_batch(lam, alpha, s[fe], policy)
    em = ~fe
    if em.any():
        values[em], errs[em], _ = _em_batch(lam, alpha, s[em], policy)
    return values, errs


# ---------------------------------------------------------------------------
# Direct series
# ---------------------------------------------------------------------------

def _direct_terms_needed(s, mu, sigma, tol):
    """Smallest N whose remainder bound (after the tail model) is below tol."""
    ss1 = abs(s) * abs(s + 1.0)
    if mu == 0.0:
        c = ss1 / (6.0 * (sigma + 1.0))
    else:
        one_minus_z = abs(2.0 * math.sin(math.pi * mu))
        c = 2.0 * ss1 / ((sigma + 1.0) * one_minus_z ** 3)
    return max(16, math.ceil((c / tol) ** (1.0 / (sigma + 1.0))))


def _direct(lam, alpha, s, n, policy):
    mu = reduced_frequency(lam)
    sigma = s.real
    head, abs1, abs2 = kernels.head_sums(np.array([s]), mu, alpha, np.array([n], dtype=np.int64))
    x = n + alpha
    g = complex(np.exp(-s * math.log(x)))
    g1 = complex(np.exp(-s * math.log(x + 1.0)))
    zn = complex(np.exp(1j * TWO_PI * frac_mul(mu, n)))
    ss1 = abs(s) * abs(s + 1.0)
    if mu == 0.0:
        # integral + half term + first Bernoulli correction
        tail = complex(np.exp((1.0 - s) * math.log(x))) / (s - 1.0) + 0.5 * g + s * g / (12.0 * x)
        bound = ss1 * x ** (-sigma - 1.0) / (6.0 * (sigma + 1.0))
    else:
        z = complex(np.exp(2j * math.pi * mu))
        tail = zn * g / (1.0 - z) + zn * z * (g1 - g) / (1.0 - z) ** 2
        bound = 2.0 * ss1 * x ** (-sigma - 1.0) / ((sigma + 1.0) * abs(1.0 - z) ** 3)
    value = complex(head[0]) + tail
    round_err = EPS * (1.0 + abs(s.imag) * math.log(x)) * math.sqrt(abs2[0]) + EPS * abs1[0]
    return value, bound + round_err


# ---------------------------------------------------------------------------
# Public evaluators
# ---------------------------------------------------------------------------

def _scalar(s) -> complex:
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError(f"s must be finite, got {s!r}")
    return s


def hurwitz_zeta(s, a: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> EvalResult:
    """Hurwitz zeta(s, a) for 0 < a <= 1."""
    s = _scalar(s)
    if not 0.0 < a <= 1.0:
        raise DomainError(f"a must lie in (0, 1], got {a!r}")
    if abs(s - 1.0) < 1e-12:
        raise PoleAtOne("zeta(s, a) has a pole at s = 1")
    if s.real <= FE_SIGMA:
        v, e = _fe_batch(1.0, a, np.array([s]), policy)
        res = EvalResult(complex(v[0]), float(e[0]), Method.FUNCTIONAL_EQUATION)
    else:
        v, e, meta = _em_batch(0.0, a, np.array([s]), policy)
        res = EvalResult(complex(v[0]), float(e[0]), Method.EULER_MACLAURIN,
                         {"terms": int(meta["terms"][0]), "escalations": meta["escalations"]})
    _final_check(res, policy)
    return res


def lerch_direct(params: Params, s, policy: PrecisionPolicy = DEFAULT_POLICY) -> EvalResult:
    """Partial sum of the defining series plus a one-step tail model.

    The tail is modelled by the integral/half-term/first Bernoulli term when
    lam = 1 and by two summation-by-parts terms otherwise; the remainder bound
    fixes the number of terms.
    """
    s = _scalar(s)
    if s.real < 1.0 + policy.series_margin:
        raise DomainError(f"direct series needs Re s >= {1.0 + policy.series_margin}")
    mu = reduced_frequency(params.lam)
    n = _direct_terms_needed(s, mu, s.real, 0.25 * policy.target_tol)
    if n > HARD_TERM_CAP:
        raise PrecisionLoss(f"direct series would need {n} terms")
    value, err = _direct(params.lam, params.alpha, s, n, policy)
    res = EvalResult(value, err, Method.DIRECT_SERIES, {"terms": n})
    _final_check(res, policy)
    return res


def lerch_em(params: Params, s, policy: PrecisionPolicy = DEFAULT_POLICY) -> EvalResult:
    s = _scalar(s)
    if s.real <= FE_SIGMA:
        raise DomainError("Euler-Maclaurin route requires Re s > -2")
    v, e, meta = _em_batch(params.lam, params.alpha, np.array([s]), policy)
    res = EvalResult(complex(v[0]), float(e[0]), Method.EULER_MACLAURIN,
                     {"terms": int(meta["terms"][0]), "escalations": meta["escalations"]})
    _final_check(res, policy)
    return res


def lerch_fe(params: Params, s, policy: PrecisionPolicy = DEFAULT_POLICY) -> EvalResult:
    """L(lam, alpha, 1 - s) from the reflection formula (intended for Re s >= 3)."""
    s = _scalar(s)
    w = 1.0 - s
    mu = reduced_frequency(params.lam)
    _check_pole(mu, np.array([w]))
    v, e = _fe_batch(params.lam, params.alpha, np.array([w]), policy)
    res = EvalResult(complex(v[0]), float(e[0]), Method.FUNCTIONAL_EQUATION)
    _final_check(res, policy)
    return res


def lerch_rational(b: int, d: int, s, policy: PrecisionPolicy = DEFAULT_POLICY) -> EvalResult:
    """L(b/d, b/d, s) as d^-s sum_k e^{2 pi i b k/d} zeta(s, (k d + b)/d^2)."""
    s = _scalar(s)
    b, d = int(b), int(d)
    if d < 1 or not 1 <= b <= d:
        raise DomainError("need integers 1 <= b <= d")
    g = math.gcd(b, d)
    b, d = b // g, d // g
    scale = np.exp(-s * math.log(d))
    total = 0j
    err = 0.0
    for k in range(d):
        a = Fraction(k * d + b, d * d)
        z = hurwitz_zeta(s, float(a), policy)
        w = np.exp(2j * math.pi * ((b * k) % d) / d)
        total += w * z.value
        err += z.err_estimate
    value = complex(scale * total)
    err = float(abs(scale) * err + EPS * d * abs(value))
    return EvalResult(value, err, Method.RATIONAL_HURWITZ, {"b": b, "d": d})


def _direct_affordable(params, s, policy):
    if s.real < 1.0 + policy.series_margin:
        return False
    n = _direct_terms_needed(s, reduced_frequency(params.lam), s.real, 0.25 * policy.target_tol)
    return n <= policy.direct_max_terms


def lerch(params: Params, s, policy: PrecisionPolicy = DEFAULT_POLICY) -> EvalResult:
    """L(lam, alpha, s) anywhere except the pole.

    Routing: reflection formula for Re s <= -2; the direct series for
    Re s >= 1.5 when its term count stays under ``policy.direct_max_terms``;
    Euler-Maclaurin otherwise.
    """
    s = _scalar(s)
    if s.real <= FE_SIGMA:
        w = s
        mu = reduced_frequency(params.lam)
        _check_pole(mu, np.array([w]))
        v, e = _fe_batch(params.lam, params.alpha, np.array([w]), policy)
        res = EvalResult(complex(v[0]), float(e[0]), Method.FUNCTIONAL_EQUATION)
        _final_check(res, policy)
        return res
    if _direct_affordable(params, s, policy):
        return lerch_direct(params, s, policy)
    return lerch_em(params, s, policy)


def _final_check(res: EvalResult, policy: PrecisionPolicy):
    v = res.value
    if not (math.isfinite(v.real) and math.isfinite(v.imag) and math.isfinite(res.err_estimate)):
        raise PrecisionLoss(f"non-finite result from {res.method.value}")
    if res.err_estimate > ROUND_SLACK * policy.target_tol * max(1.0, abs(v)):
        raise PrecisionLoss(
            f"{res.method.value}: error estimate {res.err_estimate:.3e} exceeds tolerance")


# ---------------------------------------------------------------------------
# Derivatives
# ---------------------------------------------------------------------------

def _cauchy_radius(mu, centers, policy):
    r = np.full(centers.shape, policy.cauchy_radius)
    if mu == 0.0:
        d = np.abs(centers - 1.0)
        if np.any(d < 1e-9):
            raise PoleAtOne("derivative requested too close to the pole at s = 1")
        r = np.minimum(r, 0.25 * d)
    return r


def taylor_batch(lam, alpha, centers, max_order, policy=DEFAULT_POLICY):
    """Derivatives 0..max_order at each centre from one Cauchy circle.

    Returns ``(derivs, errs)`` with shapes (M, max_order + 1).  The error is the
    change between the full circle and its every-other-node half rule, plus
    the propagated evaluation error.
    """
    centers = _as_complex_array(centers)
    n = policy.cauchy_nodes
    mu = reduced_frequency(lam)
    r = _cauchy_radius(mu, centers, policy)
    theta = TWO_PI * np.arange(n) / n
    ring = centers[:, None] + r[:, None] * np.exp(1j * theta)[None, :]
    route = np.repeat(centers.real, n)
    vals, errs = _route_batch(lam, alpha, ring.ravel(), policy, route_sigma=route)
    vals = vals.reshape(ring.shape)
    errs = errs.reshape(ring.shape)
    full = np.fft.fft(vals, axis=1) / n
    half = np.fft.fft(vals[:, ::2], axis=1) / (n // 2)
    k = np.arange(max_order + 1)
    fact = np.array([math.factorial(int(j)) for j in k], dtype=float)
    rk = r[:, None] ** k[None, :]
    derivs = full[:, : max_order + 1] * fact / rk
    coarse = half[:, : max_order + 1] * fact / rk
    eval_err = errs.max(axis=1)[:, None] * fact / rk
    err = np.abs(derivs - coarse) + eval_err
    return derivs, err


def ds_derivative(params: Params, s, order: int = 1,
                  policy: PrecisionPolicy = DEFAULT_POLICY) -> EvalResult:
    """order-th s-derivative of L(lam, alpha, s) by trapezoidal Cauchy quadrature."""
    s = _scalar(s)
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    d, e = taylor_batch(params.lam, params.alpha, np.array([s]), order, policy)
    value = complex(d[0, order])
    err = float(e[0, order])
    n = policy.cauchy_nodes
    r = float(_cauchy_radius(reduced_frequency(params.lam), np.array([s]), policy)[0])
    if not math.isfinite(abs(value)):
        raise PrecisionLoss("non-finite derivative")
    # the half rule cannot beat rounding of the samples divided by r^order
    floor = 1e3 * EPS * math.factorial(order) / r ** order
    if err > max(policy.target_tol * max(1.0, abs(value)), floor * max(1.0, abs(value))):
        raise PrecisionLoss(f"Cauchy derivative unstable under node doubling (err={err:.3e})")
    return EvalResult(value, err, Method.CAUCHY, {"radius": r, "nodes": n})


def lambda_stencil(lam: float, h: float) -> tuple[np.ndarray, np.ndarray, str]:
    """Offsets and weights for a Richardson-extrapolated lam-derivative.

    Central differences with steps h and 2h when lam +- 2h stays in (0, 1];
    otherwise the one-sided second-order formula extrapolated the same way.
    """
    if lam - 2 * h > 0.0 and lam + 2 * h <= 1.0:
        # (8 (f(+h) - f(-h)) - (f(+2h) - f(-2h))) / 12h
        return (np.array([-2.0, -1.0, 1.0, 2.0]) * h,
                np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * h), "central")
    if lam + 2 * h > 1.0 and lam - 4 * h > 0.0:
        # D_h = (3f0 - 4f(-h) + f(-2h))/2h, D_2h likewise; (4 D_h - D_2h)/3
        return (np.array([0.0, -1.0, -2.0, -4.0]) * h,
                np.array([21.0, -32.0, 12.0, -1.0]) / (12.0 * h), "backward")
    if lam - 2 * h <= 0.0 and lam + 4 * h <= 1.0:
        return (np.array([0.0, 1.0, 2.0, 4.0]) * h,
                -np.array([21.0, -32.0, 12.0, -1.0]) / (12.0 * h), "forward")
    raise EdgeOfDomain(f"no finite-difference stencil fits at lambda={lam} with h={h}")


def lambda_derivative_batch(lam, s, s_order, policy=DEFAULT_POLICY, h=None):
    """d/dlam of d^k/ds^k L(lam, lam, s) for k = s_order, plus a defect estimate."""
    s = _as_complex_array(s)
    h = policy.lambda_fd_step if h is None else h
    offsets, weights, kind = lambda_stencil(lam, h)

    def stencil_values(step_scale):
        vals = []
        for off in offsets * step_scale:
            lv = lam + off
            if s_order == 0:
                v, _ = _route_batch(lv, lv, s, policy)
            else:
                d, _ = taylor_batch(lv, lv, s, s_order, policy)
                v = d[:, s_order]
            vals.append(v)
        return np.array(vals)

    return (weights[:, None] * stencil_values(1.0)).sum(axis=0), kind


def dlambda_derivative(params: Params, s, mixed: bool = False,
                       policy: PrecisionPolicy = DEFAULT_POLICY) -> EvalResult:
    """d ell/d lam (or d^2 ell / ds dlam when ``mixed``) for ell(lam, s) = L(lam, lam, s).

    The error estimate is the Richardson defect (the extrapolated value minus
    the plain second-order difference with step h) plus the propagated errors
    of the stencil values.
    """
    if not params.equal_params:
        raise DomainError("lambda-derivative is defined on the diagonal lam = alpha")
    s = _scalar(s)
    lam = params.lam
    h = policy.lambda_fd_step
    order = 1 if mixed else 0
    offsets, weights, kind = lambda_stencil(lam, h)
    vals, errs = [], []
    for off in offsets:
        lv = lam + off
        if order == 0:
            v, e = _route_batch(lv, lv, np.array([s]), policy)
            vals.append(complex(v[0]))
        else:
            d, e = taylor_batch(lv, lv, np.array([s]), 1, policy)
            vals.append(complex(d[0, 1]))
        errs.append(float(np.max(e)))
    vals = np.array(vals)
    extrap = complex((weights * vals).sum())
    if kind == "central":
        plain = (vals[2] - vals[1]) / (2 * h)
    else:
        sign = 1.0 if kind == "backward" else -1.0
        plain = sign * (3 * vals[0] - 4 * vals[1] + vals[2]) / (2 * h)
    defect = abs(extrap - plain)
    if kind != "central":
        # at lam = 1 higher lam-derivatives can blow up logarithmically, so the
        # h^2 expansion behind Richardson is not trusted; use the coarser defect too
        coarse = sign * (3 * vals[0] - 4 * vals[2] + vals[3]) / (4 * h)
        defect = max(defect, abs(extrap - coarse))
    # Richardson defect plus the value errors amplified by the stencil weights
    err = defect + float(np.abs(weights) @ np.array(errs))
    return EvalResult(extrap, float(err), Method.FINITE_DIFFERENCE, {"stencil": kind, "h": h})


def fe_residuals(lam: float, s, policy: PrecisionPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Relative gap between the two sides of the reflection formula, lam = alpha.

    The left side L(lam, lam, 1 - s) comes from Euler-Maclaurin directly, the
    right side from the two Lerch values at s; intended for 1.5 <= Re s < 3.
    """
    s = _as_complex_array(s)
    w = 1.0 - s
    if np.any(w.real <= FE_SIGMA):
        raise DomainError("fe_residuals needs Re s < 3 so that 1 - s stays on the EM side")
    left, _, _ = _em_batch(lam, lam, w, policy)
    right, _ = _fe_batch(lam, lam, w, policy)
    return np.abs(left - right) / np.maximum(np.abs(left), np.finfo(float).tiny)


def fe_grid(n: int = 100, seed: int = 0, sigma=(1.5, 3.0), t=(10.0, 200.0)) -> np.ndarray:
    """Deterministic random grid with sigma in [sigma0, sigma1) and t in [t0, t1]."""
    rng = np.random.default_rng(seed)
    return rng.uniform(sigma[0], sigma[1], n) + 1j * rng.uniform(t[0], t[1], n)
