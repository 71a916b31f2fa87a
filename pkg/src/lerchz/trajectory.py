"""Continuation of zeros of ell(lam, s) = L(lam, lam, s) and of its s-derivative in lam.

Along a simple zero, d rho/d lam = -ell_lam / ell_s; for zeros q of ell_s the
same holds one derivative up.  RK4 predicts, Newton in s corrects, and the
path is reported on a uniform lam grid whatever the internal step.

Two paths can meet in a zero that is double to working precision; the ODE is
singular there and by default the trace stops with the partial path.  With
``StepControl(bridge=True)`` the branch point is bridged instead: the pair is
located on either side of it and the outgoing branch is picked by a fixed
rule (see ``_bridge``); every bridge is listed in ``branch_points``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import DomainError, NoConvergence, SingularJacobian, StepUnderflow
from .evaluate import lambda_derivative_batch, taylor_batch
from .types import DEFAULT_POLICY, Params, PrecisionPolicy
from .errors import LerchError
from .zeros import KINDS, RectBox, locate_zeros, value_batch

SAMPLE_RESIDUAL = 1e-8
MAX_JUMP = 0.5
SMALL_JACOBIAN = 1e-6
SINGULAR_JACOBIAN = 1e-10
MAX_CORRECTION = 1e-2
BRIDGE_BOX = 0.3      # half-size of the search box around a branch point
MAX_BRIDGES = 16


@dataclass(frozen=True)
class StepControl:
    h_init: float = 1e-3
    h_min: float = 1e-7
    repolish_every: int = 1
    newton_tol: float = 1e-10
    max_newton: int = 5
    grid: float = 1e-3
    bridge: bool = False    # opt in to crossing branch points, see _bridge

    def __post_init__(self):
        if not (self.h_init > 0 and self.h_min > 0 and self.newton_tol > 0 and self.grid > 0):
            raise DomainError("step controls must be positive")
        if not self.h_min < self.h_init:
            raise DomainError("need h_min < h_init")
        if self.repolish_every < 1 or self.max_newton < 1:
            raise DomainError("repolish_every and max_newton must be >= 1")


@dataclass
class Trajectory:
    kind: str
    samples: list = field(default_factory=list)   # (lam, s, residual)
    direction: str = "decreasing_lambda"
    truncated: bool = False
    diagnostic: str | None = None
    branch_points: list = field(default_factory=list)   # (lam_before, lam_after)

    @property
    def lambdas(self):
        return np.array([x[0] for x in self.samples])

    @property
    def positions(self):
        return np.array([x[1] for x in self.samples], dtype=complex)

    @property
    def residuals(self):
        return np.array([x[2] for x in self.samples])

    def __len__(self):
        return len(self.samples)


def _order(kind):
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}")
    return 0 if kind == "L" else 1


def _jet(kind, lam, s, policy):
    """(f, f_s) for f = ell or ell_s at (lam, s)."""
    k = _order(kind)
    d, _ = taylor_batch(lam, lam, np.array([s]), k + 1, policy)
    return complex(d[0, k]), complex(d[0, k + 1])


def _velocity(kind, lam, s, policy):
    k = _order(kind)
    f_lam, _ = lambda_derivative_batch(lam, np.array([s]), k, policy)
    _, f_s = _jet(kind, lam, s, policy)
    if abs(f_s) < SINGULAR_JACOBIAN:
        raise SingularJacobian(f"|df/ds| = {abs(f_s):.2e} at lam={lam}, s={s}", last_lambda=lam)
    return -complex(f_lam[0]) / f_s, abs(f_s)


def _newton(kind, lam, s, ctrl, policy):
    """Newton in s; returns (s, |f|, |f_s|, total correction) or None on failure."""
    s0 = s
    for _ in range(ctrl.max_newton):
        f, fs = _jet(kind, lam, s, policy)
        if abs(fs) < SINGULAR_JACOBIAN:
            raise SingularJacobian(f"|df/ds| = {abs(fs):.2e} at lam={lam}", last_lambda=lam)
        ds = f / fs
        s = s - ds
        if abs(ds) < 1e-14 * max(1.0, abs(s)):
            break
    f, fs = _jet(kind, lam, s, policy)
    if abs(f) >= ctrl.newton_tol:
        return None
    return s, abs(f), abs(fs), abs(s - s0)


def _residual(kind, lam, s, policy):
    return float(abs(value_batch(kind, Params(lam, lam), [s], policy)[0]))


def _grid(start, end, step):
    if start == end:
        return [start]
    sign = 1.0 if end > start else -1.0
    n = int(math.floor(abs(end - start) / step + 1e-9))
    pts = [start + sign * k * step for k in range(n + 1)]
    if abs(pts[-1] - end) > 1e-12:
        pts.append(end)
    else:
        pts[-1] = end
    return pts


def _check_interval(start_lambda, end_lambda):
    for v in (start_lambda, end_lambda):
        if not 0.0 < v <= 1.0:
            raise DomainError(f"lambda {v} outside (0, 1]")


def _polish_start(kind, lam, start, ctrl, policy):
    """Certify the start; a start that needs more than a 1e-6 move is not a zero."""
    s = complex(start)
    for _ in range(ctrl.max_newton):
        f, fs = _jet(kind, lam, s, policy)
        if abs(fs) < SINGULAR_JACOBIAN:
            raise SingularJacobian("start sits on a multiple zero", last_lambda=lam)
        s = s - f / fs
    res = _residual(kind, lam, s, policy)
    if res >= SAMPLE_RESIDUAL or abs(s - start) > 1e-6:
        raise NoConvergence(f"start {start} is not a zero at lambda={lam} (residual {res:.2e})")
    return s, res


def _trace(kind, start_lambda, start, end_lambda, ctrl, policy, method):
    _check_interval(start_lambda, end_lambda)
    ctrl = ctrl or StepControl()
    direction = "decreasing_lambda" if end_lambda < start_lambda else "increasing_lambda"
    traj = Trajectory(kind, direction=direction)
    s, res = _polish_start(kind, start_lambda, start, ctrl, policy)
    traj.samples.append((start_lambda, s, res))
    grid = _grid(start_lambda, end_lambda, ctrl.grid)
    sign = -1.0 if direction == "decreasing_lambda" else 1.0
    lam = start_lambda
    h = min(ctrl.h_init, ctrl.grid)
    prev = None          # previous (lam, s) for the secant predictor
    try:
        for target in grid[1:]:
            try:
                lam, s, h, prev = _advance(kind, lam, s, target, h, prev, sign, ctrl, policy,
                                           method)
            except (SingularJacobian, StepUnderflow):
                if not ctrl.bridge or len(traj.branch_points) >= MAX_BRIDGES:
                    raise
                g_lam, g_s, _ = traj.samples[-1]
                s = _bridge(kind, g_lam, g_s, target, policy)
                traj.branch_points.append((g_lam, target))
                lam, h, prev = target, min(ctrl.h_init, ctrl.grid), None
            res = _residual(kind, lam, s, policy)
            if res >= SAMPLE_RESIDUAL:
                raise NoConvergence(f"residual {res:.2e} at lambda={lam}")
            traj.samples.append((lam, s, res))
    except (SingularJacobian, StepUnderflow, NoConvergence) as exc:
        traj.truncated = True
        traj.diagnostic = f"{type(exc).__name__}: {exc}"
        exc.partial = traj
        if getattr(exc, "last_lambda", None) is None:
            exc.last_lambda = lam
        raise
    return traj


def _advance(kind, lam, s, target, h, prev, sign, ctrl, policy, method):
    """Integrate from lam to the grid point ``target``; returns (lam, s, h, prev)."""
    steps = 0
    while abs(target - lam) > 1e-15:
        step = min(h, abs(target - lam))
        new_lam = target if step >= abs(target - lam) else lam + sign * step
        dl = new_lam - lam
        if method == "rk4":
            k1, _ = _velocity(kind, lam, s, policy)
            k2, _ = _velocity(kind, lam + dl / 2, s + dl / 2 * k1, policy)
            k3, _ = _velocity(kind, lam + dl / 2, s + dl / 2 * k2, policy)
            k4, _ = _velocity(kind, new_lam, s + dl * k3, policy)
            pred = s + dl / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        else:
            pred = s if prev is None else s + (s - prev[1]) * dl / (lam - prev[0])
        steps += 1
        if method == "rk4" and steps % ctrl.repolish_every and new_lam != target:
            out = (pred, 0.0, 1.0, 0.0)
        else:
            out = _newton(kind, new_lam, pred, ctrl, policy)
        ok = out is not None and out[3] <= MAX_CORRECTION and abs(out[0] - s) < MAX_JUMP
        if ok and out[2] < SMALL_JACOBIAN and step > ctrl.h_init / 16:
            ok = False   # near-collision: creep with small steps
        if not ok:
            h = step / 2
            if h < ctrl.h_min:
                raise StepUnderflow(f"step below {ctrl.h_min} at lambda={lam}",
                                    last_lambda=lam)
            continue
        prev = (lam, s)
        lam, s = new_lam, out[0]
        h = min(2 * h, ctrl.h_init)
    return lam, s, h, prev


def _pair(kind, lam, center, policy):
    """The two zeros nearest to ``center`` at ``lam``, or None."""
    r = BRIDGE_BOX
    box = RectBox(center.real - r, center.real + r, center.imag - r, center.imag + r)
    try:
        zs = locate_zeros(box, kind, Params(lam, lam), policy)
    except LerchError:
        return None
    locs = sorted((z.location for z in zs for _ in range(z.multiplicity)),
                  key=lambda z: abs(z - center))
    return locs[:2] if len(locs) >= 2 else None


def _bridge(kind, lam0, s0, lam1, policy):
    """Carry the zero s0 at lam0 across a branch point to the grid value lam1.

    The partner is the nearest other zero at lam0; d = s0 - partner.  At lam1
    the pair is located again with offset e between its members.  If e is
    still roughly parallel to d the pair has not met yet and the member on
    the side of d is taken.  Otherwise the pair has met and left at a right
    angle, and the member on the side of -i d is taken: a pair meeting on
    the critical line sends the upper zero to the right and the lower zero
    to the left.  At a numerically double zero the choice is a convention.
    """
    err = SingularJacobian(f"no branch-point pair near {s0} at lambda={lam0}",
                           last_lambda=lam0)
    before = _pair(kind, lam0, s0, policy)
    if before is None or abs(before[0] - s0) > 1e-6 * max(1.0, abs(s0)):
        raise err
    d = s0 - before[1]
    if abs(d) < 1e-9:
        raise err
    mid = 0.5 * (s0 + before[1])
    after = _pair(kind, lam1, mid, policy)
    if after is None:
        raise err
    e = after[0] - after[1]
    aligned = abs((e * d.conjugate()).real) >= abs((e * d.conjugate()).imag)
    ref = d if aligned else -1j * d
    c = 0.5 * (after[0] + after[1])
    pick = max(after, key=lambda z: ((z - c) * ref.conjugate()).real)
    if abs(pick - s0) >= MAX_JUMP:
        raise err
    return pick


def trace_L_zero(start_lambda: float, start, end_lambda: float, ctrl: StepControl | None = None,
                 policy: PrecisionPolicy = DEFAULT_POLICY, method: str = "rk4") -> Trajectory:
    """Follow a zero of L(lam, lam, s) from ``start_lambda`` to ``end_lambda``.

    ``method="continuation"`` swaps the RK4 predictor for a secant predictor
    (plain Newton continuation), used as an independent cross-check.  On
    failure the raised error carries the partial path in ``exc.partial``.
    """
    return _trace("L", start_lambda, start, end_lambda, ctrl, policy, _method(method))


def trace_Lprime_zero(start_lambda: float, start, end_lambda: float,
                      ctrl: StepControl | None = None,
                      policy: PrecisionPolicy = DEFAULT_POLICY, method: str = "rk4") -> Trajectory:
    """Follow a zero of the s-derivative L'(lam, lam, s); see ``trace_L_zero``."""
    return _trace("Lprime", start_lambda, start, end_lambda, ctrl, policy, _method(method))


def _method(method):
    if method not in ("rk4", "continuation"):
        raise DomainError("method must be 'rk4' or 'continuation'")
    return method


def detect_line_crossings(traj: Trajectory, line: float = 0.5, xtol: float = 1e-9,
                          line_tol: float = 1e-8):
    """Parameter values where Re(position) crosses ``line``.

    Samples within ``line_tol`` of the line count as on it, so a path that
    stays on the line (up to rounding) reports no crossings.  A crossing is a
    change from one side to the other between off-line samples; it is solved
    with brentq on a cubic spline through the samples (linear interpolation
    when there are fewer than four).
    """
    if len(traj) < 2:
        return []
    lam = traj.lambdas
    pos = traj.positions
    order = np.argsort(lam)
    lam, pos = lam[order], pos[order]
    d = pos.real - line
    if len(lam) >= 4:
        sig = CubicSpline(lam, pos.real)
        tt = CubicSpline(lam, pos.imag)

        def at(x):
            return complex(float(sig(x)), float(tt(x)))
    else:
        def at(x):
            return complex(np.interp(x, lam, pos.real), np.interp(x, lam, pos.imag))
    off = np.flatnonzero(np.abs(d) > line_tol)
    out = []
    for i, j in zip(off[:-1], off[1:]):
        if d[i] * d[j] < 0:
            x = brentq(lambda v: at(v).real - line, lam[i], lam[j], xtol=xtol)
            out.append((float(x), at(x)))
    if traj.direction == "decreasing_lambda":
        out.reverse()
    return out
