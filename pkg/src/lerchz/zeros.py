"""Argument-principle counting and Muller refinement of zeros of L and L'.

``winding`` integrates f'/f (and s f'/f) around a rectangle with adaptive
Gauss-Kronrod panels; f' comes from the same Cauchy circle as f, so for
kind ``"Lprime"`` the pair is (L', L'').  ``locate_zeros`` bisects until each
leaf holds one zero and seeds Muller's method with the leaf's zero sum.
"""

from __future__ import annotations

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (DomainError, EmptyList, Escaped, LerchError, NoConvergence,
                     NonIntegerWinding, ZeroOnBoundary)
from .evaluate import _route_batch, reduced_frequency, taylor_batch
from .kernels import thread_cap
from .types import DEFAULT_POLICY, Params, PrecisionPolicy

log = logging.getLogger(__name__)

KINDS = ("L", "Lprime")
MIN_MODULUS = 1e-9
MAX_NUDGES = 8
NONINTEGER_DEFECT = 0.25
BOTTOM_LIFT = 0.01        # boxes starting at t = 0 are lifted off the real axis
CONTOUR_NODES = 16        # Cauchy nodes for f' on contours; 32 is overkill here
PANEL_TOL = 1e-9
MIN_PANEL = 1e-9
MULLER_MAXIT = 60
ESCAPE_RADIUS = 1.0

# 15-point Kronrod nodes on [0, 1) and weights, with the embedded 7-point Gauss weights
_XK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                0.207784955007898467600689403773245, 0.0])
_WK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

# ascending nodes on [-1, 1] with both endpoints prepended/appended
NODES = np.concatenate(([-1.0], -_XK[:-1], [0.0], _XK[-2::-1], [1.0]))
W_KRONROD = np.concatenate(([0.0], _WK[:-1], [_WK[-1]], _WK[-2::-1], [0.0]))
W_GAUSS = np.zeros_like(W_KRONROD)
# Gauss nodes are the odd-indexed Kronrod nodes xk[1], xk[3], xk[5], 0
for _i, _w in zip((1, 3, 5), _WG[:3]):
    W_GAUSS[1 + _i] = _w
    W_GAUSS[len(NODES) - 2 - _i] = _w
W_GAUSS[8] = _WG[3]


@dataclass(frozen=True)
class RectBox:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float
    allow_pole: bool = False

    def __post_init__(self):
        vals = (self.sigma_min, self.sigma_max, self.t_min, self.t_max)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("box coordinates must be finite")
        if not self.sigma_min < self.sigma_max:
            raise DomainError("need sigma_min < sigma_max")
        if not self.t_min < self.t_max:
            raise DomainError("need t_min < t_max")
        for name in ("sigma_min", "sigma_max", "t_min", "t_max"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def width(self):
        return self.sigma_max - self.sigma_min

    @property
    def height(self):
        return self.t_max - self.t_min

    def contains(self, s, strict=True) -> bool:
        s = complex(s)
        if strict:
            return (self.sigma_min < s.real < self.sigma_max
                    and self.t_min < s.imag < self.t_max)
        return (self.sigma_min <= s.real <= self.sigma_max
                and self.t_min <= s.imag <= self.t_max)

    def corners(self):
        """Counter-clockwise from the bottom-left corner."""
        return (complex(self.sigma_min, self.t_min), complex(self.sigma_max, self.t_min),
                complex(self.sigma_max, self.t_max), complex(self.sigma_min, self.t_max))

    def as_tuple(self):
        return (self.sigma_min, self.sigma_max, self.t_min, self.t_max)

    @classmethod
    def parse(cls, text: str) -> "RectBox":
        parts = [p.strip() for p in text.replace("−", "-").split(",")]
        if len(parts) != 4:
            raise DomainError(f"box needs four comma-separated numbers, got {text!r}")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise DomainError(f"malformed box {text!r}") from exc
        return cls(*vals)


@dataclass
class ZeroRecord:
    location: complex
    kind: str
    residual: float
    multiplicity: int
    provenance: RectBox
    refine_iters: int
    lam: float = 1.0
    alpha: float = 1.0
    warning: str | None = None

    @property
    def beta(self):
        return self.location.real

    @property
    def gamma(self):
        return self.location.imag


@dataclass
class WindingResult:
    count: int
    zero_sum: complex
    edge_min_modulus: float
    raw: complex = 0j
    box: RectBox | None = None
    nudges: list = field(default_factory=list)

    @property
    def defect(self):
        return abs(self.raw - self.count)


def _check_kind(kind):
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")


def _contour_policy(policy):
    if policy.cauchy_nodes <= CONTOUR_NODES:
        return policy
    return replace(policy, cauchy_nodes=CONTOUR_NODES)


def value_batch(kind, params: Params, s, policy=DEFAULT_POLICY):
    """f(s) for f = L or L' at an array of points."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if kind == "L":
        return _route_batch(params.lam, params.alpha, s, policy)[0]
    d, _ = taylor_batch(params.lam, params.alpha, s, 1, policy)
    return d[:, 1]


def pair_batch(kind, params: Params, s, policy=DEFAULT_POLICY):
    """(f, f') at an array of points from one Cauchy circle each."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    order = 1 if kind == "L" else 2
    d, _ = taylor_batch(params.lam, params.alpha, s, order, policy)
    return d[:, order - 1], d[:, order]


def residual(kind, params, s, policy=DEFAULT_POLICY) -> float:
    return float(abs(value_batch(kind, params, [s], policy)[0]))


# ---------------------------------------------------------------------------
# contour integration
# ---------------------------------------------------------------------------

def _integrate_edges(edges, kind, params, policy):
    """Integrate f'/f and s f'/f along each (a, b) segment.

    Panels are processed in waves so every wave is one batched evaluation.
    Returns per-edge lists [I0, I1, min|f|].
    """
    out = [[0j, 0j, math.inf] for _ in edges]
    pending = []
    for k, (a, b) in enumerate(edges):
        n0 = max(1, math.ceil(abs(b - a) / 0.5))
        for j in range(n0):
            pending.append((k, a + (b - a) * j / n0, a + (b - a) * (j + 1) / n0))
    while pending:
        mids = np.array([(a + b) / 2 for _, a, b in pending])
        halves = np.array([(b - a) / 2 for _, a, b in pending])
        pts = mids[:, None] + halves[:, None] * NODES[None, :]
        f, fp = pair_batch(kind, params, pts.ravel(), policy)
        f = f.reshape(pts.shape)
        fp = fp.reshape(pts.shape)
        nxt = []
        for i, (k, a, b) in enumerate(pending):
            fi = f[i]
            mod = np.abs(fi)
            out[k][2] = min(out[k][2], float(mod.min()))
            if mod.min() < MIN_MODULUS:
                where = pts[i][int(mod.argmin())]
                raise ZeroOnBoundary(f"|f| = {mod.min():.2e} on the contour near {where}",
                                     edge=k, where=complex(where))
            g0 = fp[i] / fi
            g1 = pts[i] * g0
            h = halves[i]
            k0, gg0 = h * (W_KRONROD @ g0), h * (W_GAUSS @ g0)
            k1, gg1 = h * (W_KRONROD @ g1), h * (W_GAUSS @ g1)
            steps = np.angle(fi[1:] / fi[:-1])
            phase_ok = np.max(np.abs(steps)) < math.pi / 2
            # the panel integral of f'/f must equal the change of log f
            dlog = complex(math.log(mod[-1] / mod[0]), float(steps.sum()))
            consistent = abs(k0 - dlog) <= 1e3 * PANEL_TOL
            accurate = (abs(k0 - gg0) <= PANEL_TOL
                        and abs(k1 - gg1) <= PANEL_TOL * (1.0 + abs(mids[i])))
            if phase_ok and consistent and accurate:
                out[k][0] += k0
                out[k][1] += k1
                continue
            if abs(b - a) < MIN_PANEL:
                raise ZeroOnBoundary(f"unresolvable spike of f'/f near {mids[i]}",
                                     edge=k, where=complex(mids[i]))
            m = mids[i]
            nxt.append((k, a, m))
            nxt.append((k, m, b))
        pending = nxt
    return out


def _lifted(box: RectBox) -> RectBox:
    if box.t_min == 0.0:
        return replace(box, t_min=BOTTOM_LIFT)
    return box


def _pole_order(kind, params, box):
    """Zeros minus poles correction: a pole at s = 1 (integer lambda) inside the box."""
    if reduced_frequency(params.lam) != 0.0 or not box.contains(1.0, strict=False):
        return 0
    if not box.allow_pole:
        raise DomainError("box contains the pole s = 1; set allow_pole to count through it")
    if not box.contains(1.0, strict=True):
        raise ZeroOnBoundary("the pole s = 1 lies on the contour", where=1 + 0j)
    return 1 if kind == "L" else 2


def _nudge(box: RectBox, edge: int, where: complex) -> RectBox:
    step = 1e-6 * (1.0 + abs(where.imag))
    if edge == 0:
        return replace(box, t_min=box.t_min - step)
    if edge == 1:
        return replace(box, sigma_max=box.sigma_max + step)
    if edge == 2:
        return replace(box, t_max=box.t_max + step)
    return replace(box, sigma_min=box.sigma_min - step)


def _winding_once(box, kind, params, policy):
    c = box.corners()
    edges = [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]
    res = _integrate_edges(edges, kind, params, _contour_policy(policy))
    total0 = sum(r[0] for r in res)
    total1 = sum(r[1] for r in res)
    raw = total0 / (2j * math.pi)
    zsum = total1 / (2j * math.pi)
    pole = _pole_order(kind, params, box)
    count = round(raw.real)
    if abs(raw - count) >= NONINTEGER_DEFECT:
        raise NonIntegerWinding(f"winding integral {raw:.4f} is not near an integer")
    count += pole
    zsum += pole * 1.0
    if count < 0:
        raise NonIntegerWinding(f"negative zero count {count}")
    return WindingResult(count, complex(zsum), min(r[2] for r in res), complex(raw + pole), box)


def winding(box: RectBox, kind: str, params: Params,
            policy: PrecisionPolicy = DEFAULT_POLICY, nudge: bool = True) -> WindingResult:
    """Count zeros of f = L or L' inside ``box`` and sum their locations.

    A box whose bottom edge is t = 0 is lifted to t = 0.01 so that real zeros
    and the pole stay outside.  If a zero sits on an edge, that edge is pushed
    outward by 1e-6 (1 + |t|) and the count is retried, up to 8 times; the
    final box is reported in ``result.box`` and the moves in ``result.nudges``.
    """
    _check_kind(kind)
    work = _lifted(box)
    moves = []
    for _ in range(MAX_NUDGES + 1):
        try:
            res = _winding_once(work, kind, params, policy)
            res.nudges = moves
            return res
        except ZeroOnBoundary as exc:
            if not nudge or exc.edge is None or len(moves) >= MAX_NUDGES:
                raise
            work = _nudge(work, exc.edge, exc.where)
            moves.append((exc.edge, exc.where))
            log.info("nudged edge %d of %s after boundary zero near %s", exc.edge, box, exc.where)
    raise ZeroOnBoundary("boundary nudging exhausted")  # pragma: no cover


def circle_winding(center, radius, kind, params, policy=DEFAULT_POLICY, nodes=64) -> int:
    """Phase winding of f around a small circle; used for multiplicities."""
    center = complex(center)
    while True:
        theta = 2 * math.pi * np.arange(nodes + 1) / nodes
        f = value_batch(kind, params, center + radius * np.exp(1j * theta), policy)
        if np.min(np.abs(f)) < 1e-300:
            raise ZeroOnBoundary("zero on the multiplicity circle", where=center)
        steps = np.angle(f[1:] / f[:-1])
        if np.max(np.abs(steps)) < math.pi / 2:
            return int(round(steps.sum() / (2 * math.pi)))
        if nodes >= 4096:
            raise NonIntegerWinding("phase along the multiplicity circle is unresolved")
        nodes *= 2


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------

def _muller(fun, seed, h=1e-3, maxit=MULLER_MAXIT, step_tol=1e-12, f_tol=1e-10):
    x0, x1, x2 = seed - h, seed + h, complex(seed)
    f0, f1, f2 = fun(x0), fun(x1), fun(x2)
    for it in range(1, maxit + 1):
        if f2 == 0:
            return x2, abs(f2), it
        q = (x2 - x1) / (x1 - x0)
        a = q * f2 - q * (1 + q) * f1 + q * q * f0
        b = (2 * q + 1) * f2 - (1 + q) ** 2 * f1 + q * q * f0
        c = (1 + q) * f2
        root = cmath.sqrt(b * b - 4 * a * c)
        den = b + root if abs(b + root) >= abs(b - root) else b - root
        if den == 0:
            # degenerate parabola: secant step, or a kick if even that is flat
            x3 = x2 - f2 * (x2 - x1) / (f2 - f1) if f2 != f1 else x2 + h
        else:
            x3 = x2 - (x2 - x1) * 2 * c / den
        if abs(x3 - seed) > ESCAPE_RADIUS:
            raise Escaped(f"Muller iterate {x3} left the unit disc around {seed}")
        f3 = fun(x3)
        x0, x1, x2 = x1, x2, x3
        f0, f1, f2 = f1, f2, f3
        if abs(x2 - x1) < step_tol * max(1.0, abs(x2)) or abs(f2) < f_tol:
            return x2, abs(f2), it
    raise NoConvergence(f"Muller did not converge in {maxit} iterations from {seed}")


def refine_zero(seed, kind: str, params: Params, policy: PrecisionPolicy = DEFAULT_POLICY,
                box: RectBox | None = None) -> ZeroRecord:
    """Polish ``seed`` to a zero of f = L or L' by Muller's method."""
    _check_kind(kind)
    seed = complex(seed)

    def fun(z):
        return complex(value_batch(kind, params, [z], policy)[0])

    loc, res, iters = _muller(fun, seed)
    if res >= 1e-8:
        raise NoConvergence(f"residual {res:.2e} at {loc} exceeds 1e-8")
    mult = circle_winding(loc, 1e-4, kind, params, policy)
    warning = None
    if mult < 1:
        raise NoConvergence(f"no zero inside the certification circle at {loc}")
    if mult > 1:
        warning = f"multiplicity {mult}"
        log.warning("zero of multiplicity %d near %s", mult, loc)
    if box is None:
        pad = 1e-3
        box = RectBox(loc.real - pad, loc.real + pad, loc.imag - pad, loc.imag + pad)
    return ZeroRecord(complex(loc), kind, float(res), mult, box, iters,
                      params.lam, params.alpha, warning)


# ---------------------------------------------------------------------------
# subdivision driver
# ---------------------------------------------------------------------------

def _split(box: RectBox, shift=0.0):
    """Halve along the longer side; ``shift`` moves the cut off centre (fraction of side)."""
    if box.width >= box.height:
        cut = box.sigma_min + box.width * (0.5 + shift)
        return replace(box, sigma_max=cut), replace(box, sigma_min=cut)
    cut = box.t_min + box.height * (0.5 + shift)
    return replace(box, t_max=cut), replace(box, t_min=cut)


_CUT_SHIFTS = (0.0, 0.0137, -0.0211, 0.0419, -0.0577, 0.0893, -0.113, 0.149)


def _subdivide(box, parent: WindingResult, kind, params, policy):
    """Split a box into two children whose counts add up to the parent's.

    Only the first child is integrated; the second is the difference, so the
    shared cut is the only new contour.  A zero on the cut moves the cut.
    """
    last = None
    for shift in _CUT_SHIFTS:
        first, second = _split(box, shift)
        try:
            w1 = winding(first, kind, params, policy, nudge=False)
        except ZeroOnBoundary as exc:
            last = exc
            continue
        if w1.count > parent.count:
            raise NonIntegerWinding(f"child count {w1.count} exceeds parent {parent.count}")
        w2 = WindingResult(parent.count - w1.count, parent.zero_sum - w1.zero_sum,
                           w1.edge_min_modulus, parent.raw - w1.raw, second)
        return (first, w1), (second, w2)
    raise last


def locate_zeros(box: RectBox, kind: str, params: Params,
                 policy: PrecisionPolicy = DEFAULT_POLICY, max_depth: int = 40,
                 threads: int | None = None) -> list[ZeroRecord]:
    """All zeros of f = L or L' inside ``box``, each refined and certified.

    The sum of multiplicities equals the winding count of the (possibly
    nudged) box.  Records are sorted by t, then sigma.
    """
    _check_kind(kind)
    if box.height > 100.0 + 1e-9:
        raise DomainError("box height is limited to 100")
    root = winding(box, kind, params, policy)
    work = root.box
    threads = threads or thread_cap()
    level = [(work, root, 0)] if root.count else []
    leaves = []
    while level:
        split_now = []
        for b, w, depth in level:
            if w.count == 1:
                leaves.append((b, w))
            elif depth >= max_depth or max(b.width, b.height) < 1e-7:
                leaves.append((b, w))
            else:
                split_now.append((b, w, depth))

        def work_item(item):
            b, w, depth = item
            return [(cb, cw, depth + 1) for cb, cw in _subdivide(b, w, kind, params, policy)]

        if threads > 1 and len(split_now) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                children = list(pool.map(work_item, split_now))
        else:
            children = [work_item(x) for x in split_now]
        level = [c for group in children for c in group if c[1].count > 0]

    def refine_leaf(item):
        b, w = item
        seed = w.zero_sum / w.count
        rec = refine_zero(seed, kind, params, policy, box=b)
        if w.count > 1:
            rec.multiplicity = w.count
            rec.warning = f"multiplicity {w.count} (unresolved cluster)"
        if not b.contains(rec.location):
            raise NoConvergence(f"refined zero {rec.location} left its box {b.as_tuple()}")
        if w.count == 1 and abs(rec.location - w.zero_sum) > 1e-6 * max(1.0, abs(w.zero_sum)):
            raise NonIntegerWinding(
                f"zero sum {w.zero_sum} disagrees with refined zero {rec.location}")
        return rec

    if threads > 1 and len(leaves) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(refine_leaf, leaves))
    else:
        records = [refine_leaf(x) for x in leaves]
    total = sum(r.multiplicity for r in records)
    if total != root.count:
        raise LerchError(f"multiplicities sum to {total}, winding count is {root.count}")
    records.sort(key=lambda r: (r.location.imag, r.location.real))
    return records


def nearest_zero_distance(s, zeros) -> float:
    """Distance from ``s`` to the closest zero in the list."""
    if not zeros:
        raise EmptyList("no zeros given")
    s = complex(s)
    locs = np.array([complex(z.location if isinstance(z, ZeroRecord) else z) for z in zeros])
    return float(np.min(np.abs(locs - s)))
