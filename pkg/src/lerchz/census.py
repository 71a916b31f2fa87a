"""Aggregate zero lists into counts, line scans, pairings and zero-free rings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IncompleteBox
from .evaluate import taylor_batch
from .types import DEFAULT_POLICY, Params, PrecisionPolicy
from .zeros import RectBox, ZeroRecord, locate_zeros, winding

SIGMA_LEFT = -2.0
SIGMA1 = 3.0          # right edge of the derivative's strip
DEFAULT_ETA = 1e-6


def _right_edge_L(params: Params) -> float:
    # L does not vanish for sigma >= 1 + alpha; leave half a unit of room
    return 1.0 + params.alpha + 0.5


def expected_count(params: Params, T: float, kind: str = "L") -> float:
    """Main term of the zero-counting function up to height T.

    L:  (T / 2 pi) log(T / (2 pi e alpha lam))
    L': (T / 2 pi) log(T / (2 pi e ([lam] + lam) lam))
    """
    lam, alpha = params.lam, params.alpha
    if kind == "L":
        c = alpha * lam
    elif kind == "Lprime":
        c = (math.floor(lam) + lam) * lam
    else:
        raise DomainError(f"unknown kind {kind!r}")
    scale = 2 * math.pi * math.e * c
    if not T > scale:
        raise DomainError(f"T must exceed {scale:.4g} for the main term")
    return T / (2 * math.pi) * math.log(T / scale)


@dataclass
class CensusReport:
    params: Params
    box: RectBox
    count_L: int
    count_Lprime: int
    main_term_L: float
    main_term_Lprime: float
    near_line: list
    off_line: list
    eta: float
    zeros_L: list = field(default_factory=list)
    zeros_Lprime: list = field(default_factory=list)
    M: int = 0
    M_prime: int = 0
    sigma1: float = SIGMA1
    box_Lprime: RectBox | None = None

    @property
    def left_difference(self) -> int:
        """|M - M'|: zeros of L and of L' left of sigma = 1/2 - eta."""
        return abs(self.M - self.M_prime)


def _safe_main(params, T, kind):
    try:
        return expected_count(params, T, kind)
    except DomainError:
        return float("nan")


def census(params: Params, T: float, U: float, eta: float = DEFAULT_ETA,
           policy: PrecisionPolicy = DEFAULT_POLICY, sigma1: float = SIGMA1) -> CensusReport:
    """Locate zeros of L and L' with T < t < T + U and compare the left-of-line counts.

    The straight line sigma = 1/2 stands in for the theorem's curve; zeros
    within ``eta`` of it are reported as near-line and are not counted as
    left of the line.  L zeros are located over the whole strip so that
    off-line zeros come with their mirror partners.
    """
    if not (U > 0 and U <= T):
        raise DomainError("need 0 < U <= T")
    if eta <= 0:
        raise DomainError("eta must be positive")
    box_L = RectBox(SIGMA_LEFT, _right_edge_L(params), T, T + U)
    box_P = RectBox(SIGMA_LEFT, sigma1, T, T + U)
    zl = locate_zeros(box_L, "L", params, policy)
    zp = locate_zeros(box_P, "Lprime", params, policy)
    near = [z for z in zl if abs(z.beta - 0.5) < eta]
    off = [z for z in zl if abs(z.beta - 0.5) >= eta]
    left = 0.5 - eta
    m = sum(z.multiplicity for z in zl if z.beta <= left)
    mp = sum(z.multiplicity for z in zp if z.beta <= left)
    main_l = _safe_main(params, T + U, "L") - _safe_main(params, T, "L")
    main_p = _safe_main(params, T + U, "Lprime") - _safe_main(params, T, "Lprime")
    return CensusReport(params, box_L, sum(z.multiplicity for z in zl),
                        sum(z.multiplicity for z in zp), main_l, main_p, near, off, eta,
                        zl, zp, m, mp, sigma1, box_P)


def count_zeros(params: Params, T: float, kind: str = "L",
                policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Number of zeros with 0 < t < T in the nontrivial strip (winding only)."""
    right = _right_edge_L(params) if kind == "L" else SIGMA1
    return winding(RectBox(SIGMA_LEFT, right, 0.0, T), kind, params, policy).count


@dataclass
class DReport:
    T_grid: list
    counts: list
    main_terms: list
    ratios: list
    max_ratio: float
    D_candidate: float
    passed: bool


def check_D_bound(params: Params, T_grid, D_candidate: float, counts=None,
                  policy: PrecisionPolicy = DEFAULT_POLICY) -> DReport:
    """max over T of |N(T) - (T/2 pi) log(T / 2 pi e lam^2)| / log T against a candidate D."""
    T_grid = [float(T) for T in T_grid]
    if counts is None:
        counts = [count_zeros(params, T, "L", policy) for T in T_grid]
    lam = params.lam
    mains, ratios = [], []
    for T, n in zip(T_grid, counts):
        main = T / (2 * math.pi) * math.log(T / (2 * math.pi * math.e * lam * lam))
        mains.append(main)
        ratios.append(abs(n - main) / math.log(T))
    worst = max(ratios)
    return DReport(T_grid, list(counts), mains, ratios, worst, D_candidate, worst < D_candidate)


# ---------------------------------------------------------------------------
# line scans
# ---------------------------------------------------------------------------

@dataclass
class LineSample:
    t: float
    value: float | None        # Re L'/L, None when skipped
    minus_log_t: float
    minus_half_log_t: float
    note: str = ""


def _distance_to_zero(params, s, policy, cap=0.05, iters=30):
    """Distance from s to a nearby zero of L, found by Newton from s (inf if none close)."""
    z = complex(s)
    for _ in range(iters):
        d, _ = taylor_batch(params.lam, params.alpha, np.array([z]), 1, policy)
        f, fp = complex(d[0, 0]), complex(d[0, 1])
        if fp == 0:
            return math.inf
        step = f / fp
        z -= step
        if abs(z - s) > 4 * cap:
            return math.inf
        if abs(step) < 1e-13 * max(1.0, abs(z)):
            return abs(z - s)
    return math.inf


def line_scan(params: Params, sigma: float, t_range, step: float,
              policy: PrecisionPolicy = DEFAULT_POLICY, zeros=None,
              min_distance: float = 1e-3) -> list[LineSample]:
    """Re(L'/L) along sigma + it, with the reference curves -log t and -(1/2) log t.

    Points within ``min_distance`` of a zero are skipped and annotated.  The
    zero list is used when given; otherwise a local Newton search decides.
    """
    t0, t1 = float(t_range[0]), float(t_range[1])
    if not (t1 >= t0 and step > 0):
        raise DomainError("need t_range (t0, t1) with t1 >= t0 and step > 0")
    n = int(math.floor((t1 - t0) / step + 1e-9)) + 1
    ts = t0 + step * np.arange(n)
    pts = sigma + 1j * ts
    d, _ = taylor_batch(params.lam, params.alpha, pts, 1, policy)
    ratio = d[:, 1] / d[:, 0]
    locs = None
    if zeros is not None:
        locs = np.array([complex(z.location if isinstance(z, ZeroRecord) else z)
                         for z in zeros])
    out = []
    for i, t in enumerate(ts):
        lt = math.log(t) if t > 0 else float("nan")
        if locs is not None and len(locs):
            dist = float(np.min(np.abs(locs - pts[i])))
        elif abs(ratio[i]) > 1.0 / 0.05:
            dist = _distance_to_zero(params, pts[i], policy)
        else:
            dist = math.inf
        if dist < min_distance or not np.isfinite(ratio[i]):
            out.append(LineSample(float(t), None, -lt, -0.5 * lt,
                                  f"SampleNearZero (distance {dist:.2e})"))
            continue
        out.append(LineSample(float(t), float(ratio[i].real), -lt, -0.5 * lt))
    return out


# ---------------------------------------------------------------------------
# pairing and rings
# ---------------------------------------------------------------------------

@dataclass
class Pair:
    rho: ZeroRecord
    partner_nearest: ZeroRecord
    mirror_point: complex
    mismatch: float
    self_paired: bool = False


@dataclass
class PairReport:
    pairs: list
    unpaired: list

    @property
    def off_line_pairs(self):
        return [p for p in self.pairs if not p.self_paired]


def _as_record(z):
    if isinstance(z, ZeroRecord):
        return z
    loc = complex(z)
    pad = 1e-3
    box = RectBox(loc.real - pad, loc.real + pad, loc.imag - pad, loc.imag + pad)
    return ZeroRecord(loc, "L", 0.0, 1, box, 0)


def mirror(s) -> complex:
    """The reflection s -> 1 - conj(s) in the critical line."""
    s = complex(s)
    return 1.0 - s.conjugate()


def pair_scan(zeros, eta: float = DEFAULT_ETA, box: RectBox | None = None) -> PairReport:
    """Match every zero with the zero nearest to its mirror image 1 - conj(rho).

    Zeros within ``eta`` of the critical line are self-paired.  With ``box``
    given, a mirror point outside it raises IncompleteBox.
    """
    recs = [_as_record(z) for z in zeros]
    locs = np.array([r.location for r in recs], dtype=complex)
    pairs, unpaired = [], []
    for i, r in enumerate(recs):
        m = mirror(r.location)
        if abs(r.beta - 0.5) < eta:
            pairs.append(Pair(r, r, m, abs(r.location - m), True))
            continue
        if box is not None and not box.contains(m, strict=False):
            raise IncompleteBox(f"mirror point {m} of {r.location} lies outside the scanned box")
        others = [j for j in range(len(recs)) if j != i]
        if not others:
            unpaired.append(r)
            continue
        dist = np.abs(locs[others] - m)
        j = others[int(np.argmin(dist))]
        pairs.append(Pair(r, recs[j], m, float(dist.min())))
    return PairReport(pairs, unpaired)


@dataclass
class Ring:
    r_inner: float | None
    r_outer: float | None

    @property
    def ratio(self) -> float:
        if self.r_inner is None or self.r_outer is None:
            return 1.0
        return self.r_outer / self.r_inner

    @property
    def degenerate(self) -> bool:
        return self.r_inner is None or self.r_outer is None or self.r_outer <= self.r_inner


def geometric_radii(r_min=1e-6, r_max=1.0, n=121):
    return np.geomspace(r_min, r_max, n)


def annulus_scan(rho_prime, zeros, radii=None, exclude: float = 1e-12) -> Ring:
    """Widest-ratio zero-free ring r_inner < |s - rho'| < r_outer with radii from the grid.

    Zeros at distance below ``exclude`` (rho' itself) are ignored.
    """
    radii = np.sort(np.asarray(geometric_radii() if radii is None else radii, dtype=float))
    if radii.size < 2:
        raise DomainError("need at least two radii")
    c = complex(rho_prime.location if isinstance(rho_prime, ZeroRecord) else rho_prime)
    dist = sorted(abs(complex(z.location if isinstance(z, ZeroRecord) else z) - c)
                  for z in zeros)
    dist = [d for d in dist if d > exclude]
    edges = [0.0] + dist + [math.inf]
    best = Ring(None, None)
    for lo, hi in zip(edges[:-1], edges[1:]):
        inside = radii[(radii >= lo) & (radii <= hi)]
        # a radius equal to a zero distance would put the zero on the ring
        inside = inside[(inside > lo) | (lo == 0.0)]
        inside = inside[inside < hi]
        if inside.size < 2:
            continue
        cand = Ring(float(inside[0]), float(inside[-1]))
        if cand.ratio > best.ratio:
            best = cand
    return best
