"""One pass/fail line per acceptance criterion, printed in the terminal summary.

Tolerances are fixed here and never loosened; a criterion that misses prints
FAIL with the measured numbers.
"""

import math
import time

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings

import conftest
import test_properties as props
from lerchz import Params, lerch
from lerchz.census import census, count_zeros, expected_count, line_scan, pair_scan
from lerchz.evaluate import fe_grid, fe_residuals
from lerchz.trajectory import detect_line_crossings, trace_Lprime_zero
from lerchz.zeros import RectBox, locate_zeros, refine_zero

pytestmark = pytest.mark.slow


def record(num, ok, text):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}"
    conftest.ACCEPTANCE_LINES[num] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def census_085():
    return census(Params(0.85, 0.85), 150, 15)


def test_criterion_1_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20261016)
    worst, used = 0.0, 0
    with mp.workdps(30):
        while used < 200:
            s = complex(rng.uniform(-3, 3), rng.uniform(1, 200))
            z = complex(mp.zeta(s))
            if abs(z) < 1e-3:          # too close to a zero for a relative measure
                continue
            a = lerch(Params(1, 1), s).value
            b = lerch(Params(1, 0.5), s).value
            ref_b = complex((mp.mpf(2) ** s - 1) * mp.zeta(s))
            worst = max(worst, abs(a - z) / abs(z), abs(b - ref_b) / abs(ref_b))
            used += 1
    dt = time.perf_counter() - t0
    record(1, worst < 1e-8 and dt < 60,
           f"identity suite max rel dev {worst:.2e} (< 1e-8) over {used} points, {dt:.1f}s (< 60s)")


def test_criterion_2_functional_equation():
    t0 = time.perf_counter()
    grid = fe_grid(100)
    worst = {lam: float(fe_residuals(lam, grid).max()) for lam in (0.3, 0.5, 0.7, 1.0)}
    dt = time.perf_counter() - t0
    top = max(worst.values())
    detail = ", ".join(f"{k:g}: {v:.1e}" for k, v in worst.items())
    record(2, top < 1e-7 and dt < 120,
           f"reflection residual max {top:.2e} (< 1e-7) [{detail}], {dt:.1f}s (< 120s)")


def test_criterion_3_zeta_zeros():
    t0 = time.perf_counter()
    zs = locate_zeros(RectBox(-2, 1.5, 0, 100), "L", Params(1, 1))
    dt = time.perf_counter() - t0
    ref = [complex(mp.zetazero(k)).imag for k in range(1, int(mp.nzeros(100)) + 1)]
    dev = max(abs(z.beta - 0.5) for z in zs)
    res = max(z.residual for z in zs)
    match = len(zs) == len(ref) and np.allclose(sorted(z.gamma for z in zs), ref, atol=1e-8)
    ok = len(zs) == 29 and match and dev < 1e-8 and res < 1e-8 and dt < 300
    record(3, ok, f"{len(zs)} zeros (== 29, oracle agrees: {match}), max |beta-1/2| {dev:.1e}, "
                  f"max residual {res:.1e}, {dt:.1f}s (< 300s)")


def test_criterion_4_count_envelope():
    rows, ok = [], True
    for lam in (1.0, 0.5):
        p = Params(lam, lam)
        for T in (50, 100, 150, 200):
            n = count_zeros(p, T)
            main = T / (2 * math.pi) * math.log(T / (2 * math.pi * math.e * lam * lam))
            gap = abs(n - main)
            ok &= gap <= 2 * math.log(T)
            if lam == 1.0:
                ok &= n == int(mp.nzeros(T))
            rows.append(f"{lam:g}/{T}: {n} ({gap:.2f} <= {2 * math.log(T):.2f})")
    record(4, ok, "|N - main| <= 2 log T; " + ", ".join(rows))


def test_criterion_5_figure_one():
    t0 = time.perf_counter()
    seeds = [(1.3 + 152.6j, 1.27 + 152.61j), (1.0 + 156.6j, 0.97 + 156.63j),
             (0.86 + 158.28j, 0.86 + 158.28j)]
    ok, parts, trajs = True, [], []
    for seed, want in seeds:
        z = refine_zero(seed, "Lprime", Params(1, 1)).location
        # agreement to 2 decimal places after rounding (1.2660 -> 1.27)
        hit = (round(z.real * 100) == round(want.real * 100)
               and round(z.imag * 100) == round(want.imag * 100))
        ok &= hit
        traj = trace_Lprime_zero(1.0, z, 0.5)
        trajs.append(traj)
        worst = float(traj.residuals.max())
        ok &= (not traj.truncated) and traj.samples[-1][0] == 0.5 and worst < 1e-8
        parts.append(f"{z.real:.4f}+{z.imag:.4f}i ({len(traj)} samples, max res {worst:.0e})")
    crossings = detect_line_crossings(trajs[1])
    dt = time.perf_counter() - t0
    ok &= len(crossings) >= 1 and dt < 600
    lams = ", ".join(f"{c[0]:.6f}" for c in crossings)
    record(5, ok, "; ".join(parts) + f"; middle crossings at lambda {lams}; {dt:.0f}s (< 600s)")


def test_criterion_6_theorem_one_proxy(census_085):
    rep = census_085
    ok = rep.left_difference <= 5
    record(6, ok, f"lambda=0.85 T=150 U=15: count_L {rep.count_L}, count_L' {rep.count_Lprime}, "
                  f"left of line M={rep.M} M'={rep.M_prime}, |M-M'| = {rep.left_difference} (<= 5)")


def test_criterion_7_line_bands():
    worst_left, worst_mid, skipped, ok = 0.0, 0.0, 0, True
    for lam in (1.0, 0.85, 0.5):
        p = Params(lam, lam)
        for smp in line_scan(p, -2.0, (50, 200), 0.25):
            worst_left = max(worst_left, abs(smp.value - smp.minus_log_t))
        zs = (locate_zeros(RectBox(-2, 2.5, 49, 125), "L", p)
              + locate_zeros(RectBox(-2, 2.5, 125, 201), "L", p))
        for smp in line_scan(p, 0.5, (50, 200), 0.25, zeros=zs, min_distance=1e-3):
            if smp.value is None:
                skipped += 1
                continue
            worst_mid = max(worst_mid, abs(smp.value - smp.minus_half_log_t))
    ok = worst_left <= 4 and worst_mid <= 4
    record(7, ok, f"max |Re L'/L + log t| on sigma=-2: {worst_left:.2f} (<= 4); "
                  f"max |Re L'/L + (1/2)log t| on sigma=1/2: {worst_mid:.2f} (<= 4), "
                  f"{skipped} samples within 1e-3 of a zero skipped")


def test_criterion_8_pairing(census_085):
    rep = pair_scan(census_085.zeros_L, census_085.eta, census_085.box)
    off = rep.off_line_pairs
    mism = [p.mismatch for p in off]
    ok = all(1e-9 < m < 0.05 for m in mism) and not rep.unpaired
    if off:
        text = (f"{len(off)} off-line zeros, mismatch range "
                f"[{min(mism):.2e}, {max(mism):.2e}] (need > 1e-9 and < 0.05)")
    else:
        text = (f"vacuous: 0 off-line zeros among {census_085.count_L} "
                f"(all within {census_085.eta:g} of sigma=1/2)")
    record(8, ok, f"lambda=0.85, t in [150,165]: {text}")


def _run_counted(check, strategies, n):
    calls = [0]

    @settings(max_examples=n, database=None)
    @given(**strategies)
    def run(**kw):
        check(**kw)
        calls[0] += 1

    run()
    return calls[0]


def test_criterion_9_property_suites():
    plan = [("conjugation", props.check_conjugation, props.conj_args, 400),
            ("catalog round-trip", props.check_catalog, props.catalog_args, 400),
            ("winding integrality", props.check_winding, props.winding_args, 150),
            ("step-halving", props.check_step_halving, props.halving_args, 50)]
    done, failures, parts = 0, 0, []
    for name, check, strat, n in plan:
        try:
            k = _run_counted(check, strat, n)
            parts.append(f"{name} {k}")
            done += k
        except Exception as exc:        # a falsified property
            failures += 1
            parts.append(f"{name} FAILED ({type(exc).__name__})")
    ok = failures == 0 and done >= 1000
    record(9, ok, f"{done} randomized cases, {failures} failing suites ({', '.join(parts)})")
