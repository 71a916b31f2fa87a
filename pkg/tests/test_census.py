import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lerchz import DomainError, IncompleteBox, Params
from lerchz.census import (annulus_scan, census, check_D_bound, count_zeros, expected_count,
                           geometric_radii, line_scan, mirror, pair_scan)
from lerchz.zeros import RectBox, ZeroRecord, locate_zeros, winding

ZETA = Params(1, 1)


def _rec(loc, kind="L"):
    return ZeroRecord(complex(loc), kind, 0.0, 1, RectBox(-2, 3, 0, 300), 0)


# --- expected_count -----------------------------------------------------------------

def test_expected_count_zeta():
    v = expected_count(ZETA, 100)
    assert abs(v - 100 / (2 * math.pi) * math.log(100 / (2 * math.pi * math.e))) < 1e-12
    assert abs(v - 28.13) < 0.01


def test_expected_count_derivative_at_one():
    # with [1] + 1 = 2 the derivative's main term is not the same as the function's
    p = expected_count(ZETA, 100, "Lprime")
    assert abs(p - 100 / (2 * math.pi) * math.log(100 / (4 * math.pi * math.e))) < 1e-12
    assert p < expected_count(ZETA, 100)


def test_expected_count_half():
    v = expected_count(Params(0.5, 0.5), 100)
    assert abs(v - 100 / (2 * math.pi) * math.log(100 / (2 * math.pi * math.e / 4))) < 1e-12


def test_expected_count_domain():
    with pytest.raises(DomainError):
        expected_count(ZETA, 10)
    with pytest.raises(DomainError):
        expected_count(ZETA, 100, "X")


# --- census ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def zeta_census():
    return census(ZETA, 150, 15)


def test_census_zeta_band(zeta_census):
    ref = [complex(mp.zetazero(k)) for k in range(mp.nzeros(150) + 1, mp.nzeros(165) + 1)]
    assert zeta_census.count_L == len(ref) == 8
    assert len(zeta_census.near_line) == 8 and not zeta_census.off_line
    got = sorted(z.gamma for z in zeta_census.zeros_L)
    assert np.allclose(got, [z.imag for z in ref], atol=1e-8)
    assert zeta_census.count_L == len(zeta_census.near_line) + len(zeta_census.off_line)


def test_census_matches_winding(zeta_census):
    assert zeta_census.count_L == winding(zeta_census.box, "L", ZETA).count
    assert zeta_census.count_Lprime == winding(zeta_census.box_Lprime, "Lprime", ZETA).count


def test_census_main_terms(zeta_census):
    assert abs(zeta_census.main_term_L
               - (expected_count(ZETA, 165) - expected_count(ZETA, 150))) < 1e-12


def test_census_empty_gap():
    # zeta zeros 35 and 36 sit at 150.93 and 153.02
    rep = census(ZETA, 151.5, 0.1)
    assert rep.count_L == 0 and rep.M == 0 and rep.M_prime == 0


def test_census_validation():
    with pytest.raises(DomainError):
        census(ZETA, 10, 20)
    with pytest.raises(DomainError):
        census(ZETA, 100, 10, eta=0)


# --- D bound ----------------------------------------------------------------------------

ZETA_COUNTS = [10, 29, 52, 79]     # zeta zeros below 50, 100, 150, 200


def test_zeta_counts_against_mpmath():
    assert [int(mp.nzeros(T)) for T in (50, 100, 150, 200)] == ZETA_COUNTS


def test_count_zeros_small_heights():
    assert count_zeros(ZETA, 50) == ZETA_COUNTS[0]
    assert count_zeros(ZETA, 100) == ZETA_COUNTS[1]


def test_D_bound_pass_and_fail():
    grid = [50, 100, 150, 200]
    rep = check_D_bound(ZETA, grid, 0.5, counts=ZETA_COUNTS)
    assert rep.passed and rep.max_ratio < 0.5
    assert not check_D_bound(ZETA, grid, 0.0, counts=ZETA_COUNTS).passed


def test_D_bound_half_is_reported():
    rep = check_D_bound(Params(0.5, 0.5), [50, 100], 0.16)
    assert len(rep.ratios) == 2 and all(r >= 0 for r in rep.ratios)
    assert rep.counts[0] == count_zeros(Params(0.5, 0.5), 50)


# --- line scans ----------------------------------------------------------------------------

def test_line_scan_left_of_strip_single_point():
    (smp,) = line_scan(ZETA, -2.0, (100, 100), 1.0)
    assert abs(smp.value - (-math.log(100))) < 3


def test_line_scan_left_of_strip_slope():
    samples = line_scan(ZETA, -2.0, (50, 200), 1.0)
    t = np.array([x.t for x in samples])
    v = np.array([x.value for x in samples])
    slope = np.polyfit(np.log(t), v, 1)[0]
    assert abs(slope + 1) < 0.2


def test_line_scan_reference_columns():
    samples = line_scan(ZETA, -2.0, (50, 52), 1.0)
    assert [x.t for x in samples] == [50.0, 51.0, 52.0]
    assert samples[1].minus_log_t == -math.log(51)
    assert samples[1].minus_half_log_t == -0.5 * math.log(51)


def test_line_scan_critical_line_half():
    p = Params(0.5, 0.5)
    zs = locate_zeros(RectBox(-2, 2, 49, 121), "L", p)
    samples = line_scan(p, 0.5, (50, 120), 0.5, zeros=zs)
    kept = [x for x in samples if x.value is not None]
    assert len(kept) > 0.9 * len(samples)
    assert all(abs(x.value - x.minus_half_log_t) <= 3 for x in kept)


def test_line_scan_skips_zero():
    first = complex(mp.zetazero(1))
    samples = line_scan(ZETA, 0.5, (first.imag, first.imag), 1.0)
    assert samples[0].value is None and "SampleNearZero" in samples[0].note
    samples = line_scan(ZETA, 0.5, (first.imag, first.imag), 1.0, zeros=[_rec(first)])
    assert samples[0].value is None


def test_line_scan_validation():
    with pytest.raises(DomainError):
        line_scan(ZETA, -2, (10, 5), 1.0)


# --- pairing -----------------------------------------------------------------------------------

def test_pair_scan_zeta_self_paired(zeta_census):
    rep = pair_scan(zeta_census.zeros_L)
    assert all(p.self_paired for p in rep.pairs)
    assert all(p.mismatch < 1e-8 for p in rep.pairs)


def test_pair_scan_synthetic_exact_mirror():
    rep = pair_scan([0.6 + 100j, 0.4 + 100j])
    assert len(rep.off_line_pairs) == 2
    assert all(p.mismatch == 0 for p in rep.pairs)


def test_pair_scan_lone_zero_unpaired():
    rep = pair_scan([0.7 + 50j])
    assert rep.unpaired and not rep.pairs


def test_pair_scan_incomplete_box():
    with pytest.raises(IncompleteBox):
        pair_scan([1.4 + 100j], box=RectBox(0, 1.5, 90, 110))


def test_pairs_at_080_are_near_symmetric():
    p = Params(0.8, 0.8)
    box = RectBox(-2, 3, 140, 165)
    zs = locate_zeros(box, "L", p)
    rep = pair_scan(zs, box=box)
    assert rep.off_line_pairs
    assert all(pr.mismatch < 0.05 for pr in rep.off_line_pairs)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(-2, 3), st.floats(0, 300)), min_size=1, max_size=20))
def test_mirror_is_an_involution(pts):
    # 1 - (1 - beta) is exact for beta in [1/2, 2] and within an ulp of 1 elsewhere
    for b, t in pts:
        back = mirror(mirror(complex(b, t)))
        assert back.imag == t
        assert abs(back.real - b) <= 2 * np.finfo(float).eps
    assert mirror(mirror(0.5 + 14j)) == 0.5 + 14j


# --- rings ----------------------------------------------------------------------------------------

def test_annulus_isolated_neighbour():
    ring = annulus_scan(0.5 + 10j, [0.5 + 10j, 0.8 + 10j])
    assert ring.r_inner == geometric_radii()[0]
    assert 0.28 < ring.r_outer < 0.3


def test_annulus_first_zeta_zero():
    first, second = complex(mp.zetazero(1)), complex(mp.zetazero(2))
    ring = annulus_scan(first, [first, second], radii=geometric_radii(1e-6, 20.0, 200))
    gap = abs(second - first)
    assert ring.r_outer < gap
    step = (20.0 / 1e-6) ** (1 / 199)
    assert ring.r_outer * step >= gap


def test_annulus_around_a_pair():
    c = 0.5 + 40j
    ring = annulus_scan(c, [c - 5e-4, c + 5e-4, c + 0.5])
    assert ring.r_inner > 5e-4 and ring.r_outer < 0.5
    assert not ring.degenerate
