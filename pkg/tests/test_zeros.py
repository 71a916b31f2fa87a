import mpmath as mp
import pytest

from lerchz import DomainError, EmptyList, Params, ZeroOnBoundary
from lerchz.zeros import (RectBox, ZeroRecord, circle_winding, locate_zeros, nearest_zero_distance,
                          refine_zero, residual, winding)

ZETA = Params(1, 1)
FIRST = complex(mp.zetazero(1))
SECOND = complex(mp.zetazero(2))


def zeta_zeros_below(T):
    out, k = [], 1
    while True:
        z = complex(mp.zetazero(k))
        if z.imag > T:
            return out
        out.append(z)
        k += 1


@pytest.fixture(scope="module")
def zeta_zeros_100():
    return locate_zeros(RectBox(-2, 1.5, 0, 100), "L", ZETA)


@pytest.fixture(scope="module")
def zeros_085():
    return locate_zeros(RectBox(-2, 1.5, 150, 165), "L", Params(0.85, 0.85))


# --- boxes -----------------------------------------------------------------------

def test_box_validation():
    with pytest.raises(DomainError):
        RectBox(1, 0, 0, 1)
    with pytest.raises(DomainError):
        RectBox(0, 1, 2, 2)
    with pytest.raises(DomainError):
        RectBox.parse("1,2,3")
    assert RectBox.parse("-2, 1.5, 0, 100").as_tuple() == (-2.0, 1.5, 0.0, 100.0)


# --- winding --------------------------------------------------------------------

def test_winding_first_zeta_zero():
    res = winding(RectBox(-2, 1.5, 10, 20), "L", ZETA)
    assert res.count == 1
    assert abs(res.zero_sum - FIRST) < 1e-6
    assert res.defect < 0.25


def test_winding_zero_free_half_plane():
    assert winding(RectBox(2, 3, 10, 20), "L", ZETA).count == 0


def test_winding_derivative_figure_zero():
    res = winding(RectBox(0.5, 1.5, 158, 159), "Lprime", ZETA)
    assert res.count == 1
    assert abs(res.zero_sum - (0.86 + 158.28j)) < 0.01


def test_winding_matches_zetazero_count():
    # zeros 1..10 lie below t = 50
    assert winding(RectBox(-2, 1.5, 0, 50), "L", ZETA).count == len(zeta_zeros_below(50)) == 10


def test_count_additivity():
    p = Params(0.7, 0.7)
    whole = winding(RectBox(-2, 2, 100, 120), "L", p).count
    left = winding(RectBox(-2, 0.3, 100, 120), "L", p).count
    right = winding(RectBox(0.3, 2, 100, 120), "L", p).count
    assert whole == left + right
    assert whole > 0


def test_boundary_zero_is_nudged():
    box = RectBox(-2, 1.5, FIRST.imag, 20)
    with pytest.raises(ZeroOnBoundary):
        winding(box, "L", ZETA, nudge=False)
    res = winding(box, "L", ZETA)
    assert res.nudges
    assert res.box.t_min < FIRST.imag
    assert res.count == 1


def test_pole_needs_permission():
    with pytest.raises(DomainError):
        winding(RectBox(0, 2, -1, 1), "L", ZETA)
    # zeta has no zeros near s = 1: the pole is counted back in
    assert winding(RectBox(0, 2, -1, 1, allow_pole=True), "L", ZETA).count == 0


def test_unknown_kind():
    with pytest.raises(DomainError):
        winding(RectBox(0, 1, 10, 20), "M", ZETA)


def test_circle_winding():
    assert circle_winding(FIRST, 1e-4, "L", ZETA) == 1
    assert circle_winding(FIRST + 0.01, 1e-4, "L", ZETA) == 0


# --- refine -----------------------------------------------------------------------

def test_refine_first_zero():
    z = refine_zero(0.5 + 14.1j, "L", ZETA)
    assert abs(z.location - FIRST) < 1e-10
    assert z.multiplicity == 1
    assert z.residual < 1e-10


@pytest.mark.parametrize("seed,expected", [(1.3 + 152.6j, 1.27 + 152.61j),
                                           (1.0 + 156.6j, 0.97 + 156.63j)])
def test_refine_figure_derivative_zeros(seed, expected):
    z = refine_zero(seed, "Lprime", ZETA)
    assert abs(z.location - expected) < 0.01
    assert z.residual < 1e-8


def test_refine_derivative_against_mpmath():
    z = refine_zero(0.86 + 158.28j, "Lprime", ZETA).location
    with mp.workdps(30):
        ref = complex(mp.findroot(lambda s: mp.zeta(s, 1, 1), mp.mpc(z)))
    assert abs(z - ref) < 1e-9


# --- locate ------------------------------------------------------------------------

def test_locate_zeta_zeros_below_100(zeta_zeros_100):
    ref = zeta_zeros_below(100)
    assert len(zeta_zeros_100) == len(ref) == 29
    for got, want in zip(sorted(z.location.imag for z in zeta_zeros_100), [z.imag for z in ref]):
        assert abs(got - want) < 1e-8
    assert all(abs(z.beta - 0.5) < 1e-8 for z in zeta_zeros_100)


def test_locate_half_matches_winding():
    p = Params(0.5, 0.5)
    box = RectBox(-2, 1.5, 0, 50)
    zs = locate_zeros(box, "L", p)
    assert sum(z.multiplicity for z in zs) == winding(box, "L", p).count


def test_locate_residuals_085(zeros_085):
    assert zeros_085
    assert all(z.residual < 1e-8 for z in zeros_085)
    assert all(residual("L", Params(0.85, 0.85), z.location) < 1e-8 for z in zeros_085)


def test_zero_free_left_region_085(zeros_085):
    # for lam = 0.85 the exceptional line sits far left of sigma = -2 at these heights
    assert all(z.beta >= -1 for z in zeros_085)


def test_records_are_inside_their_leaf(zeros_085):
    for z in zeros_085:
        assert z.provenance.contains(z.location, strict=False)
        assert z.kind == "L" and z.lam == 0.85


# --- nearest distance -------------------------------------------------------------------

def _rec(loc):
    return ZeroRecord(loc, "L", 0.0, 1, RectBox(-2, 2, 0, 200), 0)


def test_nearest_zero_distance(zeta_zeros_100):
    assert nearest_zero_distance(0.5 + 14.134725j, [_rec(FIRST)]) < 1e-6
    assert abs(nearest_zero_distance(0.5 + 0.3j, [_rec(0.5 + 0j)]) - 0.3) < 1e-15
    d = nearest_zero_distance(0.5 + 20j, zeta_zeros_100)
    assert abs(d - abs(SECOND - (0.5 + 20j))) < 1e-8
    with pytest.raises(EmptyList):
        nearest_zero_distance(0.5, [])

