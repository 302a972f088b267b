"""Exactness and structure tests for the torus maps and return solvers."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltmlab.core import (
    LtmSpec,
    ReturnTimeOverflow,
    TorusPoint,
    core_return,
    core_return_inv,
    h_twist,
    h_twist_inv,
    in_core,
    in_domain,
    ltm,
    ltm_inv,
    orbit,
    points_equal,
    return_time_ltm,
    v_twist,
    wrap,
)

SPEC = LtmSpec.canonical()
HALF = Fraction(1, 2)
C = TorusPoint.of(HALF, HALF)


def frac(p, q):
    return Fraction(p, q)


# ---------------------------------------------------------------------------
# the distinguished period-3 orbit


def test_center_period_three_exact():
    pts = orbit(C, SPEC, 3, map_name="ltm")
    assert pts[1] == TorusPoint.of(frac(3, 2), HALF)
    assert pts[2] == TorusPoint.of(HALF, frac(3, 2))
    assert pts[3] == C
    # no earlier return
    assert not points_equal(pts[1], C)
    assert not points_equal(pts[2], C)


def test_center_is_induced_map_fixed_point():
    out = core_return(C, SPEC)
    assert (out.j, out.k) == (2, 2)
    assert out.image == C
    assert return_time_ltm(C, SPEC) == 3 == out.j + out.k - 1


def test_center_period_three_float():
    z = TorusPoint.of(0.5, 0.5)
    pts = orbit(z, SPEC, 3, map_name="ltm")
    assert points_equal(pts[3], z, tol=1e-15)


# ---------------------------------------------------------------------------
# twist mechanics and wrapping


def test_h_twist_wraps_mod_two():
    # slope two: (x, y) -> (x + 2y, y) on the horizontal annulus
    z = TorusPoint.of(frac(7, 4), frac(3, 4))
    w = h_twist(z, SPEC)
    assert w == TorusPoint.of(frac(7, 4) + frac(3, 2) - 2, frac(3, 4))


def test_h_twist_identity_off_annulus():
    z = TorusPoint.of(frac(1, 4), frac(5, 4))
    assert h_twist(z, SPEC) == z


def test_twists_invert_exactly():
    z = TorusPoint.of(frac(9, 16), frac(13, 16))
    assert h_twist_inv(h_twist(z, SPEC), SPEC) == z
    assert v_twist(z, SPEC) != z
    assert ltm_inv(ltm(z, SPEC), SPEC) == z


def test_points_outside_domain_are_fixed():
    # the square complementary to both annuli
    z = TorusPoint.of(frac(3, 2), frac(3, 2))
    assert not in_domain(z, SPEC)
    assert ltm(z, SPEC) == z
    assert orbit(z, SPEC, 5, map_name="ltm")[-1] == z


def test_membership_is_closed_on_boundaries():
    assert in_core(TorusPoint.of(0, 0), SPEC)
    assert in_core(TorusPoint.of(1, 1), SPEC)
    assert in_core(TorusPoint.of(Fraction(1), HALF), SPEC)
    assert not in_core(TorusPoint.of(frac(17, 16), HALF), SPEC)
    assert in_domain(TorusPoint.of(frac(3, 2), Fraction(1)), SPEC)


def test_wrap_range():
    assert wrap(Fraction(2)) == 0
    assert wrap(frac(-1, 4)) == frac(7, 4)
    assert wrap(2.0) == 0.0
    assert 0.0 <= wrap(-0.25) < 2.0


# ---------------------------------------------------------------------------
# return solver: skip formula versus plain iteration


@given(
    st.fractions(min_value=0, max_value=1).filter(lambda v: 0 < v < 1),
    st.fractions(min_value=0, max_value=1).filter(lambda v: 0 < v < 1),
)
@settings(max_examples=60, deadline=None)
def test_return_identity_rational(xf, yf):
    z = TorusPoint.of(xf, yf)
    out = core_return(z, SPEC, cap=200_000)
    assert in_core(out.image, SPEC)
    assert out.j >= 1 and out.k >= 1
    assert return_time_ltm(z, SPEC, cap=200_000) == out.j + out.k - 1


@given(
    st.fractions(min_value=0, max_value=1).filter(lambda v: 0 < v < 1),
    st.fractions(min_value=0, max_value=1).filter(lambda v: 0 < v < 1),
)
@settings(max_examples=40, deadline=None)
def test_skip_matches_iterated_composed_map(xf, yf):
    z = TorusPoint.of(xf, yf)
    out = core_return(z, SPEC, cap=100_000)
    n = out.j + out.k - 1
    if n > 2_000:  # keep the explicit orbit cheap
        return
    assert orbit(z, SPEC, n, map_name="ltm")[-1] == out.image


@given(
    st.fractions(min_value=0, max_value=1).filter(lambda v: 0 < v < 1),
    st.fractions(min_value=0, max_value=1).filter(lambda v: 0 < v < 1),
)
@settings(max_examples=40, deadline=None)
def test_inverse_return_inverts(xf, yf):
    z = TorusPoint.of(xf, yf)
    try:
        fwd = core_return(z, SPEC, cap=100_000)
    except ReturnTimeOverflow:
        return  # adversarial denominators can outrun any fixed cap
    back = core_return_inv(fwd.image, SPEC, cap=100_000)
    assert back.image == z
    assert (back.j, back.k) == (fwd.j, fwd.k)


def test_float_and_rational_backends_agree():
    pts = [(0.375, 0.8125), (0.09375, 0.21875), (0.9921875, 0.0078125)]
    for x, y in pts:
        a = core_return(TorusPoint.of(x, y), SPEC)
        b = core_return(TorusPoint.of(Fraction(x), Fraction(y)), SPEC)
        assert (a.j, a.k) == (b.j, b.k)
        assert math.isclose(float(b.image.x), a.image.x, abs_tol=1e-12)
        assert math.isclose(float(b.image.y), a.image.y, abs_tol=1e-12)


def test_overflow_raises_with_small_cap():
    # x just under one, advancing by a sliver per twist step: leaves the
    # core square on step one and takes ~10^6 steps to wrap back around
    z = TorusPoint.of(frac(9_999_999, 10_000_000), frac(1, 2_000_000))
    with pytest.raises(ReturnTimeOverflow):
        core_return(z, SPEC, cap=50)


def test_orbit_core_map_steps_by_returns():
    zs = orbit(C, SPEC, 2, map_name="core")
    assert zs == [C, C, C]


# ---------------------------------------------------------------------------
# invariance of area under the composed map (Monte Carlo, fixed seed)


def test_measure_preservation_under_composed_map():
    import numpy as np

    from ltmlab import vectorized as vec

    x, y = vec.sample_domain(123, 9_999, 0, 200_000, SPEC)
    m0 = float(np.mean((x <= 1.0) & (y <= 1.0)))
    for _ in range(4):
        x, y = vec.ltm_step(x, y, SPEC)
    m4 = float(np.mean((x <= 1.0) & (y <= 1.0)))
    # indicator mean of the core square is invariant; binomial noise only
    assert abs(m4 - m0) < 4.0 * math.sqrt(0.25 / 200_000)


def test_parity_involution_commutes():
    # (x, y) -> (1-x, 1-y) mod 2 commutes with both twists when the twist
    # slopes are even; this is what kills odd/even cross-correlations
    for x, y in [(frac(3, 16), frac(5, 8)), (frac(9, 8), frac(1, 3)),
                 (frac(1, 7), frac(13, 7))]:
        z = TorusPoint.of(x, y)
        rz = TorusPoint.of(wrap(1 - x), wrap(1 - y))
        img, rimg = ltm(z, SPEC), ltm(rz, SPEC)
        assert rimg == TorusPoint.of(wrap(1 - img.x), wrap(1 - img.y))
