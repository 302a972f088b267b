"""Branch-derivative, cone, and eigenvalue tests for the tangent cocycle."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltmlab.cocycle import (
    CORNER_PATTERNS,
    ONE_STEP_SERIES_LIMIT,
    BranchMismatch,
    Mat2,
    NotHyperbolic,
    branch_matrix,
    cone_step,
    cone_sweep,
    corner_branch_matrix,
    in_stable_cone,
    in_unstable_cone,
    lyapunov_ensemble,
    numeric_jacobian,
    one_step_partial_series,
    spectral_radius,
    stable_direction,
    two_step_branch_matrix,
    two_step_corner_eigenvalue,
    unstable_direction,
)
from ltmlab.core import LtmSpec, TorusPoint

SPEC = LtmSpec.canonical()
SQRT2 = math.sqrt(2.0)


def test_one_one_branch_is_the_textbook_composite():
    m = branch_matrix(1, 1, SPEC)
    assert m.rows() == ((1, 2), (2, 5))


def test_two_two_branch_at_the_center():
    m = branch_matrix(2, 2, SPEC)
    assert m.rows() == ((1, 4), (4, 17))
    assert m.trace() == 18  # 4jk + 2


@given(st.integers(1, 500), st.integers(1, 500))
@settings(max_examples=80, deadline=None)
def test_branch_matrix_determinant_one(j, k):
    m = branch_matrix(j, k, SPEC)
    assert m.det() == 1
    assert m.trace() == 4 * j * k + 2


@given(st.integers(1, 200), st.integers(1, 200))
@settings(max_examples=40, deadline=None)
def test_branch_inverse_exact(j, k):
    m = branch_matrix(j, k, SPEC)
    ident = m @ m.inv()
    assert ident.rows() == ((1, 0), (0, 1))


def test_spectral_radius_closed_form():
    for n in (1, 2, 7, 100, 10_000):
        lam = spectral_radius(branch_matrix(n, 1, SPEC))
        want = 1 + 2 * n + math.sqrt(4.0 * n * (n + 1))
        assert abs(lam - want) <= 1e-12 * want


def test_spectral_radius_rejects_parabolic():
    with pytest.raises(NotHyperbolic):
        spectral_radius(Mat2(1, 2, 0, 1))  # a bare shear


def test_stable_direction_of_the_composite():
    # contracting eigenvector of [[1,2],[2,5]] lies along (1, 1 - sqrt2)
    sx, sy = stable_direction(branch_matrix(1, 1, SPEC))
    assert sx == 1.0
    assert abs(sy - (1.0 - SQRT2)) < 1e-12
    ux, uy = unstable_direction(branch_matrix(1, 1, SPEC))
    assert uy / ux > 1.0  # expanding direction sits inside the standard cone


def test_two_step_matrix_is_a_product():
    a = branch_matrix(3, 1, SPEC)
    b = branch_matrix(1, 4, SPEC)
    prod = b @ a
    assert two_step_branch_matrix(3, 1, 1, 4, SPEC).rows() == prod.rows()


def test_corner_eigenvalue_shared_by_all_four_patterns():
    n = 750
    lam = two_step_corner_eigenvalue(n)
    for name in CORNER_PATTERNS:
        m = corner_branch_matrix(name, n)
        assert m.trace() == 24 * n + 10
        assert abs(spectral_radius(m) - lam) < 1e-9 * lam


def test_one_step_series_limit():
    assert abs(one_step_partial_series(20_000) - ONE_STEP_SERIES_LIMIT) < 5e-4
    # the limit itself: ln(3 + 2 sqrt2) / 24
    assert abs(ONE_STEP_SERIES_LIMIT - math.log(3 + 2 * SQRT2) / 24) == 0.0


# ---------------------------------------------------------------------------
# cones


def test_cone_membership_edges():
    assert in_unstable_cone(1.0, 1.0)
    assert in_unstable_cone(0.0, 1.0)  # vertical counts
    assert in_unstable_cone(-1.0, -2.0)
    assert not in_unstable_cone(1.0, 0.5)
    assert in_stable_cone(1.0, -1.0)
    assert in_stable_cone(2.0, -1.0)
    assert not in_stable_cone(1.0, 1.0)


def test_cone_step_expands_interior_vector():
    rep = cone_step(TorusPoint.of(0.3, 0.4), (1.0, 2.0), SPEC)
    assert rep.in_cone
    assert rep.ratio > math.sqrt(5.0)


def test_cone_step_backward_contracts_into_stable():
    rep = cone_step(
        TorusPoint.of(0.3, 0.4), (1.0, -0.5), SPEC, direction="backward"
    )
    assert rep.in_cone
    assert rep.ratio > math.sqrt(5.0)


def test_minimum_expansion_is_sqrt29_on_the_weakest_branch():
    # the (1,1) branch attains its cone minimum on both cone edges:
    # [[1,2],[2,5]] sends (1,1) to (3,7) and (0,1) to (2,5), both of norm
    # sqrt29 times the input norm
    m = branch_matrix(1, 1, SPEC)
    for u, v in ((1.0, 1.0), (0.0, 1.0)):
        iu, iv = m.apply((u, v))
        ratio = math.hypot(iu, iv) / math.hypot(u, v)
        assert abs(ratio - math.sqrt(29.0)) < 1e-12


def test_cone_sweep_clean_both_directions():
    for direction in ("forward", "backward"):
        rep = cone_sweep(30_000, 11, SPEC, direction=direction)
        assert rep.clean, f"{direction}: {rep}"
        assert rep.min_ratio > math.sqrt(5.0)
        assert rep.min_ratio >= math.sqrt(29.0) - 1e-6
        assert rep.samples == 30_000


# ---------------------------------------------------------------------------
# numeric Jacobians


def test_numeric_jacobian_matches_branch():
    z = TorusPoint.of(0.31, 0.43)
    from ltmlab.core import core_return

    lab = core_return(z, SPEC)
    fd = numeric_jacobian(z, SPEC)
    ref = branch_matrix(lab.j, lab.k, SPEC)
    for ra, rb in zip(fd.rows(), ref.rows()):
        for a, b in zip(ra, rb):
            assert abs(float(a) - float(b)) < 1e-6


def test_numeric_jacobian_exact_with_fractions():
    # (1/10, 1/10) is a one-leg/one-leg point: 0.1 + 0.2 stays in the
    # square, then 0.1 + 0.6 does too
    z = TorusPoint.of(Fraction(1, 10), Fraction(1, 10))
    af = numeric_jacobian(z, SPEC, exact=True)
    assert af.rows() == branch_matrix(1, 1, SPEC).rows()
    assert all(isinstance(v, Fraction) for row in af.rows() for v in row)


def test_numeric_jacobian_flags_near_boundary():
    # x + 2y = 1 passes through (0.3, 0.35); a stencil wider than the
    # distance to it straddles two branches
    z = TorusPoint.of(0.3, 0.35 - 1e-9)
    with pytest.raises(BranchMismatch):
        numeric_jacobian(z, SPEC, h=1e-7)


# ---------------------------------------------------------------------------
# Lyapunov sanity (full-scale bounds live in the acceptance suite)


def test_lyapunov_quick_bounds():
    core = lyapunov_ensemble(50, 400, 3, SPEC, "core")
    assert core.mean > 0.5 * math.log(5.0)
    assert core.dropped == 0
    full = lyapunov_ensemble(50, 400, 3, SPEC, "ltm")
    assert 0.0 < full.mean < core.mean
