"""Singularity-line geometry, branch labels, and cell-measure estimators."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltmlab.core import LtmSpec, TorusPoint
from ltmlab.partition import (
    BranchLabel,
    NoCrossingFound,
    cell_histogram,
    cell_measure,
    classify,
    classify2,
    locate_cell_boundary,
    neighborhood_measure,
    reflect_antidiagonal,
    singular_lines_h,
    singular_lines_v,
    tail_measure,
    two_step_label_consistent,
)

SPEC = LtmSpec.canonical()


def frac(p, q):
    return Fraction(p, q)


# ---------------------------------------------------------------------------
# explicit line families


def test_first_horizontal_lines_are_exact():
    lines = singular_lines_h(3, SPEC)
    assert len(lines) == 4  # lower+upper for index 2 and 3
    lo2 = lines[0]
    assert lo2.family == "h-lower" and lo2.index == 2
    assert (lo2.a.x, lo2.a.y) == (0, frac(1, 2))
    assert (lo2.b.x, lo2.b.y) == (1, frac(1, 4))
    up2 = lines[1]
    assert up2.family == "h-upper" and up2.index == 2
    assert (up2.a.x, up2.a.y) == (1, frac(1, 2))
    assert (up2.b.x, up2.b.y) == (0, frac(3, 4))


def test_line_families_grow_two_per_index():
    for n_max in (2, 5, 9):
        assert len(singular_lines_h(n_max, SPEC)) == 2 * (n_max - 1)
        assert len(singular_lines_v(n_max, SPEC)) == 2 * (n_max - 1)


def test_horizontal_lines_hit_right_edge_at_reciprocal_heights():
    # the lower line of index n meets x = 1 at height 1/(2n)
    for line in singular_lines_h(12, SPEC):
        if line.family != "h-lower":
            continue
        edge = line.a if line.a.x == 1 else line.b
        assert edge.y == frac(1, 2 * line.index)


def test_reflection_carries_h_lines_onto_v_lines():
    vset = {
        frozenset([(l.a.x, l.a.y), (l.b.x, l.b.y)])
        for l in singular_lines_v(6, SPEC)
    }
    for l in singular_lines_h(6, SPEC):
        ra, rb = reflect_antidiagonal(l.a), reflect_antidiagonal(l.b)
        assert frozenset([(ra.x, ra.y), (rb.x, rb.y)]) in vset


def test_reflection_is_an_involution():
    z = TorusPoint.of(frac(3, 10), frac(1, 5))
    r = reflect_antidiagonal(z)
    assert (r.x, r.y) == (frac(4, 5), frac(7, 10))
    back = reflect_antidiagonal(r)
    assert (back.x, back.y) == (z.x, z.y)


# ---------------------------------------------------------------------------
# branch labels


def test_center_label():
    lab = classify(TorusPoint.of(frac(1, 2), frac(1, 2)), SPEC)
    assert lab.astuple() == (2, 2, 3)


def test_label_return_time_formula():
    assert BranchLabel(1, 1).n == 1
    assert BranchLabel(7, 3).n == 9


@given(
    x=st.floats(min_value=0.01, max_value=0.99),
    y=st.floats(min_value=0.01, max_value=0.99),
)
@settings(max_examples=60, deadline=None)
def test_two_step_label_extends_one_step(x, y):
    z = TorusPoint.of(x, y)
    one = classify(z, SPEC)
    two = classify2(z, SPEC)
    assert (two.j1, two.k1) == (one.j, one.k)
    assert two.n == one.n + two.j2 + two.k2 - 2


def test_two_step_consistency_detects_all_ones_landing():
    # first return from (1/20, 1/20) lands on the (1, 1) branch ...
    assert two_step_label_consistent(TorusPoint.of(0.05, 0.05), SPEC)
    assert classify2(TorusPoint.of(0.05, 0.05), SPEC).astuple() == (1, 1, 1, 1, 1)
    # ... while from (9/20, 1/5) it lands on (1, 3)
    assert not two_step_label_consistent(TorusPoint.of(0.45, 0.2), SPEC)
    assert classify2(TorusPoint.of(0.45, 0.2), SPEC).astuple() == (1, 5, 1, 3, 7)


# ---------------------------------------------------------------------------
# boundary location


def test_edge_crossing_is_exact_in_rational_mode():
    # bracket the n = 3 lower-line crossing of the right edge
    lo = (frac(1, 6) + frac(1, 8)) / 2
    hi = (frac(1, 6) + frac(1, 4)) / 2
    hit = locate_cell_boundary(
        TorusPoint.of(Fraction(1), lo),
        TorusPoint.of(Fraction(1), hi),
        SPEC,
        tol=0,
        which="h",
    )
    assert hit.y == frac(1, 6)
    assert isinstance(hit.y, Fraction)


def test_edge_crossing_float_mode_close():
    lo = float((frac(1, 6) + frac(1, 8)) / 2)
    hi = float((frac(1, 6) + frac(1, 4)) / 2)
    hit = locate_cell_boundary(
        TorusPoint.of(1.0, lo), TorusPoint.of(1.0, hi), SPEC, which="h"
    )
    assert abs(float(hit.y) - 1 / 6) < 1e-9


def test_no_crossing_raises():
    with pytest.raises(NoCrossingFound):
        locate_cell_boundary(
            TorusPoint.of(frac(1, 100), frac(1, 100)),
            TorusPoint.of(frac(99, 100), frac(99, 100)),
            SPEC,
            tol=0,
        )


# ---------------------------------------------------------------------------
# Monte Carlo measures (loose bands sized to several standard errors)


def test_cell_measure_matches_center_cell():
    est = cell_measure(2, 200_000, 7, SPEC)
    # the n=2 cells (one-leg branches with j+k=3) hold a bit over a quarter
    # of the square; frozen against a 2e5-sample run at seed 7
    assert abs(est.value - 0.279) < 5 * est.stderr + 1e-3
    assert est.hits == round(est.value * est.samples)


def test_cell_histogram_counts_everything_once():
    h = cell_histogram(10, 150_000, 11, SPEC)
    assert h.shape == (11,)
    assert h.sum() == 150_000
    assert h[0] == 0 and h[1] > 0  # return times start at n = 1
    # mass decreases sharply with n
    assert h[2] > h[5] > h[9]


def test_tail_measure_decays():
    t5 = tail_measure(5, 100_000, 3, SPEC)
    t10 = tail_measure(10, 100_000, 3, SPEC)
    assert t5.value > t10.value > 0
    # cubic-tail ballpark: dropping half the index cuts mass ~4-5x
    assert 3.0 < t5.value / t10.value < 7.0


def test_neighborhood_measure_concentrates_sublinearly():
    big = neighborhood_measure(0.01, 200_000, 5, SPEC)
    small = neighborhood_measure(0.0025, 200_000, 5, SPEC)
    assert big.value > small.value > 0
    # a finite line family would scale linearly (ratio 4); accumulation
    # near the corners drags the exponent toward 1/2 (ratio 2)
    ratio = big.value / small.value
    assert 1.6 < ratio < 3.7
