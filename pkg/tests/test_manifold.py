"""Segment cutting, pushforward, and unstable-manifold growth."""

import math

import pytest

from ltmlab.core import LtmSpec, TorusPoint, core_return
from ltmlab.manifold import (
    Segment,
    corner_crossing_segment,
    corner_funnel_segment,
    corner_seed_segment,
    evolve_segment,
    heteroclinic_probe,
    iterate_segments,
    one_step_sum,
    split_segment,
)
from ltmlab.partition import classify

SPEC = LtmSpec.canonical()
SQRT2 = math.sqrt(2.0)


def unstable_diag(x0: float, x1: float) -> Segment:
    s = 1 + SQRT2
    return Segment(TorusPoint.of(x0, x0 * s), TorusPoint.of(x1, x1 * s))


# ---------------------------------------------------------------------------
# Segment basics


def test_segment_lengths():
    seg = Segment(TorusPoint.of(0.1, 0.2), TorusPoint.of(0.4, 0.6))
    assert seg.l_h == pytest.approx(0.3)
    assert seg.l_v == pytest.approx(0.4)
    assert seg.length == pytest.approx(0.5)
    mid = seg.point_at(0.5)
    assert (float(mid.x), float(mid.y)) == pytest.approx((0.25, 0.4))


def test_cone_membership_of_segments():
    assert unstable_diag(0.01, 0.02).in_unstable_cone()
    flat = Segment(TorusPoint.of(0.1, 0.2), TorusPoint.of(0.4, 0.21))
    assert not flat.in_unstable_cone()
    down = Segment(TorusPoint.of(0.5, 0.5), TorusPoint.of(0.6, 0.45))
    assert down.in_stable_cone()


# ---------------------------------------------------------------------------
# cutting at label changes


def test_split_keeps_one_cell_whole():
    seg = Segment(TorusPoint.of(0.20, 0.35), TorusPoint.of(0.28, 0.35))
    cut = split_segment(seg, SPEC)
    assert cut.count == 1
    assert cut.pinched == 0
    assert tuple(cut.labels[0]) == (1, 1)


def test_split_straddling_segment():
    # y = 0.35 crosses the first singular line (x + 2y = 1) at x = 0.3
    seg = Segment(TorusPoint.of(0.20, 0.35), TorusPoint.of(0.40, 0.35))
    cut = split_segment(seg, SPEC)
    assert cut.count >= 2
    first_x = float(seg.point_at(float(cut.crossings[0])).x)
    assert first_x == pytest.approx(0.3, abs=1e-6)
    # labels really change across every interior boundary ...
    rows = [tuple(r) for r in cut.labels]
    assert all(a != b for a, b in zip(rows, rows[1:]))
    # ... and each one matches a direct classification at the midpoint
    for i, row in enumerate(rows):
        mid = cut.component(i).point_at(0.5)
        lab = classify(mid, SPEC)
        assert row == (lab.j, lab.k)


# ---------------------------------------------------------------------------
# pushing segments forward


def test_evolve_single_cell_is_affine():
    seg = unstable_diag(0.002, 0.008)
    ev = evolve_segment(seg, SPEC)
    assert len(ev.children) == 1
    child = ev.children[0]
    assert child.generation == 1
    for t in (0.0, 0.5, 1.0):
        want = core_return(seg.point_at(t), SPEC).image
        got = child.point_at(t)
        assert abs(float(got.x) - float(want.x)) < 1e-12
        assert abs(float(got.y) - float(want.y)) < 1e-12


def test_evolved_children_stay_in_unstable_cone():
    seg = Segment(TorusPoint.of(0.20, 0.35), TorusPoint.of(0.26, 0.42))
    ev = evolve_segment(seg, SPEC)
    assert ev.children
    for child in ev.children:
        assert child.in_unstable_cone()


# ---------------------------------------------------------------------------
# one-step growth functional


def test_one_step_sum_single_component_value():
    seg = unstable_diag(0.002, 0.008)
    r = one_step_sum(seg, SPEC, power=2, expansion="spectral")
    assert r.count == 1
    # frozen from an exact one-cell evaluation: the whole segment sits on
    # the (1, 1) branch, so the sum is one inverse-square eigenvalue
    assert r.sum_inv == pytest.approx(0.02943725152285942, abs=1e-12)
    rt = one_step_sum(seg, SPEC, power=2, expansion="tangent")
    assert rt.sum_inv == pytest.approx(r.sum_inv, abs=1e-12)


def test_corner_crossing_sum_near_closed_form():
    # a short chord cut across the accumulation corner picks up every
    # branch once; its inverse-square spectral sum has the closed form
    # 1/(3+2*sqrt2)^2 + ln(3+2*sqrt2)/6 = 0.32322841...
    r = one_step_sum(corner_crossing_segment(1e-3), SPEC, power=2,
                     expansion="spectral")
    assert r.count > 1000
    assert abs(r.sum_inv - 0.32323) < 0.02


def test_funnel_sum_approaches_series_limit():
    limit = math.log(3 + 2 * SQRT2) / 24
    r = one_step_sum(corner_funnel_segment(1e-3), SPEC, power=2,
                     expansion="tangent")
    assert abs(r.sum_inv - limit) < 1e-3


# ---------------------------------------------------------------------------
# manifold growth and heteroclinic connection


def test_iterated_generations_grow_vertically():
    gens = iterate_segments(corner_seed_segment(), SPEC, 8, budget=128)
    assert len(gens) == 9
    assert gens[0].count == 1
    assert gens[0].total_length == pytest.approx(corner_seed_segment().length)
    for g in gens[1:]:
        assert g.count >= 1
        # every surviving component at least doubles its vertical extent
        assert g.min_v_ratio > 2.0
    # total vertical extent compounds quickly
    assert gens[4].total_l_v > 10 * gens[0].total_l_v


def test_heteroclinic_connection_appears_early():
    het = heteroclinic_probe(corner_seed_segment(), SPEC, max_gen=6, budget=256)
    assert het.first_generation is not None
    assert het.first_generation <= 4
    # once found, found in every later generation
    assert het.found_generations == tuple(
        range(het.first_generation, 6 + 1)
    )
    assert het.transversal
    # the stable direction at the crossing comes from the center branch
    assert het.stable_slope == pytest.approx(2 - math.sqrt(5.0), abs=1e-9)
