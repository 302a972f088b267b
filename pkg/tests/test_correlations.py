"""Correlation estimators, visit-count scans, and large-cell isolation."""

import math
from fractions import Fraction

import pytest

from ltmlab.core import LtmSpec, TorusPoint
from ltmlab.correlations import (
    builtin_observables,
    cell_tail_curve,
    default_markarian_b,
    estimate_correlation,
    estimate_correlation_core,
    isolation_scan,
    markarian_scan,
    n_max_stat,
    observable_by_name,
    r_count,
    shuffled_null,
    tail_decomposition,
)

SPEC = LtmSpec.canonical()
CENTER = TorusPoint.of(Fraction(1, 2), Fraction(1, 2))


# ---------------------------------------------------------------------------
# observables


def test_builtin_observable_names():
    assert [o.name for o in builtin_observables()] == ["cos_px", "cos_py", "cos_pxy"]
    with pytest.raises(KeyError):
        observable_by_name("nope")


def test_observable_evaluation():
    px = observable_by_name("cos_px")
    assert px(0.0, 0.7) == pytest.approx(1.0)
    assert px.at(CENTER) == pytest.approx(0.0, abs=1e-15)
    pxy = observable_by_name("cos_pxy")
    assert pxy(1.0, 1.0) == pytest.approx(1.0)  # (-1) * (-1)
    assert pxy(1.0, 0.0) == pytest.approx(-1.0)


def test_observables_are_mean_zero_on_both_spaces():
    # exact integrals vanish; a 2e5 Monte Carlo mean is C0 against the
    # constant observable, bounded by a few standard errors ~ 1/sqrt(N)
    px = observable_by_name("cos_px")
    one = type(px)(name="one", fn=lambda x, y: x * 0 + 1.0, mean_zero=False)
    full = estimate_correlation(px, one, 0, 200_000, 31, SPEC)
    core = estimate_correlation_core(px, one, 0, 200_000, 31, SPEC)
    assert abs(full.c[0]) < 4 * full.stderr[0]
    assert abs(core.c[0]) < 4 * core.stderr[0]


# ---------------------------------------------------------------------------
# correlation series


def test_lag_zero_variance_is_one_half():
    # cos^2 averages to 1/2 on both the full domain and the core square
    px = observable_by_name("cos_px")
    s = estimate_correlation(px, px, 3, 200_000, 9, SPEC)
    assert list(s.n[:4]) == [0, 1, 2, 3]
    assert s.c[0] == pytest.approx(0.5, abs=4 * s.stderr[0])
    sc = estimate_correlation_core(px, px, 0, 200_000, 9, SPEC)
    assert sc.c[0] == pytest.approx(0.5, abs=4 * sc.stderr[0])


def test_shuffled_null_is_pure_noise():
    px = observable_by_name("cos_px")
    null = shuffled_null(px, px, 10, 200_000, 9, SPEC)
    assert null.map_name == "ltm-shuffled"
    for ci, se in zip(null.c[1:], null.stderr[1:]):
        assert abs(ci) < 3 * se


def test_odd_even_cross_correlation_vanishes_at_every_lag():
    # cos(pi x) is odd and cos(pi x) cos(pi y) is even under the measure-
    # preserving involution (x, y) -> (1 - x, 1 - y), which commutes with
    # the map; their cross-correlation is identically zero, so the
    # estimate never leaves the noise band
    px = observable_by_name("cos_px")
    pxy = observable_by_name("cos_pxy")
    s = estimate_correlation(px, pxy, 20, 200_000, 9, SPEC)
    for ci, se in zip(s.c, s.stderr):
        assert abs(ci) < 3 * se


def test_autocorrelation_does_decay():
    # the odd-odd pair has real signal at small lags and loses it fast
    px = observable_by_name("cos_px")
    s = estimate_correlation(px, px, 8, 400_000, 9, SPEC)
    assert s.c[1] > 10 * s.stderr[1]
    assert abs(s.c[1]) > abs(s.c[4]) > abs(s.c[8]) - 3 * s.stderr[8]


# ---------------------------------------------------------------------------
# orbit statistics


def test_visit_count_of_center():
    # period-3 orbit: exactly one of the first three images is in the core
    assert r_count(CENTER, 3, SPEC) == 1
    assert r_count(CENTER, 9, SPEC) == 3


def test_entry_time_horizon_stat():
    assert n_max_stat(CENTER, 3, SPEC) == 3
    z = TorusPoint.of(0.31, 0.43)
    vals = [n_max_stat(z, n, SPEC) for n in (1, 2, 4, 8, 16)]
    assert vals == sorted(vals)
    assert vals[0] >= 1


# ---------------------------------------------------------------------------
# visit-count split (busy points vs entry gaps)


def test_markarian_split_with_huge_threshold_is_all_complement():
    m = markarian_scan(200, 50.0, 20_000, 21, SPEC)
    assert m.threshold > m.n  # nobody can clear it
    assert m.frac_busy.value == 0.0
    assert m.complement_frac.value == 1.0
    assert m.unresolved == 0


def test_markarian_split_with_working_threshold():
    m = markarian_scan(200, 2.0, 20_000, 21, SPEC)
    assert 0 < m.complement_frac.value < 0.05
    assert m.frac_busy.value > 0.9
    assert m.beta_hat > 0.5


def test_default_threshold_coefficient():
    assert default_markarian_b(0.5) == pytest.approx(2 / math.log(2))
    # faster mixing estimate -> smaller b
    assert default_markarian_b(0.2) < default_markarian_b(0.5)


# ---------------------------------------------------------------------------
# tails of the return-time distribution


def test_tail_decomposition_forward_backward_symmetry():
    # the map and its inverse are conjugate, so the forward and backward
    # bad sets have equal measure
    td = tail_decomposition(50, 1.0, 100_000, 13, SPEC)
    assert td.forward.value > 0 and td.backward.value > 0
    joint = math.hypot(td.forward.stderr, td.backward.stderr)
    assert abs(td.forward.value - td.backward.value) < 4 * joint


def test_cell_tail_curve_decays_like_an_inverse_square():
    rows = cell_tail_curve((4, 8, 16), 150_000, 17, SPEC)
    vals = [est.value for _, est in rows]
    assert vals[0] > vals[1] > vals[2] > 0
    # pre-asymptotic at m = 4; by m = 8 -> 16 the halving ratio is near 4
    assert 3.0 < vals[1] / vals[2] < 8.0


# ---------------------------------------------------------------------------
# isolation of large-return cells


def test_large_cells_sit_deep_inside_the_short_return_region():
    iso = isolation_scan(100, 1600, 30_000, 23, SPEC)
    assert len(iso.labels) > 1000
    assert (iso.labels >= 100).all()
    assert (iso.max_n >= 1).all()
    # isolation depth grows with the cell index
    assert iso.slope > 0
    mins = [row[2] for row in iso.bins]
    assert mins == sorted(mins)
