"""Branch partition of the induced map: labels, singular lines, measures.

The induced linked-twist map is piecewise affine; its continuity cells are
labeled by the shear step counts (j, k), and the first-return time n =
j + k - 1 indexes the cell families whose Lebesgue measure decays like
1/n^3. Cells with large n pile up at two opposite corners of the core
square, and the separating singular lines there form explicit families:
for the horizontal shear (canonical geometry) the line of index n runs

    x + 2n y = 2   from  ((n-2)/(n-1), 1/(2(n-1)))  to  (1, 1/(2n)),   n >= 2,

together with its reflection through the square's center; the vertical
shear's families are the anti-diagonal reflection (x, y) -> (1-y, 1-x) of
these. Everything measurable here is estimated by deterministic Monte
Carlo on the vectorized kernels; everything linear is exact rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import rng as _rng
from . import vectorized as vec
from .core import (
    DEFAULT_RETURN_CAP,
    LtmSpec,
    Scalar,
    TorusPoint,
    core_return,
    in_core,
    wrap,
)
from .util import MeasureEstimate, binomial_estimate


class NoCrossingFound(Exception):
    """Bisection bracket has equal labels at both ends (nothing to locate)."""


@dataclass(frozen=True)
class BranchLabel:
    """Continuity-cell label of the induced map: shear step counts and return time."""

    j: int
    k: int

    @property
    def n(self) -> int:
        return self.j + self.k - 1

    def astuple(self) -> tuple:
        return (self.j, self.k, self.n)


@dataclass(frozen=True)
class Branch2Label:
    """Cell label over two successive returns; n indexes the two-return cells."""

    j1: int
    k1: int
    j2: int
    k2: int

    @property
    def n(self) -> int:
        return self.j1 + self.k1 + self.j2 + self.k2 - 3

    def astuple(self) -> tuple:
        return (self.j1, self.k1, self.j2, self.k2, self.n)


@dataclass(frozen=True)
class SingularLine:
    """A straight singular segment of one shear's return map.

    family: 'h-lower' | 'h-upper' | 'v-lower' | 'v-upper'; index n >= 2.
    Endpoints are exact rationals for the canonical geometry.
    """

    family: str
    index: int
    a: TorusPoint
    b: TorusPoint

    def tangent(self) -> tuple:
        return (self.b.x - self.a.x, self.b.y - self.a.y)


def classify(z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP) -> BranchLabel:
    """Continuity-cell label at z (points on a singular line classify by outcome)."""
    out = core_return(z, spec, cap)
    return BranchLabel(out.j, out.k)


def classify2(z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP) -> Branch2Label:
    first = core_return(z, spec, cap)
    second = core_return(first.image, spec, cap)
    return Branch2Label(first.j, first.k, second.j, second.k)


# ---------------------------------------------------------------------------
# explicit singular-line families (canonical geometry)


def _require_canonical(spec: LtmSpec):
    if not spec.is_canonical:
        raise NotImplementedError(
            "explicit singular-line families are derived for the canonical geometry"
        )


def singular_lines_h(n_max: int, spec: LtmSpec | None = None) -> list:
    """Appendix families of the horizontal shear's return map, indices 2..n_max.

    'h-lower' lines accumulate at the bottom-right core corner, 'h-upper'
    at the top-left; the index-n line separates the cells with j = n and
    j = n + 1.
    """
    if spec is not None:
        _require_canonical(spec)
    out = []
    for n in range(2, n_max + 1):
        ax = Fraction(n - 2, n - 1)
        ay = Fraction(1, 2 * (n - 1))
        bx = Fraction(1)
        by = Fraction(1, 2 * n)
        out.append(SingularLine("h-lower", n, TorusPoint(ax, ay), TorusPoint(bx, by)))
        out.append(
            SingularLine(
                "h-upper", n, TorusPoint(1 - ax, 1 - ay), TorusPoint(1 - bx, 1 - by)
            )
        )
    return out


def singular_lines_v(n_max: int, spec: LtmSpec | None = None) -> list:
    """Vertical-shear families: the anti-diagonal reflection (x,y) -> (1-y, 1-x)."""
    if spec is not None:
        _require_canonical(spec)
    out = []
    for line in singular_lines_h(n_max):
        fam = "v-lower" if line.family == "h-lower" else "v-upper"
        out.append(
            SingularLine(
                fam,
                line.index,
                TorusPoint(1 - line.a.y, 1 - line.a.x),
                TorusPoint(1 - line.b.y, 1 - line.b.x),
            )
        )
    return out


def reflect_antidiagonal(z: TorusPoint) -> TorusPoint:
    """The involution (x, y) -> (1-y, 1-x) swapping the two shears' structures."""
    return TorusPoint.of(1 - z.y, 1 - z.x)


# ---------------------------------------------------------------------------
# boundary location


def locate_cell_boundary(
    z0: TorusPoint,
    z1: TorusPoint,
    spec: LtmSpec,
    tol: float = 1e-12,
    cap: int = DEFAULT_RETURN_CAP,
    which: str = "any",
) -> TorusPoint:
    """Point where the branch label changes along the segment [z0, z1].

    Bisection on the (j, k) label. With Fraction endpoints and tol = 0 the
    crossing is solved exactly: once the bracket isolates a label change
    solvable in one coordinate, the crossing lies where a shear leg's image
    meets an arc endpoint, which is a linear equation in (x, y) (canonical
    geometry). Raises NoCrossingFound if both ends carry the same label.

    which="h" tracks only changes of the horizontal-leg count j (the
    vertical-leg boundaries accumulate ~n^-3 apart near the horizontal
    family's lines, so a joint tracker would usually stop at one of those
    first); which="v" tracks only k, refining until the bracket's j agrees.
    """
    if which not in ("any", "h", "v"):
        raise ValueError(f"unknown boundary family filter {which!r}")
    lab0 = classify(z0, spec, cap).astuple()[:2]
    lab1 = classify(z1, spec, cap).astuple()[:2]
    changed = {
        "any": lambda p, q: p != q,
        "h": lambda p, q: p[0] != q[0],
        "v": lambda p, q: p[1] != q[1],
    }[which]
    if not changed(lab0, lab1):
        raise NoCrossingFound(f"labels {lab0}/{lab1} match at both ends")
    solvable = {
        "any": _single_coordinate_change,
        "h": lambda p, q: p[0] != q[0],
        "v": lambda p, q: p[0] == q[0] and p[1] != q[1],
    }[which]
    exact = tol == 0
    if exact and not (
        isinstance(z0.x, (int, Fraction)) and isinstance(z1.x, (int, Fraction))
    ):
        raise ValueError("tol=0 requires rational endpoints")
    if exact:
        _require_canonical(spec)
    a, la = z0, lab0
    b, lb = z1, lab1
    for _ in range(4000):
        if exact:
            if solvable(la, lb) and _exact_ready(a, b, la, lb):
                return _exact_boundary(a, b, la, lb)
        else:
            if _seg_len(a, b) <= tol:
                return _midpoint(a, b)
        m = _midpoint(a, b)
        lm = classify(m, spec, cap).astuple()[:2]
        if changed(la, lm):
            b, lb = m, lm
        else:
            a, la = m, lm
    raise NoCrossingFound("bisection did not isolate a solvable label change")


def _single_coordinate_change(la: tuple, lb: tuple) -> bool:
    return (la[0] == lb[0]) != (la[1] == lb[1])


def _midpoint(a: TorusPoint, b: TorusPoint) -> TorusPoint:
    if isinstance(a.x, (int, Fraction)) and isinstance(b.x, (int, Fraction)):
        return TorusPoint(
            (Fraction(a.x) + Fraction(b.x)) / 2, (Fraction(a.y) + Fraction(b.y)) / 2
        )
    return TorusPoint((a.x + b.x) / 2, (a.y + b.y) / 2)


def _seg_len(a: TorusPoint, b: TorusPoint) -> float:
    return math.hypot(float(b.x - a.x), float(b.y - a.y))


def _h_lane_values(a: TorusPoint, b: TorusPoint, j: int) -> tuple:
    """The horizontal lane-j position form x + 2jy at the two endpoints."""
    fa = Fraction(a.x) + 2 * j * Fraction(a.y)
    fb = Fraction(b.x) + 2 * j * Fraction(b.y)
    return fa, fb


def _k_lane_values(a: TorusPoint, b: TorusPoint, j: int, k: int, w: int) -> tuple:
    """The vertical lane-k position form y + 2k(x + 2jy - w) at the endpoints."""
    fa, fb = _h_lane_values(a, b, j)
    ga = Fraction(a.y) + 2 * k * (fa - w)
    gb = Fraction(b.y) + 2 * k * (fb - w)
    return ga, gb


def _exact_ready(a: TorusPoint, b: TorusPoint, la: tuple, lb: tuple) -> bool:
    """Whether the bracket is narrow enough to pin the crossing's integer.

    The boundary lies where a lane's position form meets an integer; once the
    form moves by less than 1 across the bracket (and, for vertical-leg
    boundaries, the horizontal unwrap is common), that integer is unique.
    """
    j = min(la[0], lb[0])
    fa, fb = _h_lane_values(a, b, j)
    if la[0] != lb[0]:
        return abs(fb - fa) < 1
    if _floor_even(fa) != _floor_even(fb):
        return False
    k = min(la[1], lb[1])
    ga, gb = _k_lane_values(a, b, j, k, _floor_even(fa))
    return abs(gb - ga) < 1


def _boundary_integer(v_in: Fraction, v_out: Fraction) -> int:
    """The arc endpoint a lane's position form crosses between the endpoint
    where the lane is valid (v_in, inside a closed arc [2m, 2m+1]) and the
    endpoint where it is not (v_out, strictly outside, within distance 1)."""
    arc_lo = _floor_even(v_in)
    return arc_lo + 1 if v_out > arc_lo + 1 else arc_lo


def _exact_boundary(a: TorusPoint, b: TorusPoint, la: tuple, lb: tuple) -> TorusPoint:
    """Solve the crossing exactly on a bracket vetted by _exact_ready.

    Canonical geometry: a label's shear leg is valid exactly while its
    rotation position sits in a closed unit arc with integer ends, so the
    boundary is the line {position form = integer}, linear in (x, y).
    """
    ax, ay = Fraction(a.x), Fraction(a.y)
    dx, dy = Fraction(b.x) - ax, Fraction(b.y) - ay
    j = min(la[0], lb[0])
    fa, fb = _h_lane_values(a, b, j)
    if la[0] != lb[0]:
        # horizontal-leg boundary: x + 2j y hits an arc end
        v_in, v_out = (fa, fb) if la[0] == j else (fb, fa)
        c = _boundary_integer(v_in, v_out)
        denom = dx + 2 * j * dy
        t = (c - fa) / denom
    else:
        # vertical-leg boundary after the common-j horizontal leg:
        # y + 2k (x + 2jy - unwrap) hits an arc end
        k = min(la[1], lb[1])
        w = _floor_even(fa)
        ga, gb = _k_lane_values(a, b, j, k, w)
        v_in, v_out = (ga, gb) if la[1] == k else (gb, ga)
        c = _boundary_integer(v_in, v_out)
        denom = dy + 2 * k * (dx + 2 * j * dy)
        t = (c - ga) / denom
    if not (0 <= t <= 1):
        raise NoCrossingFound(f"exact solve left the bracket (t = {t})")
    return TorusPoint.of(ax + t * dx, ay + t * dy)


def _floor_even(v: Fraction) -> int:
    fl = v.numerator // v.denominator
    return fl - (fl % 2)


# ---------------------------------------------------------------------------
# measures by deterministic Monte Carlo


def cell_histogram(
    n_cap: int,
    samples: int,
    seed: int,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    shard_size: int = _rng.DEFAULT_SHARD,
    tag: int = _rng.STREAM_CELLS,
) -> np.ndarray:
    """counts[n] of return-time labels for n = 0..n_cap (n_cap holds the overflow).

    One classification pass shared by every per-cell estimate; shard order
    is fixed so the histogram is independent of shard size.
    """
    counts = np.zeros(n_cap + 1, dtype=np.int64)
    for start, stop in _rng.shard_ranges(samples, shard_size):
        x, y = vec.sample_core(seed, tag, start, stop - start, spec)
        j, k = vec.classify_arr(x, y, spec, cap)
        n = np.minimum(j + k - 1, n_cap)
        counts += np.bincount(n, minlength=n_cap + 1)
    return counts


def cell_measure(
    n: int,
    samples: int,
    seed: int,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
) -> MeasureEstimate:
    """Fraction of the core square whose return-time label is exactly n."""
    hist = cell_histogram(max(n + 1, 2), samples, seed, spec, cap)
    return binomial_estimate(int(hist[n]) if n < hist.size - 1 else 0, samples)


def cell_measure_sweep(
    n_cap: int,
    samples: int,
    seed: int,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
) -> list:
    """MeasureEstimates for every n in 1..n_cap-1 from one classification pass."""
    hist = cell_histogram(n_cap, samples, seed, spec, cap)
    return [binomial_estimate(int(hist[n]), samples) for n in range(1, n_cap)]


def tail_measure(
    n: int,
    samples: int,
    seed: int,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    tag: int = _rng.STREAM_TAILS,
) -> MeasureEstimate:
    """Fraction of the core square with return-time label strictly greater than n."""
    hits = 0
    for start, stop in _rng.shard_ranges(samples, _rng.DEFAULT_SHARD):
        x, y = vec.sample_core(seed, tag, start, stop - start, spec)
        j, k = vec.classify_arr(x, y, spec, cap)
        hits += int(np.count_nonzero(j + k - 1 > n))
    return binomial_estimate(hits, samples)


# ---------------------------------------------------------------------------
# neighborhoods of the singular set


_PROBE_ANGLES = np.arange(8) * (np.pi / 4)
_PROBE_DX = np.cos(_PROBE_ANGLES)
_PROBE_DY = np.sin(_PROBE_ANGLES)


def neighborhood_measure(
    eps: float,
    samples: int,
    seed: int,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    corner_radius: float = 0.25,
    tag: int = _rng.STREAM_NEIGHBORHOOD,
) -> MeasureEstimate:
    """Fraction of the core square within eps of the induced map's singular set.

    Mid-square points use an 8-ray label-change probe of radius eps (a ray
    endpoint on a different branch certifies a crossing within eps). Points
    within corner_radius of the two accumulation corners use exact distances
    to the explicit line families instead, where cells are thinner than any
    practical ray resolution.
    """
    _require_canonical(spec)
    hits = 0
    for start, stop in _rng.shard_ranges(samples, _rng.DEFAULT_SHARD):
        x, y = vec.sample_core(seed, tag, start, stop - start, spec)
        near = _near_sigma_arr(x, y, eps, spec, cap, corner_radius)
        hits += int(np.count_nonzero(near))
    return binomial_estimate(hits, samples)


def _near_sigma_arr(
    x: np.ndarray,
    y: np.ndarray,
    eps: float,
    spec: LtmSpec,
    cap: int,
    corner_radius: float,
) -> np.ndarray:
    near = np.zeros(x.shape, dtype=bool)
    br = np.hypot(x - 1.0, y) <= corner_radius  # bottom-right accumulation corner
    tl = np.hypot(x, y - 1.0) <= corner_radius  # top-left accumulation corner

    if np.any(br):
        cx, cy = x[br], y[br]
        # horizontal family directly; vertical family is its anti-diagonal mirror
        d = np.minimum(
            _corner_family_distance(cx, cy),
            _corner_family_distance(1.0 - cy, 1.0 - cx),
        )
        near[br] = d <= eps

    if np.any(tl):
        cx, cy = x[tl], y[tl]
        # both families at this corner are reflections of the bottom-right ones:
        # the horizontal by the center flip, the vertical by coordinate swap
        d = np.minimum(
            _corner_family_distance(1.0 - cx, 1.0 - cy),
            _corner_family_distance(cy, cx),
        )
        near[tl] = d <= eps

    mid = ~(br | tl)
    if np.any(mid):
        mx, my = x[mid], y[mid]
        j0, k0 = vec.classify_arr(mx, my, spec, cap)
        hit = np.zeros(mx.shape, dtype=bool)
        for ddx, ddy in zip(_PROBE_DX, _PROBE_DY):
            px = np.clip(mx + eps * ddx, 0.0, 1.0)
            py = np.clip(my + eps * ddy, 0.0, 1.0)
            j1, k1 = vec.classify_arr(px, py, spec, cap)
            hit |= (j1 != j0) | (k1 != k0)
        near[mid] = hit
    return near


def _corner_family_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distance to the horizontal shear's explicit lines near the bottom-right corner.

    Candidate indices bracket (2 - x)/(2y); the index-1 members are the
    bounding lines x + 2y = 1 and x + 2y = 2. Distance to the anti-diagonal
    reflection family is obtained by the caller reflecting the point.
    """
    best = np.abs(x + 2.0 * y - 1.0) / math.sqrt(5.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        base = np.where(y > 0, (2.0 - x) / (2.0 * y), np.inf)
    for off in (-2, -1, 0, 1, 2):
        n = np.floor(base).astype(np.int64, copy=False) + off
        n = np.maximum(n, 1)
        # distance from (x, y) to the full line x + 2n y = 2
        d = np.abs(x + 2.0 * n * y - 2.0) / np.sqrt(1.0 + 4.0 * n.astype(np.float64) ** 2)
        best = np.minimum(best, d)
    return best


# ---------------------------------------------------------------------------
# two-return cells contain the one-return cells (large n)


def two_step_label_consistent(
    z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> bool:
    """Whether the two-return cell index matches the one-return index at z.

    True whenever the first return lands on the all-ones branch (the
    isolation phenomenon for large-n cells).
    """
    lab = classify2(z, spec, cap)
    return lab.n == BranchLabel(lab.j1, lab.k1).n
