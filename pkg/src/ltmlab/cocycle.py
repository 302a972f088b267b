"""Derivative cocycle of the induced map: branch matrices, cones, expansion.

On each continuity branch the induced linked-twist map is affine, so its
derivative is a constant 2x2 matrix determined by the branch label (j, k):
j horizontal shear steps contribute [[1, 2j], [0, 1]] and k vertical steps
contribute [[1, 0], [2k, 1]] (canonical geometry), composing to

    [[1, 2j], [2k, 4jk + 1]]        (determinant one, trace 4jk + 2).

Hyperbolicity is uniform: the cone of directions with slope >= 1 is mapped
strictly into itself with norm growth > sqrt(5), and the mirror cone with
slope in [-1, 0) contracts the same way under the inverse. Everything here
is exact integer (or Fraction) arithmetic unless a float slips in, which is
allowed and propagates as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    DEFAULT_RETURN_CAP,
    LtmSpec,
    Scalar,
    TorusPoint,
    core_return,
    core_return_inv,
    in_core,
    ltm,
    h_twist,
    in_h_annulus,
    in_v_annulus,
)


class NotHyperbolic(Exception):
    """Matrix trace too small for a real expanding eigenvalue."""


class BranchMismatch(Exception):
    """Finite-difference probe straddled a singularity line (labels differ)."""


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix with exact entries (int/Fraction; floats tolerated)."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, v: Sequence[Scalar]) -> tuple:
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def trace(self) -> Scalar:
        return self.a + self.d

    def inv(self) -> "Mat2":
        det = self.det()
        if det == 1:
            return Mat2(self.d, -self.b, -self.c, self.a)
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __pow__(self, n: int) -> "Mat2":
        if n < 0:
            return self.inv() ** (-n)
        out = IDENTITY
        base = self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def rows(self) -> tuple:
        return ((self.a, self.b), (self.c, self.d))


IDENTITY = Mat2(1, 0, 0, 1)


def h_step_matrix(j: int = 1, spec: LtmSpec | None = None) -> Mat2:
    """Derivative of j horizontal shear steps on the annulus."""
    s = 2 if spec is None else spec.slope_h
    return Mat2(1, j * s, 0, 1)


def v_step_matrix(k: int = 1, spec: LtmSpec | None = None) -> Mat2:
    s = 2 if spec is None else spec.slope_v
    return Mat2(1, 0, k * s, 1)


def branch_matrix(j: int, k: int, spec: LtmSpec | None = None) -> Mat2:
    """Derivative of the induced map on the branch with labels (j, k)."""
    if spec is None or spec.is_canonical:
        return Mat2(1, 2 * j, 2 * k, 4 * j * k + 1)
    return v_step_matrix(k, spec) @ h_step_matrix(j, spec)


def two_step_branch_matrix(
    j1: int, k1: int, j2: int, k2: int, spec: LtmSpec | None = None
) -> Mat2:
    """Derivative of two successive induced-map returns: second branch after first."""
    return branch_matrix(j2, k2, spec) @ branch_matrix(j1, k1, spec)


# The four asymptotic two-return branch shapes met when a segment crosses the
# accumulation funnels at a core-square corner: one leg takes n shear steps,
# every other leg takes one. All four share the trace 24n + 10 and hence the
# same expanding eigenvalue.
CORNER_PATTERNS = {
    "late_v": lambda n: (1, 1, 1, n),
    "late_h": lambda n: (1, 1, n, 1),
    "early_v": lambda n: (1, n, 1, 1),
    "early_h": lambda n: (n, 1, 1, 1),
}


def corner_branch_matrix(pattern: str, n: int) -> Mat2:
    """Two-return branch matrix for a named corner-funnel pattern."""
    j1, k1, j2, k2 = CORNER_PATTERNS[pattern](n)
    return two_step_branch_matrix(j1, k1, j2, k2)


def spectral_radius(m: Mat2) -> float:
    """Expanding eigenvalue (tr + sqrt(tr^2 - 4))/2 of a determinant-one matrix.

    Requires strict hyperbolicity: |trace| > 2. The identity and parabolic
    shears are rejected with NotHyperbolic.
    """
    det = m.det()
    if det != 1:
        raise ValueError(f"determinant {det} != 1")
    tr = abs(m.trace())
    if tr <= 2:
        raise NotHyperbolic(f"|trace| = {tr} <= 2")
    tr = float(tr)
    return (tr + math.sqrt(tr * tr - 4.0)) / 2.0


def two_step_corner_eigenvalue(n: int) -> float:
    """Expanding eigenvalue of any corner-funnel two-return branch: 12n + 5 + sqrt(144n^2 + 120n + 24)."""
    return 12.0 * n + 5.0 + math.sqrt(144.0 * n * n + 120.0 * n + 24.0)


def stable_direction(m: Mat2) -> tuple:
    """(1, slope) eigenvector for the contracting eigenvalue of a hyperbolic Mat2."""
    lam_small = 1.0 / spectral_radius(m)
    if m.b == 0:  # lower-triangular: eigenvalues are the diagonal entries
        if abs(float(m.d)) < abs(float(m.a)):
            return (0.0, 1.0)
        return (float(m.d) - float(m.a), -float(m.c))
    # row one of (m - lam): (a - lam) * 1 + b * slope = 0
    return (1.0, (lam_small - float(m.a)) / float(m.b))


def unstable_direction(m: Mat2) -> tuple:
    lam = spectral_radius(m)
    if m.b == 0:
        if abs(float(m.d)) > abs(float(m.a)):
            return (0.0, 1.0)
        return (float(m.d) - float(m.a), -float(m.c))
    return (1.0, (lam - float(m.a)) / float(m.b))


# ---------------------------------------------------------------------------
# cones


def in_unstable_cone(u: Scalar, v: Scalar) -> bool:
    """Vectors with slope >= 1 (vertical included): u(v - u) >= 0 sign-safely."""
    if u == 0:
        return True
    return u * (v - u) >= 0


def in_stable_cone(u: Scalar, v: Scalar) -> bool:
    """Vectors with slope in [-1, 0) (horizontal included): v(-u - v) >= 0."""
    if v == 0:
        return True
    return v * (-u - v) >= 0


@dataclass(frozen=True)
class ExpansionReport:
    """One cocycle step applied to a tangent vector."""

    vector: tuple
    ratio: float  # |Mw| / |w|
    in_cone: bool
    label: tuple  # branch (j, k) used


def cone_step(
    z: TorusPoint,
    w: Sequence[Scalar],
    spec: LtmSpec,
    direction: str = "forward",
    cap: int = DEFAULT_RETURN_CAP,
) -> ExpansionReport:
    """Transport a tangent vector one induced-map step and report cone data.

    forward: w in the unstable cone maps by the branch derivative at z and
    must stay in the unstable cone. backward: w in the stable cone maps by
    the inverse branch derivative (branch of the preimage) and must stay in
    the stable cone. Norm growth exceeds sqrt(5) both ways.
    """
    if direction == "forward":
        out = core_return(z, spec, cap)
        img = out.deriv.apply(w)
        ok = in_unstable_cone(*img)
    elif direction == "backward":
        out = core_return_inv(z, spec, cap)
        img = out.deriv.inv().apply(w)
        ok = in_stable_cone(*img)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    num = math.hypot(float(img[0]), float(img[1]))
    den = math.hypot(float(w[0]), float(w[1]))
    return ExpansionReport(vector=img, ratio=num / den, in_cone=ok, label=(out.j, out.k))


def tangent_expansion(m: Mat2, w: Sequence[Scalar]) -> float:
    """Norm growth |Mw|/|w| of a direction under a branch matrix."""
    img = m.apply(w)
    return math.hypot(float(img[0]), float(img[1])) / math.hypot(float(w[0]), float(w[1]))


# ---------------------------------------------------------------------------
# numeric derivative cross-check


def numeric_jacobian(
    z: TorusPoint,
    spec: LtmSpec,
    h: float = 1e-7,
    cap: int = DEFAULT_RETURN_CAP,
    exact: bool = False,
) -> Mat2:
    """Jacobian of the induced map at z by finite differences (or exact affine fit).

    Probes z + h*e1 and z + h*e2; if any probe lands on a different branch
    (different (j, k)) the point is too close to a singularity line for the
    step and BranchMismatch is raised. With exact=True and Fraction inputs
    the affine fit over the three points is exact and reproduces the branch
    matrix with no error at all.
    """
    base = core_return(z, spec, cap)
    if exact:
        step = Fraction(1, 10**9) if not isinstance(h, Fraction) else h
    else:
        step = h
    out = []
    for dx, dy in ((step, 0), (0, step)):
        probe = TorusPoint.of(z.x + dx, z.y + dy)
        o = core_return(probe, spec, cap)
        if (o.j, o.k) != (base.j, base.k):
            raise BranchMismatch(
                f"probe branch {(o.j, o.k)} != base {(base.j, base.k)} at {z}"
            )
        # displacement on the torus, un-wrapped to the representative near zero
        ddx = _short_diff(o.image.x - base.image.x)
        ddy = _short_diff(o.image.y - base.image.y)
        out.append((ddx / step, ddy / step))
    (a, c), (b, d) = out
    return Mat2(a, b, c, d)


def _short_diff(v: Scalar) -> Scalar:
    """Wrap a coordinate difference to the representative in [-1, 1)."""
    w = v % 2
    return w - 2 if w >= 1 else w


# ---------------------------------------------------------------------------
# Lyapunov estimates


def lyapunov_estimate(
    z: TorusPoint,
    spec: LtmSpec,
    iterations: int,
    map_name: str = "core",
    w0: Sequence[float] = (0.0, 1.0),
    cap: int = DEFAULT_RETURN_CAP,
) -> float:
    """Top Lyapunov exponent along one orbit by renormalized vector transport.

    map_name "core": exponent per induced-map return (branch matrices).
    map_name "ltm": exponent per composed-map step (shear factors applied as
    the orbit actually crosses the annuli).
    """
    u, v = float(w0[0]), float(w0[1])
    total = 0.0
    pt = z
    if map_name == "core":
        for _ in range(iterations):
            out = core_return(pt, spec, cap)
            u, v = out.deriv.apply((u, v))
            u, v = float(u), float(v)
            norm = math.hypot(u, v)
            total += math.log(norm)
            u, v = u / norm, v / norm
            pt = out.image
        return total / iterations
    if map_name == "ltm":
        sh = float(spec.slope_h)
        sv = float(spec.slope_v)
        for _ in range(iterations):
            if in_h_annulus(pt, spec):
                u, v = u + sh * v, v
            mid = h_twist(pt, spec)
            if in_v_annulus(mid, spec):
                u, v = u, v + sv * u
            pt = ltm(pt, spec)
            norm = math.hypot(u, v)
            total += math.log(norm)
            u, v = u / norm, v / norm
        return total / iterations
    raise ValueError(f"unknown map {map_name!r}")


@dataclass(frozen=True)
class LyapunovEnsemble:
    """Per-orbit top-exponent estimates over a random ensemble."""

    exponents: "np.ndarray"
    iterations: int
    map_name: str
    dropped: int

    @property
    def mean(self) -> float:
        return float(self.exponents.mean())

    @property
    def std(self) -> float:
        return float(self.exponents.std())

    @property
    def minimum(self) -> float:
        return float(self.exponents.min())


def lyapunov_ensemble(
    n_points: int,
    iterations: int,
    seed: int,
    spec: LtmSpec,
    map_name: str = "core",
    cap: int = DEFAULT_RETURN_CAP,
) -> LyapunovEnsemble:
    """Vectorized renormalized-transport exponents over a uniform ensemble.

    map_name "core": induced-map returns from core-uniform starts; samples
    whose return time passes the cap are dropped and counted (their partial
    sums would bias the per-return normalization).
    map_name "ltm": composed-map steps from domain-uniform starts.
    """
    import numpy as np

    from . import rng as _rng
    from . import vectorized as vec

    if n_points < 1 or iterations < 1:
        raise ValueError("n_points and iterations must be positive")
    root5 = math.sqrt(5.0)
    if map_name == "core":
        x, y = vec.sample_core(seed, _rng.STREAM_LYAPUNOV, 0, n_points, spec)
        sh = float(spec.slope_h)
        sv = float(spec.slope_v)
        u = np.full(x.shape, 1.0 / root5)
        v = np.full(x.shape, 2.0 / root5)
        acc = np.zeros(x.shape)
        for _ in range(iterations):
            j, k, x, y = vec.core_return_arr(x, y, spec, cap, overflow="mask")
            alive = j >= 0
            if not np.all(alive):
                j, k = j[alive], k[alive]
                x, y, u, v, acc = x[alive], y[alive], u[alive], v[alive], acc[alive]
            b = j * sh
            c = k * sv
            u, v = u + b * v, c * u + (1.0 + b * c) * v
            norm = np.hypot(u, v)
            acc += np.log(norm)
            u /= norm
            v /= norm
        return LyapunovEnsemble(
            exponents=acc / iterations,
            iterations=iterations,
            map_name=map_name,
            dropped=n_points - acc.size,
        )
    if map_name == "ltm":
        x, y = vec.sample_domain(seed, _rng.STREAM_LYAPUNOV, 0, n_points, spec)
        u = np.full(x.shape, 1.0 / root5)
        v = np.full(x.shape, 2.0 / root5)
        acc = np.zeros(x.shape)
        for _ in range(iterations):
            x, y, u, v = vec.ltm_step_with_tangent(x, y, u, v, spec)
            norm = np.hypot(u, v)
            acc += np.log(norm)
            u /= norm
            v /= norm
        return LyapunovEnsemble(
            exponents=acc / iterations,
            iterations=iterations,
            map_name=map_name,
            dropped=0,
        )
    raise ValueError(f"unknown map {map_name!r}")


@dataclass(frozen=True)
class ConeSweep:
    """Violation counts for cone invariance and minimum expansion."""

    samples: int
    cone_violations: int
    expansion_violations: int
    min_ratio: float
    dropped: int
    direction: str

    @property
    def clean(self) -> bool:
        return self.cone_violations == 0 and self.expansion_violations == 0


def cone_sweep(
    samples: int,
    seed: int,
    spec: LtmSpec,
    direction: str = "forward",
    cap: int = DEFAULT_RETURN_CAP,
    shard_size: int = 1_000_000,
) -> ConeSweep:
    """Random (point, cone vector) sweep of the hyperbolicity property.

    direction "forward": unit vectors of slope >= 1 at core-uniform points,
    pushed through the branch matrix; the image must stay in the cone and
    grow by more than sqrt(5) (the true branch minimum is sqrt(29)).
    direction "backward": slope in [-1, 0) vectors through the inverse
    branch matrix at the preimage, same bound. Samples whose return time
    passes the cap are dropped and counted.
    """
    import numpy as np

    from . import rng as _rng
    from . import vectorized as vec

    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    sh = float(spec.slope_h)
    sv = float(spec.slope_v)
    root5 = math.sqrt(5.0)
    cone_bad = 0
    exp_bad = 0
    dropped = 0
    min_ratio = math.inf
    done = 0
    while done < samples:
        m = min(shard_size, samples - done)
        x, y = vec.sample_core(seed, _rng.STREAM_CONES, done, m, spec)
        if direction == "backward":
            u, v = vec.sample_stable_directions(seed, _rng.STREAM_CONE_DIRS, done, m)
            j, k, _, _ = vec.core_return_inv_arr(x, y, spec, cap, overflow="mask")
        else:
            u, v = vec.sample_unstable_directions(seed, _rng.STREAM_CONE_DIRS, done, m)
            j, k, _, _ = vec.core_return_arr(x, y, spec, cap, overflow="mask")
        alive = j >= 0
        dropped += int(m - np.count_nonzero(alive))
        j, k, u, v = j[alive], k[alive], u[alive], v[alive]
        b = j * sh
        c = k * sv
        if direction == "forward":
            u2 = u + b * v
            v2 = c * u + (1.0 + b * c) * v
            in_cone = (u2 == 0) | (u2 * (v2 - u2) >= 0)
        else:
            u2 = (1.0 + b * c) * u - b * v
            v2 = -c * u + v
            in_cone = (v2 == 0) | (v2 * (-u2 - v2) >= 0)
        ratio = np.hypot(u2, v2)
        cone_bad += int(np.count_nonzero(~in_cone))
        exp_bad += int(np.count_nonzero(ratio <= root5))
        if ratio.size:
            min_ratio = min(min_ratio, float(ratio.min()))
        done += m
    return ConeSweep(
        samples=samples,
        cone_violations=cone_bad,
        expansion_violations=exp_bad,
        min_ratio=min_ratio,
        dropped=dropped,
        direction=direction,
    )


# ---------------------------------------------------------------------------
# one-step expansion sums (growth condition for the two-return map)


def one_step_partial_series(n_start: int) -> float:
    """Sum of 1/(24n) over the corner-funnel index window [N, ceil((3+2sqrt2)N)].

    The window ratio is the square of the silver-mean multiplier; the sum
    converges to ln(3 + 2*sqrt(2))/24 ~ 0.0734553 as N grows.
    """
    n_end = math.ceil((3 + 2 * math.sqrt(2)) * n_start)
    return sum(1.0 / (24.0 * n) for n in range(n_start, n_end + 1))


ONE_STEP_SERIES_LIMIT = math.log(3 + 2 * math.sqrt(2)) / 24
