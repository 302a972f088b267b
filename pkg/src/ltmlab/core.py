"""Core dynamics: the linked twist on the 2-torus and its first-return maps.

The phase space is the flat torus with both coordinates taken mod 2. Two
annuli are linked through a common square:

    horizontal annulus  P = (all x) x [y_lo, y_hi]
    vertical annulus    Q = [x_lo, x_hi] x (all y)
    core square         S = P n Q

A shear supported on P twists x by an amount linear in y (full wraps across
the annulus), a second shear supported on Q twists y by an amount linear in
x, and the composition — vertical twist after horizontal twist — is the
linked-twist map studied here. Both shears are identity off their annulus
and preserve Lebesgue measure; membership tests use closed intervals so the
annulus boundaries are honored exactly.

Everything in this module is scalar and backend-polymorphic: coordinates may
be Python floats or `fractions.Fraction`s and the same code runs both ways
(mod, comparisons and `math.ceil` are exact on Fractions). Vectorized
float-only kernels live in `vectorized.py`.

Return times are computed two ways: honest step-by-step iteration, and a
closed-form "rotation skip" (within each annulus the shear acts on the
twisting coordinate as a fixed circle rotation, so the first entry time into
the core band is a ceiling expression). The skip path verifies its candidate
by a +-1 membership search and both paths are cross-checked in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Union

Scalar = Union[int, float, Fraction]
Backend = Literal["float", "rational"]

#: circumference of each torus direction
MOD = 2

DEFAULT_RETURN_CAP = 10_000_000


class ReturnTimeOverflow(Exception):
    """First-return iteration exceeded its cap (point likely never returns)."""

    def __init__(self, point, cap):
        super().__init__(f"no return within {cap} steps from {point}")
        self.point = point
        self.cap = cap


def wrap(v: Scalar) -> Scalar:
    """Reduce a coordinate mod 2 into [0, 2). Exact for Fractions."""
    return v % MOD


def as_scalar(v, backend: Backend) -> Scalar:
    """Coerce a number (or 'p/q' / decimal string) into the backend's scalar type."""
    if backend == "rational":
        if isinstance(v, float):
            return Fraction(v)  # exact binary expansion, deterministic
        return Fraction(v)
    if backend == "float":
        return float(Fraction(v)) if isinstance(v, str) else float(v)
    raise ValueError(f"unknown backend {backend!r}")


def scalar_str(v: Scalar) -> str:
    """Serialize a scalar: 'num/den' for rationals, repr (round-trip) for floats."""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def parse_scalar(s: str, backend: Backend) -> Scalar:
    return as_scalar(s, backend)


@dataclass(frozen=True)
class TorusPoint:
    """A point on the torus, both coordinates wrapped into [0, 2)."""

    x: Scalar
    y: Scalar

    @classmethod
    def of(cls, x: Scalar, y: Scalar) -> "TorusPoint":
        return cls(wrap(x), wrap(y))

    def as_floats(self) -> tuple:
        return (float(self.x), float(self.y))

    def astuple(self) -> tuple:
        return (self.x, self.y)


@dataclass(frozen=True)
class LtmSpec:
    """Geometry of the linked annuli and the wrap counts of the two shears.

    The horizontal annulus spans y in [y_lo, y_hi]; crossing it, the shear
    displaces x by 2*wrap_h (wrap_h full torus wraps). Likewise for the
    vertical annulus in x. The canonical workbench geometry is both bands
    equal to [0, 1] with single wraps, for which the horizontal shear is
    (x, y) -> (x + 2y, y) on its annulus.
    """

    y_lo: Scalar = 0
    y_hi: Scalar = 1
    x_lo: Scalar = 0
    x_hi: Scalar = 1
    wrap_h: int = 1
    wrap_v: int = 1

    def __post_init__(self):
        if not (0 <= self.y_lo < self.y_hi <= MOD and 0 <= self.x_lo < self.x_hi <= MOD):
            raise ValueError("annulus bands must be ordered within [0, 2]")
        if self.wrap_h < 1 or self.wrap_v < 1:
            raise ValueError("wrap counts must be positive integers")

    @classmethod
    def canonical(cls) -> "LtmSpec":
        return cls(0, 1, 0, 1, 1, 1)

    @property
    def is_canonical(self) -> bool:
        return (self.y_lo, self.y_hi, self.x_lo, self.x_hi) == (0, 1, 0, 1) and (
            self.wrap_h == self.wrap_v == 1
        )

    # twist slopes: d(shift)/d(transverse coordinate)
    @property
    def slope_h(self) -> Scalar:
        return _ratio(MOD * self.wrap_h, self.y_hi - self.y_lo)

    @property
    def slope_v(self) -> Scalar:
        return _ratio(MOD * self.wrap_v, self.x_hi - self.x_lo)

    def h_shift(self, y: Scalar) -> Scalar:
        """x-displacement of the horizontal shear on its annulus, mod 2."""
        return wrap(self.slope_h * (y - self.y_lo))

    def v_shift(self, x: Scalar) -> Scalar:
        return wrap(self.slope_v * (x - self.x_lo))

    def center(self) -> TorusPoint:
        return TorusPoint.of(
            _ratio(self.x_lo + self.x_hi, 2), _ratio(self.y_lo + self.y_hi, 2)
        )

    def corner_br(self) -> TorusPoint:
        """Corner of the core square where long-return cells accumulate (canonical: (1,0))."""
        return TorusPoint.of(self.x_hi, self.y_lo)

    def corner_tl(self) -> TorusPoint:
        return TorusPoint.of(self.x_lo, self.y_hi)

    def to_dict(self) -> dict:
        return {
            "y_lo": scalar_str(self.y_lo),
            "y_hi": scalar_str(self.y_hi),
            "x_lo": scalar_str(self.x_lo),
            "x_hi": scalar_str(self.x_hi),
            "wrap_h": self.wrap_h,
            "wrap_v": self.wrap_v,
        }

    @classmethod
    def from_dict(cls, d: dict, backend: Backend = "rational") -> "LtmSpec":
        conv = lambda v: as_scalar(v, backend)
        return cls(
            conv(d.get("y_lo", 0)),
            conv(d.get("y_hi", 1)),
            conv(d.get("x_lo", 0)),
            conv(d.get("x_hi", 1)),
            int(d.get("wrap_h", 1)),
            int(d.get("wrap_v", 1)),
        )


def _ratio(a: Scalar, b: Scalar) -> Scalar:
    """a/b staying exact when both ends are int/Fraction."""
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return Fraction(a, 1) / Fraction(b, 1) if not isinstance(a, Fraction) else a / b


# ---------------------------------------------------------------------------
# membership


def in_h_annulus(z: TorusPoint, spec: LtmSpec) -> bool:
    return spec.y_lo <= z.y <= spec.y_hi


def in_v_annulus(z: TorusPoint, spec: LtmSpec) -> bool:
    return spec.x_lo <= z.x <= spec.x_hi


def in_core(z: TorusPoint, spec: LtmSpec) -> bool:
    return in_h_annulus(z, spec) and in_v_annulus(z, spec)


def in_domain(z: TorusPoint, spec: LtmSpec) -> bool:
    """Union of the two annuli — where the linked-twist map acts nontrivially."""
    return in_h_annulus(z, spec) or in_v_annulus(z, spec)


# ---------------------------------------------------------------------------
# the two shears and their composition


def h_twist(z: TorusPoint, spec: LtmSpec) -> TorusPoint:
    """Horizontal shear: x += slope_h * (y - y_lo) on its annulus, identity off it."""
    if in_h_annulus(z, spec):
        return TorusPoint.of(z.x + spec.slope_h * (z.y - spec.y_lo), z.y)
    return z


def v_twist(z: TorusPoint, spec: LtmSpec) -> TorusPoint:
    if in_v_annulus(z, spec):
        return TorusPoint.of(z.x, z.y + spec.slope_v * (z.x - spec.x_lo))
    return z


def h_twist_inv(z: TorusPoint, spec: LtmSpec) -> TorusPoint:
    if in_h_annulus(z, spec):
        return TorusPoint.of(z.x - spec.slope_h * (z.y - spec.y_lo), z.y)
    return z


def v_twist_inv(z: TorusPoint, spec: LtmSpec) -> TorusPoint:
    if in_v_annulus(z, spec):
        return TorusPoint.of(z.x, z.y - spec.slope_v * (z.x - spec.x_lo))
    return z


def ltm(z: TorusPoint, spec: LtmSpec) -> TorusPoint:
    """One step of the linked-twist map: vertical twist after horizontal twist."""
    return v_twist(h_twist(z, spec), spec)


def ltm_inv(z: TorusPoint, spec: LtmSpec) -> TorusPoint:
    return h_twist_inv(v_twist_inv(z, spec), spec)


# ---------------------------------------------------------------------------
# first-return machinery
#
# Within its annulus each shear moves the twisting coordinate by a constant
# step per iterate (the transverse coordinate is frozen), i.e. it is a circle
# rotation. First entry of a rotation orbit into a closed arc has a closed
# form whenever the step cannot jump the arc, which covers every canonical
# case; otherwise we fall back to honest iteration.


def _rotation_return(x0: Scalar, step: Scalar, lo: Scalar, hi: Scalar, cap: int) -> int:
    """Minimal m >= 1 with (x0 + m*step) mod 2 in [lo, hi].

    Assumes x0 itself lies in [lo, hi] (we are timing a *return*). Closed
    form when the step cannot jump the arc — step <= arc length, or
    step >= 2 - arc length via the mirror x -> hi - x — and bounded
    iteration otherwise. Raises ReturnTimeOverflow past `cap`.
    """
    s = wrap(step)
    if s == 0:
        return 1  # the rotation is trivial; the point never leaves the arc
    length = hi - lo
    if s <= length:
        # shift coordinates so the arc is [0, length]
        return _monotone_entry(wrap(x0 - lo), s, length, cap)
    if s >= MOD - length:
        # mirroring turns the step into 2 - s <= length and keeps the arc at [0, length]
        return _monotone_entry(wrap(hi - x0), MOD - s, length, cap)
    # step can jump the arc: no closed form, iterate
    return _iterate_return(x0, s, lo, hi, cap)


def _monotone_entry(u0: Scalar, s: Scalar, length: Scalar, cap: int) -> int:
    """Entry time into the arc [0, length] for a rotation by 0 < s <= length.

    `u0` already lies on the arc. The walk leaves through the far end and
    cannot jump the arc on wrapping, so the first re-entry is one ceiling
    away; a +-1 membership search absorbs float rounding (exact inputs
    always confirm the candidate itself).
    """
    u1 = u0 + s
    if u1 % MOD <= length:
        return 1
    cand = 1 + _ceil_div(MOD - u1, s)
    for m in (cand - 1, cand, cand + 1):
        if m >= 1 and (u0 + m * s) % MOD <= length:
            if m > cap:
                raise ReturnTimeOverflow((u0, s), cap)
            return m
    # float rounding pushed every candidate off the arc; fall back
    return _iterate_return(u0, s, 0, length, cap)


def _ceil_div(a: Scalar, b: Scalar) -> int:
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        return math.ceil(Fraction(a) / Fraction(b))
    return math.ceil(a / b)


def return_time_h(
    z: TorusPoint,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    method: str = "skip",
    inverse: bool = False,
) -> int:
    """First-return time of the horizontal shear (or its inverse) to the core square.

    `method="skip"` uses the rotation closed form with +-1 verification;
    `method="iterate"` applies the shear step by step. Both must agree and
    tests enforce it.
    """
    if not in_core(z, spec):
        raise ValueError(f"{z} is not in the core square")
    step = spec.h_shift(z.y)
    if inverse:
        step = wrap(-step)
    if method == "iterate":
        return _iterate_return(z.x, step, spec.x_lo, spec.x_hi, cap)
    return _rotation_return(z.x, step, spec.x_lo, spec.x_hi, cap)


def return_time_v(
    z: TorusPoint,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    method: str = "skip",
    inverse: bool = False,
) -> int:
    """First-return time of the vertical shear (or its inverse) to the core square."""
    if not in_core(z, spec):
        raise ValueError(f"{z} is not in the core square")
    step = spec.v_shift(z.x)
    if inverse:
        step = wrap(-step)
    if method == "iterate":
        return _iterate_return(z.y, step, spec.y_lo, spec.y_hi, cap)
    return _rotation_return(z.y, step, spec.y_lo, spec.y_hi, cap)


def _iterate_return(x0: Scalar, step: Scalar, lo: Scalar, hi: Scalar, cap: int) -> int:
    pos = x0
    for m in range(1, cap + 1):
        pos = wrap(pos + step)
        if lo <= pos <= hi:
            return m
    raise ReturnTimeOverflow((x0, step), cap)


def h_twist_return(
    z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> tuple:
    """(image, steps) of the horizontal shear's first-return map on the core square."""
    j = return_time_h(z, spec, cap)
    img = TorusPoint.of(z.x + j * spec.h_shift(z.y), z.y)
    return img, j


def v_twist_return(
    z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> tuple:
    k = return_time_v(z, spec, cap)
    img = TorusPoint.of(z.x, z.y + k * spec.v_shift(z.x))
    return img, k


def h_twist_return_inv(
    z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> tuple:
    j = return_time_h(z, spec, cap, inverse=True)
    img = TorusPoint.of(z.x - j * spec.h_shift(z.y), z.y)
    return img, j


def v_twist_return_inv(
    z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> tuple:
    k = return_time_v(z, spec, cap, inverse=True)
    img = TorusPoint.of(z.x, z.y - k * spec.v_shift(z.x))
    return img, k


@dataclass(frozen=True)
class ReturnOutcome:
    """One application of the induced (first-return) linked-twist map.

    j  — steps of the horizontal shear until its return to the core square
    k  — steps of the vertical shear from there until its return
    n  — first-return time of the composed map: n = j + k - 1
    deriv — branch derivative; canonical geometry gives the integer matrix
            [[1, 2j], [2k, 4jk + 1]] with determinant one.
    """

    image: TorusPoint
    j: int
    k: int
    n: int
    deriv: "object"  # cocycle.Mat2; kept loose to avoid a circular import


def core_return(
    z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> ReturnOutcome:
    """Induced linked-twist map on the core square (vertical leg after horizontal leg).

    The composed first-return time satisfies n = j + k - 1: of the j+k shear
    steps, the middle visit where the horizontal leg re-enters the core
    square is shared, because the vertical shear starts acting there within
    the same composed step.
    """
    from .cocycle import branch_matrix  # local import; cocycle depends on core

    mid, j = h_twist_return(z, spec, cap)
    img, k = v_twist_return(mid, spec, cap)
    return ReturnOutcome(image=img, j=j, k=k, n=j + k - 1, deriv=branch_matrix(j, k, spec))


def core_return_inv(
    z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> ReturnOutcome:
    """Inverse of the induced map: horizontal leg after vertical leg, both reversed.

    The (j, k) reported are the branch labels of the forward map at the
    preimage, so `deriv` is the forward branch matrix there; invert it to
    transport tangent vectors backward.
    """
    from .cocycle import branch_matrix

    mid, k = v_twist_return_inv(z, spec, cap)
    img, j = h_twist_return_inv(mid, spec, cap)
    return ReturnOutcome(image=img, j=j, k=k, n=j + k - 1, deriv=branch_matrix(j, k, spec))


def return_time_ltm(
    z: TorusPoint, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> int:
    """Steps until the composed-map orbit of z next lands in the core square.

    First-return time for z inside the core square, first-entry time for z
    outside it (the mixed reading the worst-gap statistics quantify over).
    Honest iteration; points that never arrive overflow at the cap.
    """
    w = z
    for n in range(1, cap + 1):
        w = ltm(w, spec)
        if in_core(w, spec):
            return n
    raise ReturnTimeOverflow(z.astuple(), cap)


def orbit(
    z: TorusPoint, spec: LtmSpec, steps: int, map_name: str = "ltm",
    cap: int = DEFAULT_RETURN_CAP,
) -> list:
    """Forward orbit [z, T(z), ..., T^steps(z)] under a named map.

    map_name: "ltm" (composed map), "h" / "v" (single shears), or "core"
    (induced first-return map on the core square).
    """
    maps = {
        "ltm": lambda w: ltm(w, spec),
        "h": lambda w: h_twist(w, spec),
        "v": lambda w: v_twist(w, spec),
        "core": lambda w: core_return(w, spec, cap).image,
    }
    if map_name not in maps:
        raise ValueError(f"unknown map {map_name!r}")
    step = maps[map_name]
    out = [z]
    for _ in range(steps):
        out.append(step(out[-1]))
    return out


def points_equal(a: TorusPoint, b: TorusPoint, tol: float = 0.0) -> bool:
    """Equality on the torus, with optional float tolerance honoring the wrap."""
    if tol == 0:
        return wrap(a.x - b.x) == 0 and wrap(a.y - b.y) == 0
    dx = abs(wrap(a.x - b.x))
    dy = abs(wrap(a.y - b.y))
    return min(dx, MOD - dx) <= tol and min(dy, MOD - dy) <= tol
