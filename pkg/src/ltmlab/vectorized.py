"""Float64 numpy kernels mirroring the scalar core, for Monte Carlo lanes.

Same conventions as `core`: coordinates live in [0, 2), membership is
closed-interval, the induced map's horizontal leg runs before the vertical
leg. The rotation-skip return solver is the vector twin of the scalar one —
closed form wherever the per-row step cannot jump the core band (always, in
canonical geometry), masked iteration otherwise — so return times of any
size cost O(1). Candidates get the same +-1 membership verification.

These kernels are estimator plumbing, not a public numeric type: points
within ~1e-15 of a singularity line may classify to either side, exactly as
the float scalar path does.
"""

from __future__ import annotations

import numpy as np

from .core import DEFAULT_RETURN_CAP, LtmSpec, ReturnTimeOverflow
from . import rng as _rng

MOD = 2.0


def _spec_floats(spec: LtmSpec) -> tuple:
    return (
        float(spec.y_lo),
        float(spec.y_hi),
        float(spec.x_lo),
        float(spec.x_hi),
        float(spec.slope_h),
        float(spec.slope_v),
    )


def in_core_arr(x: np.ndarray, y: np.ndarray, spec: LtmSpec) -> np.ndarray:
    y_lo, y_hi, x_lo, x_hi, _, _ = _spec_floats(spec)
    return (x >= x_lo) & (x <= x_hi) & (y >= y_lo) & (y <= y_hi)


def ltm_step(x: np.ndarray, y: np.ndarray, spec: LtmSpec) -> tuple:
    """One composed-map step (vertical twist after horizontal twist)."""
    y_lo, y_hi, x_lo, x_hi, sh, sv = _spec_floats(spec)
    hmask = (y >= y_lo) & (y <= y_hi)
    x = np.where(hmask, (x + sh * (y - y_lo)) % MOD, x)
    vmask = (x >= x_lo) & (x <= x_hi)
    y = np.where(vmask, (y + sv * (x - x_lo)) % MOD, y)
    return x, y


def ltm_step_inv(x: np.ndarray, y: np.ndarray, spec: LtmSpec) -> tuple:
    y_lo, y_hi, x_lo, x_hi, sh, sv = _spec_floats(spec)
    vmask = (x >= x_lo) & (x <= x_hi)
    y = np.where(vmask, (y - sv * (x - x_lo)) % MOD, y)
    hmask = (y >= y_lo) & (y <= y_hi)
    x = np.where(hmask, (x - sh * (y - y_lo)) % MOD, x)
    return x, y


def ltm_step_with_tangent(
    x: np.ndarray, y: np.ndarray, u: np.ndarray, v: np.ndarray, spec: LtmSpec
) -> tuple:
    """One composed-map step carrying tangent vectors through the twist
    derivatives, with masks identical to ltm_step's."""
    y_lo, y_hi, x_lo, x_hi, sh, sv = _spec_floats(spec)
    hmask = (y >= y_lo) & (y <= y_hi)
    x = np.where(hmask, (x + sh * (y - y_lo)) % MOD, x)
    u = np.where(hmask, u + sh * v, u)
    vmask = (x >= x_lo) & (x <= x_hi)
    y = np.where(vmask, (y + sv * (x - x_lo)) % MOD, y)
    v = np.where(vmask, v + sv * u, v)
    return x, y, u, v


def rotation_return_arr(
    pos: np.ndarray,
    step: np.ndarray,
    lo: float,
    hi: float,
    cap: int = DEFAULT_RETURN_CAP,
    overflow: str = "raise",
) -> np.ndarray:
    """Vector twin of the scalar rotation-return solver. int64 return times.

    pos must lie on the closed arc [lo, hi]. Entries whose analytic
    candidates all fail verification (float edge cases) and entries needing
    the iteration lane are resolved by a compressed masked loop. Return
    times above cap raise ReturnTimeOverflow, or come back as -1 with
    overflow='mask' so ensemble estimators can drop and count them.
    """
    s = np.mod(step, MOD)
    length = hi - lo
    fwd = (s > 0) & (s <= length)
    mir = s >= (MOD - length)
    triv = s == 0
    analytic = fwd | (mir & ~triv)

    su = np.where(mir & ~fwd, MOD - s, s)
    u0 = np.where(mir & ~fwd, np.mod(hi - pos, MOD), np.mod(pos - lo, MOD))
    su_safe = np.where(analytic, su, 1.0)

    u1 = u0 + su
    one_step = np.mod(u1, MOD) <= length
    gap = MOD - u1
    cand = 1.0 + np.ceil(gap / su_safe)

    m = np.ones_like(pos, dtype=np.int64)
    need = analytic & ~one_step
    if np.any(need):
        c1 = cand
        c0 = cand - 1.0
        c2 = cand + 1.0
        ok0 = (c0 >= 1.0) & (np.mod(u0 + c0 * su_safe, MOD) <= length)
        ok1 = np.mod(u0 + c1 * su_safe, MOD) <= length
        ok2 = np.mod(u0 + c2 * su_safe, MOD) <= length
        pick = np.where(ok0, c0, np.where(ok1, c1, np.where(ok2, c2, -1.0)))
        bad = need & (pick < 0)
        m = np.where(need, np.minimum(pick, float(cap) + 1.0).astype(np.int64), m)
        if np.any(bad):
            m = _iterate_lane(pos, s, lo, hi, cap, m, bad)
    iterate = ~analytic & ~triv
    if np.any(iterate):
        m = _iterate_lane(pos, s, lo, hi, cap, m, iterate)
    over = m > cap
    if np.any(over):
        if overflow != "mask":
            idx = int(np.argmax(over))
            raise ReturnTimeOverflow((float(pos[idx]), float(step[idx])), cap)
        m = np.where(over, np.int64(-1), m)
    return m


def _iterate_lane(pos, s, lo, hi, cap, m, mask) -> np.ndarray:
    idx = np.flatnonzero(mask)
    cur = pos[idx].copy()
    st = s[idx]
    out = np.full(idx.size, cap + 1, dtype=np.int64)
    alive = np.arange(idx.size)
    count = 0
    while alive.size and count <= cap:
        count += 1
        cur = (cur + st) % MOD
        done = (cur >= lo) & (cur <= hi)
        out[alive[done]] = count
        alive = alive[~done]
        cur = cur[~done]
        st = st[~done]
    m = m.copy()
    m[idx] = out
    return m


def h_return_arr(
    x: np.ndarray,
    y: np.ndarray,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    overflow: str = "raise",
) -> tuple:
    """(j, x_image) of the horizontal shear's return map at core-square points."""
    y_lo, _, x_lo, x_hi, sh, _ = _spec_floats(spec)
    shift = np.mod(sh * (y - y_lo), MOD)
    j = rotation_return_arr(x, shift, x_lo, x_hi, cap, overflow)
    return j, np.where(j < 0, x, (x + j * shift) % MOD)


def v_return_arr(
    x: np.ndarray,
    y: np.ndarray,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    overflow: str = "raise",
) -> tuple:
    y_lo, y_hi, x_lo, _, _, sv = _spec_floats(spec)
    shift = np.mod(sv * (x - x_lo), MOD)
    k = rotation_return_arr(y, shift, y_lo, y_hi, cap, overflow)
    return k, np.where(k < 0, y, (y + k * shift) % MOD)


def core_return_arr(
    x: np.ndarray,
    y: np.ndarray,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    overflow: str = "raise",
) -> tuple:
    """(j, k, x', y') of the induced map at core-square points, vectorized.

    With overflow='mask', unresolved samples carry j = k = -1 and keep their
    original coordinates.
    """
    j, x1 = h_return_arr(x, y, spec, cap, overflow)
    k, y1 = v_return_arr(x1, y, spec, cap, overflow)
    if overflow == "mask":
        bad = (j < 0) | (k < 0)
        j = np.where(bad, np.int64(-1), j)
        k = np.where(bad, np.int64(-1), k)
        x1 = np.where(bad, x, x1)
        y1 = np.where(bad, y, y1)
    return j, k, x1, y1


def core_return_inv_arr(
    x: np.ndarray,
    y: np.ndarray,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    overflow: str = "raise",
) -> tuple:
    """(j, k, x', y') of the inverse induced map; (j, k) are forward labels at the preimage.

    With overflow='mask', unresolved samples carry j = k = -1 and keep their
    original coordinates.
    """
    y_lo, y_hi, x_lo, x_hi, sh, sv = _spec_floats(spec)
    vshift = np.mod(sv * (x - x_lo), MOD)
    k = rotation_return_arr(y, np.mod(-vshift, MOD), y_lo, y_hi, cap, overflow)
    y1 = np.where(k < 0, y, (y - k * vshift) % MOD)
    hshift = np.mod(sh * (y1 - y_lo), MOD)
    j = rotation_return_arr(x, np.mod(-hshift, MOD), x_lo, x_hi, cap, overflow)
    x1 = np.where(j < 0, x, (x - j * hshift) % MOD)
    if overflow == "mask":
        bad = (j < 0) | (k < 0)
        j = np.where(bad, np.int64(-1), j)
        k = np.where(bad, np.int64(-1), k)
        x1 = np.where(bad, x, x1)
        y1 = np.where(bad, y, y1)
    return j, k, x1, y1


def classify_arr(
    x: np.ndarray, y: np.ndarray, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> tuple:
    """Branch labels (j, k) of the induced map; first-return time is j + k - 1."""
    j, k, _, _ = core_return_arr(x, y, spec, cap)
    return j, k


def two_step_labels(
    x: np.ndarray, y: np.ndarray, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> tuple:
    """(j1, k1, j2, k2) over two successive induced-map returns."""
    j1, k1, x1, y1 = core_return_arr(x, y, spec, cap)
    j2, k2, _, _ = core_return_arr(x1, y1, spec, cap)
    return j1, k1, j2, k2


def ltm_return_counts(
    x: np.ndarray, y: np.ndarray, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> np.ndarray:
    """First-return times to the core square under the composed map, by iteration.

    The honest cross-check for j + k - 1: applies the composed map until
    every point re-enters the core square, compressing finished points away.
    """
    n = np.zeros(x.shape, dtype=np.int64)
    alive = np.arange(x.size)
    cx = x.copy()
    cy = y.copy()
    count = 0
    while alive.size:
        count += 1
        if count > cap:
            raise ReturnTimeOverflow((float(cx[0]), float(cy[0])), cap)
        cx, cy = ltm_step(cx, cy, spec)
        done = in_core_arr(cx, cy, spec)
        n[alive[done]] = count
        alive = alive[~done]
        cx = cx[~done]
        cy = cy[~done]
    return n


# ---------------------------------------------------------------------------
# samplers (deterministic per index; see rng module)


def sample_core(
    seed: int, tag: int, start: int, count: int, spec: LtmSpec
) -> tuple:
    """Uniform points of the core square for sample indices [start, start+count)."""
    y_lo, y_hi, x_lo, x_hi, _, _ = _spec_floats(spec)
    u = _rng.uniform_block(seed, tag, start, count, 2)
    return x_lo + (x_hi - x_lo) * u[:, 0], y_lo + (y_hi - y_lo) * u[:, 1]


def sample_domain(
    seed: int, tag: int, start: int, count: int, spec: LtmSpec
) -> tuple:
    """Uniform points of the union of annuli (area-weighted, rejection-free)."""
    y_lo, y_hi, x_lo, x_hi, _, _ = _spec_floats(spec)
    band_h = y_hi - y_lo
    band_v = x_hi - x_lo
    area_h = MOD * band_h
    area_rest = band_v * (MOD - band_h)
    u = _rng.uniform_block(seed, tag, start, count, 4)
    in_h = u[:, 0] * (area_h + area_rest) < area_h
    x = np.where(in_h, MOD * u[:, 1], x_lo + band_v * u[:, 1])
    y = np.where(in_h, y_lo + band_h * u[:, 2], (y_hi + (MOD - band_h) * u[:, 2]) % MOD)
    return x, y


def sample_unstable_directions(
    seed: int, tag: int, start: int, count: int
) -> tuple:
    """Unit vectors uniform (in angle) over the unstable cone, slope >= 1."""
    u = _rng.uniform_block(seed, tag, start, count, 1)
    theta = np.pi / 4 + (np.pi / 4) * u[:, 0]
    return np.cos(theta), np.sin(theta)


def sample_stable_directions(
    seed: int, tag: int, start: int, count: int
) -> tuple:
    """Unit vectors uniform (in angle) over the stable cone, slope in [-1, 0]."""
    u = _rng.uniform_block(seed, tag, start, count, 1)
    theta = -np.pi / 4 * u[:, 0]
    return np.cos(theta), np.sin(theta)
