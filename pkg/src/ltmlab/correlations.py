"""Correlation decay and return-statistics estimators for the twist maps.

The headline quantity is the covariance of one observable composed with the
n-th map iterate against another observable, estimated by deterministic
Monte Carlo over the invariant (Lebesgue) measure: polynomially decaying
for the full torus map, below the noise floor within a couple dozen steps
for the induced core-square map. Alongside it live the supporting
statistics: visit counts to the core square, worst return gaps over a
horizon, the split of phase space by visit count with the resulting gap
bound, isolation of large-return cells, and tail decompositions of
large-cell hits along orbits.

Measures are normalized to probability: the sampling domain for the full
map is the two-annulus union (area 3 in canonical geometry), and all
reported fractions refer to it; core-square statistics refer to the core
square (area 1). Every estimator is sharded with a counter-based RNG, so
results are independent of shard size and reproducible bit-for-bit for a
given (seed, size) on the float path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import rng as _rng
from . import vectorized as vec
from .core import (
    DEFAULT_RETURN_CAP,
    LtmSpec,
    TorusPoint,
    in_core,
    ltm,
    return_time_ltm,
)
from .util import MeasureEstimate, binomial_estimate, linear_fit


@dataclass(frozen=True)
class Observable:
    """A real observable on the torus, vectorized over coordinate arrays.

    holder_alpha/holder_const bound |f(z) - f(w)| <= C d(z,w)^alpha; the
    built-ins are smooth, so alpha = 1 with the gradient bound as C.
    mean_zero asserts a vanishing integral over the two-annulus union
    under normalized Lebesgue measure (canonical geometry).
    """

    name: str
    fn: Callable
    holder_alpha: float = 1.0
    holder_const: float = math.pi
    mean_zero: bool = True

    def __call__(self, x, y):
        return self.fn(x, y)

    def at(self, z: TorusPoint) -> float:
        return float(self.fn(np.float64(z.x), np.float64(z.y)))


def builtin_observables() -> list:
    """cos(pi x), cos(pi y), and their product: 1-Lipschitz-constant-pi
    observables with exact zero mean over the two-annulus union (each
    annulus integrates a full cosine period in one coordinate, and the
    off-core strip of the other annulus integrates cos over [0,1])."""
    return [
        Observable("cos_px", lambda x, y: np.cos(np.pi * x)),
        Observable("cos_py", lambda x, y: np.cos(np.pi * y)),
        Observable("cos_pxy", lambda x, y: np.cos(np.pi * x) * np.cos(np.pi * y)),
    ]


def observable_by_name(name: str) -> Observable:
    for obs in builtin_observables():
        if obs.name == name:
            return obs
    raise KeyError(f"unknown observable {name!r}")


@dataclass(frozen=True)
class CorrSeries:
    """Estimated correlation curve: one row per lag n in 0..n_max."""

    n: np.ndarray
    c: np.ndarray
    stderr: np.ndarray
    n_eff: np.ndarray
    ensemble: int
    seed: int
    map_name: str

    def rows(self):
        return zip(
            self.n.tolist(), self.c.tolist(), self.stderr.tolist(), self.n_eff.tolist()
        )


def estimate_correlation(
    phi: Observable,
    psi: Observable,
    n_max: int,
    ensemble: int,
    seed: int,
    spec: LtmSpec,
    shard_size: int = _rng.DEFAULT_SHARD,
) -> CorrSeries:
    """Correlation of phi after n full-map steps against psi at time zero.

    One uniform ensemble on the two-annulus union; each orbit is stepped
    once and reused for every lag. psi is assumed mean-zero, so no product
    term is subtracted. Standard errors are i.i.d. sample errors of the
    integrand phi(H^n z) psi(z).
    """
    s1 = np.zeros(n_max + 1)
    s2 = np.zeros(n_max + 1)
    for start, stop in _rng.shard_ranges(ensemble, shard_size):
        x, y = vec.sample_domain(seed, _rng.STREAM_CORR_FULL, start, stop - start, spec)
        psi0 = psi(x, y)
        w = phi(x, y) * psi0
        s1[0] += w.sum()
        s2[0] += (w * w).sum()
        for n in range(1, n_max + 1):
            x, y = vec.ltm_step(x, y, spec)
            w = phi(x, y) * psi0
            s1[n] += w.sum()
            s2[n] += (w * w).sum()
    mean = s1 / ensemble
    var = np.maximum(s2 / ensemble - mean * mean, 0.0)
    return CorrSeries(
        n=np.arange(n_max + 1),
        c=mean,
        stderr=np.sqrt(var / ensemble),
        n_eff=np.full(n_max + 1, ensemble, dtype=np.int64),
        ensemble=ensemble,
        seed=seed,
        map_name="ltm",
    )


def estimate_correlation_core(
    phi: Observable,
    psi: Observable,
    n_max: int,
    ensemble: int,
    seed: int,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
    shard_size: int = _rng.DEFAULT_SHARD,
) -> CorrSeries:
    """Correlation under the induced core-square map, uniform on the core.

    Samples whose return time ever exceeds the cap are dropped from that
    lag onward and counted out of n_eff (they are astronomically rare:
    a float64 coordinate must sit within ~cap^-1 of the core edge).
    """
    s1 = np.zeros(n_max + 1)
    s2 = np.zeros(n_max + 1)
    eff = np.zeros(n_max + 1, dtype=np.int64)
    for start, stop in _rng.shard_ranges(ensemble, shard_size):
        x, y = vec.sample_core(seed, _rng.STREAM_CORR_CORE, start, stop - start, spec)
        psi0 = psi(x, y)
        w = phi(x, y) * psi0
        s1[0] += w.sum()
        s2[0] += (w * w).sum()
        eff[0] += x.size
        for n in range(1, n_max + 1):
            j, _, x, y = vec.core_return_arr(x, y, spec, cap, overflow="mask")
            alive = j >= 0
            if not np.all(alive):
                x, y, psi0 = x[alive], y[alive], psi0[alive]
            w = phi(x, y) * psi0
            s1[n] += w.sum()
            s2[n] += (w * w).sum()
            eff[n] += x.size
    eff_safe = np.maximum(eff, 1)
    mean = s1 / eff_safe
    var = np.maximum(s2 / eff_safe - mean * mean, 0.0)
    return CorrSeries(
        n=np.arange(n_max + 1),
        c=mean,
        stderr=np.sqrt(var / eff_safe),
        n_eff=eff,
        ensemble=ensemble,
        seed=seed,
        map_name="core",
    )


def shuffled_null(
    phi: Observable,
    psi: Observable,
    n_max: int,
    ensemble: int,
    seed: int,
    spec: LtmSpec,
) -> CorrSeries:
    """The estimator run with psi on an independent ensemble: a pure-noise
    baseline whose values must sit within a few stderr of zero at every lag."""
    s1 = np.zeros(n_max + 1)
    s2 = np.zeros(n_max + 1)
    for start, stop in _rng.shard_ranges(ensemble, _rng.DEFAULT_SHARD):
        x, y = vec.sample_domain(seed, _rng.STREAM_CORR_FULL, start, stop - start, spec)
        x2, y2 = vec.sample_domain(
            seed + 1, _rng.STREAM_CORR_FULL, start, stop - start, spec
        )
        psi0 = psi(x2, y2)
        for n in range(n_max + 1):
            if n:
                x, y = vec.ltm_step(x, y, spec)
            w = phi(x, y) * psi0
            s1[n] += w.sum()
            s2[n] += (w * w).sum()
    mean = s1 / ensemble
    var = np.maximum(s2 / ensemble - mean * mean, 0.0)
    return CorrSeries(
        n=np.arange(n_max + 1),
        c=mean,
        stderr=np.sqrt(var / ensemble),
        n_eff=np.full(n_max + 1, ensemble, dtype=np.int64),
        ensemble=ensemble,
        seed=seed,
        map_name="ltm-shuffled",
    )


# ---------------------------------------------------------------------------
# visit counts and worst return gaps


def r_count(z: TorusPoint, n: int, spec: LtmSpec) -> int:
    """How many of the first n full-map images of z lie in the core square."""
    if n < 1:
        raise ValueError("n must be >= 1")
    count = 0
    w = z
    for _ in range(n):
        w = ltm(w, spec)
        if in_core(w, spec):
            count += 1
    return count


def n_max_stat(
    z: TorusPoint, n: int, spec: LtmSpec, cap: int = DEFAULT_RETURN_CAP
) -> int:
    """Largest first-entry time to the core square over the orbit prefix.

    The maximum, over the first n composed-map images of z (and z itself),
    of the number of further full-map steps each needs to reach the core
    square; the values near the horizon look past it, as far as the cap.
    """
    best = 0
    w = z
    for i in range(n + 1):
        best = max(best, return_time_ltm(w, spec, cap))
        w = ltm(w, spec)
    return best


def _gap_scan_arrays(
    x: np.ndarray,
    y: np.ndarray,
    n: int,
    spec: LtmSpec,
    cap: int,
    lookahead: int,
) -> tuple:
    """Per-sample (r, max_gap) over horizon n, resolving final gaps by lookahead.

    max_gap is the vector twin of the worst-entry-time statistic: gaps
    between consecutive core-square entries (the leading gap from step 0
    included), with the gap pending at the horizon chased up to `lookahead`
    extra steps; unresolved samples get the lower bound and are counted.
    """
    count = np.zeros(x.shape, dtype=np.int64)
    prev = np.zeros(x.shape, dtype=np.int64)
    gap = np.zeros(x.shape, dtype=np.int64)
    for i in range(1, n + 1):
        x, y = vec.ltm_step(x, y, spec)
        hit = vec.in_core_arr(x, y, spec)
        count += hit
        np.maximum(gap, np.where(hit, i - prev, 0), out=gap)
        prev = np.where(hit, i, prev)
    # chase the gap pending at the horizon
    idx = np.arange(x.size)
    cx, cy, cprev = x, y, prev
    i = n
    unresolved = 0
    while idx.size:
        if i - n >= lookahead:
            gap[idx] = np.maximum(gap[idx], i - cprev)
            unresolved = idx.size
            break
        i += 1
        cx, cy = vec.ltm_step(cx, cy, spec)
        hit = vec.in_core_arr(cx, cy, spec)
        if np.any(hit):
            hidx = idx[hit]
            gap[hidx] = np.maximum(gap[hidx], i - cprev[hit])
            idx, cx, cy, cprev = idx[~hit], cx[~hit], cy[~hit], cprev[~hit]
    return count, gap, unresolved


@dataclass(frozen=True)
class MarkarianScan:
    """Visit-count split at one horizon: who visits often, and how bad the
    worst entry gap is for everyone else."""

    n: int
    b: float
    threshold: float  # b ln n
    frac_busy: MeasureEstimate  # fraction with visit count above threshold
    complement_frac: MeasureEstimate
    beta_hat: float  # min over the complement of max_gap / n
    unresolved: int
    samples: int


def markarian_scan(
    n: int,
    b: float,
    samples: int,
    seed: int,
    spec: LtmSpec,
    lookahead: int | None = None,
) -> MarkarianScan:
    """Split a uniform ensemble by visit count r > b ln n and measure, over
    the complement, the minimum of (worst entry gap)/n — the gap bound."""
    if n < 2:
        raise ValueError("n must be >= 2")
    threshold = b * math.log(n)
    look = lookahead if lookahead is not None else max(10 * n, 100_000)
    busy_hits = 0
    beta_hat = math.inf
    unresolved = 0
    for start, stop in _rng.shard_ranges(samples, _rng.DEFAULT_SHARD):
        x, y = vec.sample_domain(seed, _rng.STREAM_MARKARIAN, start, stop - start, spec)
        count, gap, unres = _gap_scan_arrays(x, y, n, spec, DEFAULT_RETURN_CAP, look)
        busy = count > threshold
        busy_hits += int(np.count_nonzero(busy))
        unresolved += unres
        comp = ~busy
        if np.any(comp):
            beta_hat = min(beta_hat, float(gap[comp].min()) / n)
    frac_busy = binomial_estimate(busy_hits, samples)
    return MarkarianScan(
        n=n,
        b=b,
        threshold=threshold,
        frac_busy=frac_busy,
        complement_frac=binomial_estimate(samples - busy_hits, samples),
        beta_hat=beta_hat if beta_hat < math.inf else float("nan"),
        unresolved=unresolved,
        samples=samples,
    )


def default_markarian_b(theta_hat: float) -> float:
    """Visit-count coefficient sized to an induced-map decay rate estimate:
    b = 2/ln(1/theta), the scale at which the busy set carries the decay."""
    if not (0 < theta_hat < 1):
        raise ValueError("theta_hat must lie in (0, 1)")
    return 2.0 / math.log(1.0 / theta_hat)


# ---------------------------------------------------------------------------
# isolation of large-return cells


@dataclass(frozen=True)
class IsolationStats:
    """Per-sample isolation depths for large-return cells, with log-n bins.

    max_n[i] is the largest N such that every induced-map image and
    preimage of sample i up to order N lies in the return-time-1 cell.
    bins rows: (n_lo, n_hi, min_max_n, count); slope/intercept fit
    min_max_n against ln(bin center).
    """

    labels: np.ndarray
    max_n: np.ndarray
    bins: tuple
    slope: float
    intercept: float


def _s1_depth(
    x: np.ndarray, y: np.ndarray, spec: LtmSpec, cap: int, limit: int = 64
) -> np.ndarray:
    """Largest N with every induced-map image and preimage up to order N in
    the return-time-1 cell: min of the forward and backward run lengths.

    The forward stepper reports the label of its *input* point, so the
    sampled point's own (large) label is consumed by one discarded step;
    the backward stepper reports the label of the *preimage* it lands on,
    which is exactly the first backward neighbor, so it starts cold.
    """

    def one_way(stepper, discard_first):
        depth = np.zeros(x.shape, dtype=np.int64)
        idx = np.arange(x.size)
        cx, cy = x, y
        if discard_first:
            _, _, cx, cy = stepper(cx, cy, spec, cap)
        for _ in range(limit):
            j, k, nx, ny = stepper(cx, cy, spec, cap)
            good = (j == 1) & (k == 1)
            if not np.any(good):
                break
            depth[idx[good]] += 1
            idx, cx, cy = idx[good], nx[good], ny[good]
        return depth

    fwd = one_way(vec.core_return_arr, True)
    bwd = one_way(vec.core_return_inv_arr, False)
    return np.minimum(fwd, bwd)


def isolation_scan(
    n_lo: int,
    n_hi: int,
    samples: int,
    seed: int,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
) -> IsolationStats:
    """Sample large-return cells near the accumulation corner and measure how
    deep their neighborhoods stay inside the return-time-1 cell.

    Proposals are uniform in the corner box of side ~2.5/n_lo beside the
    bottom-right core corner, keeping labels in [n_lo, n_hi]. Bins are
    factor-of-two ranges of the label.
    """
    if n_lo < 10:
        raise ValueError("n_lo must be >= 10")
    delta = min(2.5 / n_lo, 1.0)
    labs_acc, depth_acc = [], []
    for start, stop in _rng.shard_ranges(samples, _rng.DEFAULT_SHARD):
        u = _rng.uniform_block(seed, _rng.STREAM_ISOLATION, start, stop - start, 2)
        x = float(spec.x_hi) - delta * u[:, 0]
        y = float(spec.y_lo) + delta * u[:, 1]
        j, k, _, _ = vec.core_return_arr(x, y, spec, cap, overflow="mask")
        n = j + k - 1
        keep = (j > 0) & (n >= n_lo) & (n <= n_hi)
        if not np.any(keep):
            continue
        labs_acc.append(n[keep])
        depth_acc.append(_s1_depth(x[keep], y[keep], spec, cap))
    labels = np.concatenate(labs_acc) if labs_acc else np.zeros(0, dtype=np.int64)
    depth = np.concatenate(depth_acc) if depth_acc else np.zeros(0, dtype=np.int64)
    bins = []
    lo = n_lo
    while lo <= n_hi:
        hi = min(2 * lo - 1, n_hi)
        inbin = (labels >= lo) & (labels <= hi)
        cnt = int(np.count_nonzero(inbin))
        if cnt:
            bins.append((lo, hi, int(depth[inbin].min()), cnt))
        lo = 2 * lo
    if len(bins) >= 2:
        fit = linear_fit(
            [math.log(0.5 * (b[0] + b[1])) for b in bins], [b[2] for b in bins]
        )
        slope, intercept = fit.slope, fit.intercept
    else:
        slope, intercept = float("nan"), float("nan")
    return IsolationStats(
        labels=labels, max_n=depth, bins=tuple(bins), slope=slope, intercept=intercept
    )


# ---------------------------------------------------------------------------
# tail decomposition along orbits


@dataclass(frozen=True)
class TailDecomposition:
    """Fractions of the domain whose orbit prefix meets a large-return cell."""

    n: int
    beta: float
    threshold: int
    forward: MeasureEstimate
    backward: MeasureEstimate


def tail_decomposition(
    n: int,
    beta: float,
    samples: int,
    seed: int,
    spec: LtmSpec,
    cap: int = DEFAULT_RETURN_CAP,
) -> TailDecomposition:
    """Measure of points some forward image of which (within n steps) lands in
    a cell with return label >= beta n; likewise backward with the inverse
    map's cells. The union bound over the n steps grows at most linearly."""
    threshold = max(1, math.ceil(beta * n))
    fwd_hits = 0
    bwd_hits = 0
    for start, stop in _rng.shard_ranges(samples, _rng.DEFAULT_SHARD):
        x, y = vec.sample_domain(
            seed, _rng.STREAM_TAIL_DECOMP, start, stop - start, spec
        )
        for forward in (True, False):
            stepper = vec.ltm_step if forward else vec.ltm_step_inv
            cx, cy = x, y
            hit = np.zeros(x.shape, dtype=bool)
            for _ in range(n):
                cx, cy = stepper(cx, cy, spec)
                inc = vec.in_core_arr(cx, cy, spec)
                if np.any(inc):
                    if forward:
                        j, k, _, _ = vec.core_return_arr(
                            cx[inc], cy[inc], spec, cap, overflow="mask"
                        )
                    else:
                        j, k, _, _ = vec.core_return_inv_arr(
                            cx[inc], cy[inc], spec, cap, overflow="mask"
                        )
                    # a masked label means the return time exceeded the cap,
                    # which trivially clears any threshold below it
                    big = (j < 0) | (j + k - 1 >= threshold)
                    which = np.flatnonzero(inc)
                    hit[which[big]] = True
            if forward:
                fwd_hits += int(np.count_nonzero(hit))
            else:
                bwd_hits += int(np.count_nonzero(hit))
    return TailDecomposition(
        n=n,
        beta=beta,
        threshold=threshold,
        forward=binomial_estimate(fwd_hits, samples),
        backward=binomial_estimate(bwd_hits, samples),
    )


def cell_tail_curve(
    ms: Sequence[int], samples: int, seed: int, spec: LtmSpec
) -> list:
    """(m, estimate) rows for the measure of all cells with label >= m,
    normalized to the two-annulus union (probability measure)."""
    from .partition import cell_histogram

    m_max = max(ms)
    hist = cell_histogram(m_max + 1, samples, seed, spec)
    area_core = float(
        (spec.x_hi - spec.x_lo) * (spec.y_hi - spec.y_lo)
    )
    area_domain = float(
        2.0 * (spec.y_hi - spec.y_lo)
        + (spec.x_hi - spec.x_lo) * (2.0 - (spec.y_hi - spec.y_lo))
    )
    scale = area_core / area_domain
    out = []
    for m in ms:
        hits = int(hist[m:].sum())
        out.append((m, binomial_estimate(hits, samples).scaled(scale)))
    return out
