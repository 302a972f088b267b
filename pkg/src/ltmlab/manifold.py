"""Unstable-cone segments under the induced map: cutting, growth, intersections.

The induced return map is piecewise affine, so a straight segment with
direction in the unstable cone is cut by the singular set into finitely
many straight pieces (countably many near the two accumulation corners),
and each piece maps to a straight segment whose direction is again in the
unstable cone. This module locates the cuts by branch-label changes,
evolves the pieces exactly (affine extension about each piece's midpoint),
tracks vertical/horizontal length growth across generations, and probes
for intersections between evolved pieces and the local stable line of the
center fixed point.

Cutting engine: labels are sampled on a coarse grid that doubles until the
run sequence stabilizes, then every run boundary is bracketed and bisected;
bracket pairs whose labels do not differ by a single step in a single
coordinate are hunted for hidden runs down to a resolution floor. Branch
cells are convex, so a segment meets each cell in one interval and the
run/bracket bookkeeping is complete up to slivers narrower than the floor.
All label evaluation is batched across segments and brackets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import vectorized as vec
from .core import DEFAULT_RETURN_CAP, LtmSpec, TorusPoint, in_core
from .cocycle import (
    NotHyperbolic,
    in_stable_cone,
    in_unstable_cone,
    stable_direction,
)


class ResolutionExceeded(Exception):
    """A segment needs more components or rounds than the configured ceiling."""


class BudgetExceeded(Exception):
    """A generation produced more components than the budget allows."""


_SQRT2 = math.sqrt(2.0)
_EVAL_CHUNK = 1 << 20
_MAX_ROUNDS = 400


@dataclass(frozen=True)
class Segment:
    """An oriented straight segment, endpoints in the core square.

    Endpoints may be given as TorusPoints or plain (x, y) pairs.
    """

    a: TorusPoint
    b: TorusPoint
    generation: int = 0

    def __post_init__(self):
        if not isinstance(self.a, TorusPoint):
            object.__setattr__(self, "a", TorusPoint.of(*self.a))
        if not isinstance(self.b, TorusPoint):
            object.__setattr__(self, "b", TorusPoint.of(*self.b))

    def direction(self) -> tuple:
        return (float(self.b.x) - float(self.a.x), float(self.b.y) - float(self.a.y))

    @property
    def length(self) -> float:
        dx, dy = self.direction()
        return math.hypot(dx, dy)

    @property
    def l_h(self) -> float:
        return abs(float(self.b.x) - float(self.a.x))

    @property
    def l_v(self) -> float:
        return abs(float(self.b.y) - float(self.a.y))

    def point_at(self, t: float) -> TorusPoint:
        dx, dy = self.direction()
        return TorusPoint.of(float(self.a.x) + t * dx, float(self.a.y) + t * dy)

    def in_unstable_cone(self) -> bool:
        return in_unstable_cone(*self.direction())

    def in_stable_cone(self) -> bool:
        return in_stable_cone(*self.direction())


@dataclass(frozen=True)
class CutResult:
    """A segment cut at its branch-label changes.

    boundaries: parameters 0 = t_0 < ... < t_N = 1 framing N components.
    labels: (N, 2) or (N, 4) branch labels, one row per component.
    pinched: boundaries resolved only to the resolution floor without a
    single-step label change on either side (expected wherever a cut of the
    composed square map crosses, or a sliver narrower than the floor hides).
    """

    parent: Segment
    boundaries: np.ndarray
    labels: np.ndarray
    pinched: int = 0

    @property
    def count(self) -> int:
        return self.labels.shape[0]

    @property
    def crossings(self) -> np.ndarray:
        return self.boundaries[1:-1]

    def component(self, i: int) -> Segment:
        return Segment(
            self.parent.point_at(float(self.boundaries[i])),
            self.parent.point_at(float(self.boundaries[i + 1])),
            self.parent.generation,
        )

    def components(self) -> list:
        """Materialized component list (prefer the arrays for large cuts)."""
        return [self.component(i) for i in range(self.count)]


# ---------------------------------------------------------------------------
# label evaluation


def _labels_points(
    x: np.ndarray, y: np.ndarray, spec: LtmSpec, power: int, cap: int
) -> np.ndarray:
    n = x.size
    width = 2 if power == 1 else 4
    out = np.empty((n, width), dtype=np.int64)
    for s in range(0, n, _EVAL_CHUNK):
        e = min(n, s + _EVAL_CHUNK)
        if power == 1:
            j, k = vec.classify_arr(x[s:e], y[s:e], spec, cap)
            out[s:e, 0] = j
            out[s:e, 1] = k
        else:
            j1, k1, j2, k2 = vec.two_step_labels(x[s:e], y[s:e], spec, cap)
            out[s:e, 0] = j1
            out[s:e, 1] = k1
            out[s:e, 2] = j2
            out[s:e, 3] = k2
    return out


# ---------------------------------------------------------------------------
# the splitting engine (batched across segments)


class _SplitEngine:
    def __init__(
        self,
        segs: Sequence[Segment],
        spec: LtmSpec,
        power: int,
        tol: float,
        refine: bool,
        cap: int,
        initial: int,
        grid_budget: int,
        gap_tol: float,
        max_components: int,
    ):
        if power not in (1, 2):
            raise ValueError("power must be 1 or 2")
        self.spec = spec
        self.power = power
        self.refine = refine
        self.cap = cap
        self.initial = max(int(initial), 2)
        self.grid_budget = grid_budget
        self.max_components = max_components
        self.ax = np.array([float(s.a.x) for s in segs])
        self.ay = np.array([float(s.a.y) for s in segs])
        self.dx = np.array([float(s.b.x) - float(s.a.x) for s in segs])
        self.dy = np.array([float(s.b.y) - float(s.a.y) for s in segs])
        seg_len = np.hypot(self.dx, self.dy)
        if np.any(seg_len == 0):
            raise ValueError("zero-length segment")
        self.tol_t = np.maximum(tol / seg_len, 4e-16)
        self.gap_t = np.maximum(gap_tol / seg_len, 4e-16)
        self.nseg = len(segs)

    def _eval(self, segids: np.ndarray, t: np.ndarray) -> np.ndarray:
        x = self.ax[segids] + t * self.dx[segids]
        y = self.ay[segids] + t * self.dy[segids]
        return _labels_points(x, y, self.spec, self.power, self.cap)

    def _grid_runs(self) -> tuple:
        """Doubling grid phase: per-segment runs (row, t_left, t_right, label)."""
        m = self.initial
        todo = np.arange(self.nseg)
        prev = [None] * self.nseg
        final = [None] * self.nseg
        while todo.size:
            ts = np.linspace(0.0, 1.0, m + 1)
            rows = np.repeat(todo, m + 1)
            labs = self._eval(rows, np.tile(ts, todo.size))
            labs = labs.reshape(todo.size, m + 1, -1)
            chg = np.any(labs[:, 1:, :] != labs[:, :-1, :], axis=2)
            starts = np.concatenate(
                [np.ones((todo.size, 1), dtype=bool), chg], axis=1
            ).ravel()
            sidx = np.flatnonzero(starts)
            eidx = np.append(sidx[1:], todo.size * (m + 1)) - 1
            row = sidx // (m + 1)
            run_tl = ts[sidx % (m + 1)]
            run_tr = ts[eidx % (m + 1)]
            run_lab = labs.reshape(-1, labs.shape[2])[sidx]
            counts = np.bincount(row, minlength=todo.size)
            offs = np.concatenate([[0], np.cumsum(counts)])
            still = []
            for pos, s in enumerate(todo):
                sl = slice(offs[pos], offs[pos + 1])
                cur = (run_tl[sl], run_tr[sl], run_lab[sl])
                key = run_lab[sl].tobytes()
                if prev[s] == key:
                    final[s] = cur
                else:
                    prev[s] = key
                    final[s] = cur
                    still.append(s)
            todo = np.array(still, dtype=np.int64)
            if todo.size and (m >= 1 << 22 or todo.size * (2 * m + 1) > self.grid_budget):
                break
            m *= 2
        return final

    def _floors(self, lab_a: np.ndarray, lab_b: np.ndarray, segids: np.ndarray) -> tuple:
        step = np.abs(lab_a - lab_b).sum(axis=1)
        simple = step == 1
        if self.refine:
            tolv = self.tol_t[segids]
        else:
            tolv = np.full(segids.shape, np.inf)
        return np.where(simple, tolv, self.gap_t[segids]), simple

    def run(self) -> list:
        grids = self._grid_runs()
        # global run arrays
        r_seg = np.concatenate(
            [np.full(g[0].size, s, dtype=np.int64) for s, g in enumerate(grids)]
        )
        r_tl = np.concatenate([g[0] for g in grids])
        r_tr = np.concatenate([g[1] for g in grids])
        r_lab = np.concatenate([g[2] for g in grids])
        # pairs between consecutive runs of the same segment
        left = np.flatnonzero(r_seg[:-1] == r_seg[1:])
        q_left = left
        q_right = left + 1
        q_seg = r_seg[left]
        q_tl = r_tr[left].copy()
        q_tr = r_tl[left + 1].copy()
        q_floor, q_simple = self._floors(r_lab[q_left], r_lab[q_right], q_seg)

        cross_seg, cross_t, cross_p = [], [], []
        rounds = 0
        while q_seg.size:
            rounds += 1
            if rounds > _MAX_ROUNDS:
                raise ResolutionExceeded(
                    f"bracket refinement did not converge in {_MAX_ROUNDS} rounds"
                )
            width = q_tr - q_tl
            tm = 0.5 * (q_tl + q_tr)
            prog = (tm > q_tl) & (tm < q_tr)
            done = (width <= q_floor) | ~prog
            if np.any(done):
                cross_seg.append(q_seg[done])
                cross_t.append(tm[done])
                cross_p.append(~q_simple[done])
                keep = ~done
                q_seg, q_left, q_right = q_seg[keep], q_left[keep], q_right[keep]
                q_tl, q_tr = q_tl[keep], q_tr[keep]
                q_floor, q_simple = q_floor[keep], q_simple[keep]
                tm = tm[keep]
            if not q_seg.size:
                break
            labs = self._eval(q_seg, tm)
            same_l = np.all(labs == r_lab[q_left], axis=1)
            same_r = np.all(labs == r_lab[q_right], axis=1) & ~same_l
            isnew = ~same_l & ~same_r
            il = np.flatnonzero(same_l)
            q_tl[il] = tm[il]
            r_tr[q_left[il]] = tm[il]
            ir = np.flatnonzero(same_r)
            q_tr[ir] = tm[ir]
            r_tl[q_right[ir]] = tm[ir]
            inew = np.flatnonzero(isnew)
            if inew.size:
                base = r_seg.size
                newids = base + np.arange(inew.size)
                r_seg = np.concatenate([r_seg, q_seg[inew]])
                r_tl = np.concatenate([r_tl, tm[inew]])
                r_tr = np.concatenate([r_tr, tm[inew]])
                r_lab = np.concatenate([r_lab, labs[inew]])
                if r_seg.size > self.max_components:
                    raise ResolutionExceeded(
                        f"component count exceeded {self.max_components}"
                    )
                # right halves become fresh pairs; left halves reuse the rows
                nf, ns = self._floors(labs[inew], r_lab[q_right[inew]], q_seg[inew])
                q_seg = np.concatenate([q_seg, q_seg[inew]])
                q_left = np.concatenate([q_left, newids])
                q_right = np.concatenate([q_right, q_right[inew]])
                q_tl = np.concatenate([q_tl, tm[inew]])
                q_tr = np.concatenate([q_tr, q_tr[inew]])
                q_floor = np.concatenate([q_floor, nf])
                q_simple = np.concatenate([q_simple, ns])
                lf, ls = self._floors(r_lab[q_left[inew]], labs[inew], q_seg[inew])
                q_right[inew] = newids
                q_tr[inew] = tm[inew]
                q_floor[inew] = lf
                q_simple[inew] = ls

        return self._assemble(r_seg, r_tl, r_lab, cross_seg, cross_t, cross_p)

    def _assemble(self, r_seg, r_tl, r_lab, cross_seg, cross_t, cross_p) -> list:
        if cross_seg:
            c_seg = np.concatenate(cross_seg)
            c_t = np.concatenate(cross_t)
            c_p = np.concatenate(cross_p)
        else:
            c_seg = np.zeros(0, dtype=np.int64)
            c_t = np.zeros(0)
            c_p = np.zeros(0, dtype=bool)
        r_order = np.argsort(r_seg, kind="stable")
        c_order = np.argsort(c_seg, kind="stable")
        r_offs = np.searchsorted(r_seg[r_order], np.arange(self.nseg + 1))
        c_offs = np.searchsorted(c_seg[c_order], np.arange(self.nseg + 1))
        out = []
        for s in range(self.nseg):
            rid = r_order[r_offs[s] : r_offs[s + 1]]
            cid = c_order[c_offs[s] : c_offs[s + 1]]
            if rid.size != cid.size + 1:
                raise RuntimeError(
                    f"cut bookkeeping out of balance: {rid.size} runs, {cid.size} cuts"
                )
            inner = np.sort(c_t[cid])
            labs = r_lab[rid][np.argsort(r_tl[rid], kind="stable")]
            boundaries = np.concatenate([[0.0], inner, [1.0]])
            out.append((boundaries, labs, int(np.count_nonzero(c_p[cid]))))
        return out


def split_segment(
    seg: Segment,
    spec: LtmSpec,
    power: int = 1,
    tol: float = 1e-9,
    cap: int = DEFAULT_RETURN_CAP,
    initial: int = 64,
    grid_budget: int = 1 << 24,
    gap_tol: float = 1e-13,
    refine: bool = True,
    max_components: int = 4_000_000,
) -> CutResult:
    """Cut a segment at the branch-label changes of the induced map (or its square).

    tol is the boundary-location accuracy along the segment (length units);
    gap_tol is the floor below which undetected slivers may survive between
    brackets whose labels do not step by one. With refine=False crossing
    positions are bracket midpoints only (component labels stay exact),
    which is enough for expansion sums.
    """
    engine = _SplitEngine(
        [seg], spec, power, tol, refine, cap, initial, grid_budget, gap_tol,
        max_components,
    )
    boundaries, labels, pinched = engine.run()[0]
    return CutResult(parent=seg, boundaries=boundaries, labels=labels, pinched=pinched)


def split_many(
    segs: Sequence[Segment],
    spec: LtmSpec,
    power: int = 1,
    tol: float = 1e-9,
    cap: int = DEFAULT_RETURN_CAP,
    initial: int = 64,
    grid_budget: int = 1 << 24,
    gap_tol: float = 1e-13,
    refine: bool = True,
    max_components: int = 4_000_000,
) -> list:
    """split_segment over many segments with fully batched label evaluation."""
    if not segs:
        return []
    engine = _SplitEngine(
        list(segs), spec, power, tol, refine, cap, initial, grid_budget, gap_tol,
        max_components,
    )
    return [
        CutResult(parent=s, boundaries=b, labels=l, pinched=p)
        for s, (b, l, p) in zip(segs, engine.run())
    ]


# ---------------------------------------------------------------------------
# evolution


def _branch_mats(labels: np.ndarray, spec: LtmSpec) -> tuple:
    """Entrywise branch matrices for label rows (vectorized over components)."""
    sh, sv = float(spec.slope_h), float(spec.slope_v)

    def one(j, k):
        b = j * sh
        c = k * sv
        return 1.0 + 0 * b, b, c, 1.0 + b * c

    a1, b1, c1, d1 = one(labels[:, 0].astype(float), labels[:, 1].astype(float))
    if labels.shape[1] == 2:
        return a1, b1, c1, d1
    a2, b2, c2, d2 = one(labels[:, 2].astype(float), labels[:, 3].astype(float))
    return (
        a2 * a1 + b2 * c1,
        a2 * b1 + b2 * d1,
        c2 * a1 + d2 * c1,
        c2 * b1 + d2 * d1,
    )


def _evolve_many(cuts: Sequence[CutResult], spec: LtmSpec, power: int, cap: int) -> tuple:
    """Affine images of many cuts' components, with one batched map evaluation.

    Each component maps by its branch matrix anchored at the image of its
    midpoint (the midpoint is interior to the cell, so its return images
    are safe to classify). Returns concatenated child endpoints, labels,
    and parent-piece lengths across all cuts.
    """
    mxs, mys, p0xs, p0ys, p1xs, p1ys, labs = [], [], [], [], [], [], []
    for cut in cuts:
        seg = cut.parent
        ax, ay = float(seg.a.x), float(seg.a.y)
        dx, dy = seg.direction()
        t0 = cut.boundaries[:-1]
        t1 = cut.boundaries[1:]
        tm = 0.5 * (t0 + t1)
        mxs.append(ax + tm * dx)
        mys.append(ay + tm * dy)
        p0xs.append(ax + t0 * dx)
        p0ys.append(ay + t0 * dy)
        p1xs.append(ax + t1 * dx)
        p1ys.append(ay + t1 * dy)
        labs.append(cut.labels)
    mx = np.concatenate(mxs)
    my = np.concatenate(mys)
    px0 = np.concatenate(p0xs)
    py0 = np.concatenate(p0ys)
    px1 = np.concatenate(p1xs)
    py1 = np.concatenate(p1ys)
    labels = np.concatenate(labs)
    ix, iy = mx, my
    for _ in range(power):
        _, _, ix, iy = vec.core_return_arr(ix, iy, spec, cap)
    a, b, c, d = _branch_mats(labels, spec)
    cax = ix + a * (px0 - mx) + b * (py0 - my)
    cay = iy + c * (px0 - mx) + d * (py0 - my)
    cbx = ix + a * (px1 - mx) + b * (py1 - my)
    cby = iy + c * (px1 - mx) + d * (py1 - my)
    # Components that end exactly on a cell boundary map exactly onto the
    # square's edge; the cut's +-tol slop would leave children protruding
    # past it by ~|M| tol, which compounds exponentially over generations.
    # The true images lie in the closed square, so clamp the slop away.
    x_lo, x_hi = float(spec.x_lo), float(spec.x_hi)
    y_lo, y_hi = float(spec.y_lo), float(spec.y_hi)
    np.clip(cax, x_lo, x_hi, out=cax)
    np.clip(cay, y_lo, y_hi, out=cay)
    np.clip(cbx, x_lo, x_hi, out=cbx)
    np.clip(cby, y_lo, y_hi, out=cby)
    pl_h = np.abs(px1 - px0)
    pl_v = np.abs(py1 - py0)
    return cax, cay, cbx, cby, labels, pl_h, pl_v


@dataclass(frozen=True)
class EvolveResult:
    """One generation step of a single segment: the cut and its affine images."""

    parent: Segment
    cut: CutResult
    children: tuple

    @property
    def labels(self) -> np.ndarray:
        return self.cut.labels


def evolve_segment(
    seg: Segment,
    spec: LtmSpec,
    power: int = 1,
    tol: float = 1e-9,
    cap: int = DEFAULT_RETURN_CAP,
    **split_kw,
) -> EvolveResult:
    """Cut a segment, then map each piece by its affine branch (p-fold return)."""
    cut = split_segment(seg, spec, power=power, tol=tol, cap=cap, **split_kw)
    cax, cay, cbx, cby, _, _, _ = _evolve_many([cut], spec, power, cap)
    children = tuple(
        Segment(TorusPoint.of(x0, y0), TorusPoint.of(x1, y1), seg.generation + 1)
        for x0, y0, x1, y1 in zip(cax, cay, cbx, cby)
    )
    return EvolveResult(parent=seg, cut=cut, children=children)


@dataclass(frozen=True)
class Generation:
    """One generation of evolved segments with growth bookkeeping."""

    index: int
    segments: tuple
    labels: np.ndarray | None
    total_length: float
    total_l_v: float
    pruned_count: int
    pruned_length: float
    min_v_ratio: float

    @property
    def count(self) -> int:
        return len(self.segments)


def iterate_segments(
    seed: Segment,
    spec: LtmSpec,
    generations: int,
    power: int = 1,
    tol: float = 1e-9,
    budget: int = 4096,
    min_length: float = 1e-13,
    cap: int = DEFAULT_RETURN_CAP,
    on_budget: str = "prune",
    initial: int = 32,
) -> list:
    """Evolve a seed for several generations, cutting and pruning under a budget.

    Components beyond the budget are pruned shortest-first (count and length
    recorded per generation); on_budget='raise' raises BudgetExceeded
    instead. min_v_ratio tracks, per generation, the worst ratio of a
    child's vertical extent to its parent piece's — the doubling statistic.
    """
    if not seed.in_unstable_cone():
        raise ValueError("seed direction must lie in the unstable cone")
    if not (in_core(seed.a, spec) and in_core(seed.b, spec)):
        raise ValueError("seed must lie in the core square")
    gens = [
        Generation(
            0, (seed,), None, seed.length, seed.l_v, 0, 0.0, float("nan")
        )
    ]
    current = [seed]
    for g in range(1, generations + 1):
        cuts = split_many(
            current, spec, power=power, tol=tol, cap=cap, initial=initial
        )
        cax, cay, cbx, cby, labs, _, plv = _evolve_many(cuts, spec, power, cap)
        lengths = np.hypot(cbx - cax, cby - cay)
        lv = np.abs(cby - cay)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(plv > 0, lv / np.where(plv > 0, plv, 1.0), np.inf)
        min_ratio = float(ratios.min()) if ratios.size else float("nan")
        keep = np.flatnonzero(lengths >= min_length)
        if keep.size > budget:
            if on_budget == "raise":
                raise BudgetExceeded(f"{keep.size} components exceed budget {budget}")
            order = np.argsort(-lengths[keep], kind="stable")
            keep = np.sort(keep[order[:budget]])
        pruned = lengths.size - keep.size
        pruned_len = float(lengths.sum() - lengths[keep].sum())
        current = [
            Segment(
                TorusPoint.of(float(cax[i]), float(cay[i])),
                TorusPoint.of(float(cbx[i]), float(cby[i])),
                g,
            )
            for i in keep
        ]
        gens.append(
            Generation(
                g,
                tuple(current),
                labs[keep],
                float(lengths[keep].sum()),
                float(lv[keep].sum()),
                int(pruned),
                pruned_len,
                min_ratio,
            )
        )
        if not current:
            break
    return gens


# ---------------------------------------------------------------------------
# length statistics


@dataclass(frozen=True)
class LengthStats:
    count: int
    l_h: np.ndarray
    l_v: np.ndarray
    total_h: float
    total_v: float
    total: float


def length_stats(components: Iterable[Segment]) -> LengthStats:
    comps = list(components)
    lh = np.array([c.l_h for c in comps])
    lv = np.array([c.l_v for c in comps])
    return LengthStats(
        count=len(comps),
        l_h=lh,
        l_v=lv,
        total_h=float(lh.sum()),
        total_v=float(lv.sum()),
        total=float(np.hypot(lh, lv).sum()),
    )


# ---------------------------------------------------------------------------
# heteroclinic probe


@dataclass(frozen=True)
class HeteroclinicResult:
    """Crossings between evolved unstable pieces and the center's stable line."""

    first_generation: int | None
    point: TorusPoint | None
    found_generations: tuple
    stable_slope: float
    transversal: bool


def heteroclinic_probe(
    seed: Segment,
    spec: LtmSpec,
    max_gen: int = 8,
    window: float = 0.1,
    power: int = 1,
    tol: float = 1e-9,
    budget: int = 4096,
    cap: int = DEFAULT_RETURN_CAP,
) -> HeteroclinicResult:
    """First generation whose pieces cross the local stable line at the center.

    The stable line is the computed stable eigendirection of the branch
    derivative at the center fixed point, restricted to an axis box of
    half-width `window`. Not finding a crossing is reported, not raised.
    """
    from .core import core_return

    center = spec.center()
    cx, cy = float(center.x), float(center.y)
    mat = core_return(center, spec, cap).deriv
    ex, ey = stable_direction(mat)
    ex, ey = float(ex), float(ey)
    norm = math.hypot(ex, ey)
    ex, ey = ex / norm, ey / norm
    gens = iterate_segments(
        seed, spec, max_gen, power=power, tol=tol, budget=budget, cap=cap
    )
    found = []
    first_point = None
    transversal = False
    for gen in gens[1:]:
        if not gen.segments:
            continue
        ax = np.array([float(s.a.x) for s in gen.segments])
        ay = np.array([float(s.a.y) for s in gen.segments])
        dx = np.array([s.direction()[0] for s in gen.segments])
        dy = np.array([s.direction()[1] for s in gen.segments])
        det = ex * dy - ey * dx
        ok = np.abs(det) > 1e-14
        det_safe = np.where(ok, det, 1.0)
        s_par = (ex * (cy - ay) - ey * (cx - ax)) / det_safe
        t_par = (dx * (cy - ay) - dy * (cx - ax)) / det_safe
        hit = (
            ok
            & (s_par >= 0.0)
            & (s_par <= 1.0)
            & (np.abs(t_par * ex) <= window)
            & (np.abs(t_par * ey) <= window)
        )
        if np.any(hit):
            found.append(gen.index)
            if first_point is None:
                i = int(np.flatnonzero(hit)[0])
                first_point = TorusPoint.of(
                    float(ax[i] + s_par[i] * dx[i]), float(ay[i] + s_par[i] * dy[i])
                )
                transversal = in_unstable_cone(float(dx[i]), float(dy[i]))
    return HeteroclinicResult(
        first_generation=found[0] if found else None,
        point=first_point,
        found_generations=tuple(found),
        stable_slope=ey / ex if ex else float("inf"),
        transversal=transversal,
    )


# ---------------------------------------------------------------------------
# one-step expansion sums along a segment


@dataclass(frozen=True)
class SegmentExpansion:
    """Per-component expansion factors along a segment and their inverse sum."""

    labels: np.ndarray
    factors: np.ndarray
    sum_inv: float
    delta: float

    @property
    def count(self) -> int:
        return self.factors.size


def one_step_sum(
    seg: Segment,
    spec: LtmSpec,
    power: int = 2,
    expansion: str = "tangent",
    tol: float = 1e-9,
    gap_tol: float = 1e-15,
    cap: int = DEFAULT_RETURN_CAP,
    initial: int = 64,
    max_components: int = 4_000_000,
) -> SegmentExpansion:
    """Sum of inverse expansion factors over a segment's branch components.

    Splits the segment at the p-fold return map's label changes and, per
    component, takes the norm growth of the segment's own direction under
    the branch matrix (expansion='tangent'), or the matrix's large
    eigenvalue (expansion='spectral'); both stay within the contraction
    margin for unstable-cone segments. Labels need no boundary refinement,
    so the split runs with refine off.

    gap_tol is a census floor, not a location tolerance: every component
    wider than it must be found, or its inverse factor goes missing from
    the sum. A chord passing a corner of the square at distance d crosses
    two-return cells down to widths of order d^2/50, so the default floor
    of 1e-15 keeps the census exhaustive for d >= 1e-5; much below that the
    finest cells drop under double resolution anyway.
    """
    dx, dy = seg.direction()
    if not in_unstable_cone(dx, dy):
        raise ValueError("segment direction must lie in the unstable cone")
    cut = split_segment(
        seg,
        spec,
        power=power,
        tol=tol,
        cap=cap,
        refine=False,
        gap_tol=gap_tol,
        initial=initial,
        max_components=max_components,
    )
    a, b, c, d = _branch_mats(cut.labels, spec)
    if expansion == "tangent":
        norm = math.hypot(dx, dy)
        wx, wy = dx / norm, dy / norm
        lam = np.hypot(a * wx + b * wy, c * wx + d * wy)
    elif expansion == "spectral":
        tr = a + d
        if np.any(np.abs(tr) <= 2.0):
            raise NotHyperbolic("a branch matrix has |trace| <= 2")
        half = np.abs(tr) / 2.0
        lam = half + np.sqrt(half * half - 1.0)
    else:
        raise ValueError(f"unknown expansion mode {expansion!r}")
    return SegmentExpansion(
        labels=cut.labels,
        factors=lam,
        sum_inv=float(np.sum(1.0 / lam)),
        delta=seg.length,
    )


# ---------------------------------------------------------------------------
# standard probe segments (canonical geometry)


def corner_seed_segment() -> Segment:
    """A short unstable segment in the box beside the bottom-right corner,
    the standard seed for the growth experiments."""
    return Segment(TorusPoint.of(0.93, 0.02), TorusPoint.of(0.98, 0.09))


def corner_crossing_segment(delta: float) -> Segment:
    """Slope-(1+sqrt 2) chord from the bottom edge to the right edge near the
    bottom-right corner, passing the corner at distance of order delta."""
    return Segment(
        TorusPoint.of(1.0 - delta, 0.0), TorusPoint.of(1.0, (1.0 + _SQRT2) * delta)
    )


def corner_funnel_segment(eps: float) -> Segment:
    """Slope-(1+sqrt 2) chord of the funnel above the lower diagonal boundary
    line near the bottom-right corner, from that line to the right edge."""
    return Segment(
        TorusPoint.of(1.0 - 2.0 * eps, eps),
        TorusPoint.of(1.0, (3.0 + 2.0 * _SQRT2) * eps),
    )
