"""Workbench acceptance suite: thirteen checks, one PASS/FAIL line each.

Every check pins a quantitative property of the canonical map at a stated
scale and tolerance. The desk profile is the reference scale; smoke shrinks
the workloads ~100x for quick iteration, deep grows them ~10x. Checks draw
from fixed RNG streams, so a rerun with the same seed reproduces the same
verdicts and measured values.

Two checks deserve a note up front (full analysis in README.md):

* Check 1 verifies the induced-map fixed-point derivative exactly AND the
  one-step composite [[1,2],[2,5]]; the latter is the full map's
  derivative where both twists act (the middle step of the orbit of
  (1/2, 1/2)), not the induced-map derivative, which is [[1,4],[4,17]].
* Check 11's stated observable pair (cos pix, cos pix cos piy) has
  identically zero cross-correlation: the parity involution
  (x, y) -> (1-x, 1-y) commutes with both even-slope twists, the first
  observable is odd under it, the second even. The check is still run
  exactly as stated and comes out red; its line also reports the odd-odd
  pair at the same scale, which is the decay the check was after.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

from . import rng as _rng
from .core import (
    DEFAULT_RETURN_CAP,
    LtmSpec,
    TorusPoint,
    core_return,
    orbit,
    points_equal,
)

SQRT5 = math.sqrt(5.0)
SILVER = 1.0 + math.sqrt(2.0)  # extremal corner-chord slope


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    measured: str
    expected: str
    seconds: float


def format_line(r: CriterionResult) -> str:
    mark = "PASS" if r.passed else "FAIL"
    return (f"[{mark}] {r.index:2d} {r.name}: {r.measured}"
            f" | want {r.expected} | {r.seconds:.1f}s")


SCALES = {
    "smoke": dict(
        return_samples=20_000, cone_samples=20_000, jac_points=300,
        cell_samples=300_000, cell_n_hi=20, edge_n=12, eig_n=200,
        series_n=1_000, corner_delta=1e-4, sup_segments=100,
        generations=20, budget=256, lyap_points=100, lyap_iters=1_000,
        ensemble=300_000, n_max=30, core_n_max=25,
        mark_ns=(100, 1_000), mark_samples=20_000,
        iso_hi=1_600, iso_samples=30_000,
    ),
    "desk": dict(
        return_samples=1_000_000, cone_samples=1_000_000, jac_points=10_000,
        cell_samples=10_000_000, cell_n_hi=30, edge_n=50, eig_n=10_000,
        series_n=10_000, corner_delta=1e-5, sup_segments=1_000,
        generations=200, budget=1_024, lyap_points=1_000, lyap_iters=10_000,
        ensemble=10_000_000, n_max=60, core_n_max=40,
        mark_ns=(100, 1_000, 10_000), mark_samples=200_000,
        iso_hi=12_800, iso_samples=200_000,
    ),
    "deep": dict(
        return_samples=10_000_000, cone_samples=10_000_000, jac_points=30_000,
        cell_samples=100_000_000, cell_n_hi=30, edge_n=50, eig_n=100_000,
        series_n=100_000, corner_delta=1e-5, sup_segments=10_000,
        generations=400, budget=4_096, lyap_points=4_000, lyap_iters=40_000,
        ensemble=100_000_000, n_max=60, core_n_max=40,
        mark_ns=(100, 1_000, 10_000), mark_samples=1_000_000,
        iso_hi=102_400, iso_samples=1_000_000,
    ),
}


# ---------------------------------------------------------------------------
# 1: exact fixed-point structure at (1/2, 1/2)


def _c1_fixed_point(scale, seed, spec):
    from .cocycle import branch_matrix

    half = Fraction(1, 2)
    c = TorusPoint.of(half, half)
    pts = orbit(c, spec, 3, map_name="ltm")
    period3 = points_equal(pts[3], c) and not any(
        points_equal(p, c) for p in pts[1:3]
    )
    out = core_return(c, spec)
    fixed = points_equal(out.image, c) and (out.j, out.k) == (2, 2)

    d = branch_matrix(out.j, out.k, spec)
    want_d = ((Fraction(1), Fraction(4)), (Fraction(4), Fraction(17)))
    exact_d = d.rows() == want_d

    composite = branch_matrix(1, 1, spec)  # both twists acting once
    want_comp = ((Fraction(1), Fraction(2)), (Fraction(2), Fraction(5)))
    comp_ok = composite.rows() == want_comp

    ok = period3 and fixed and exact_d and comp_ok
    measured = (
        f"period-3 {'exact' if period3 else 'BROKEN'}, induced-map fixed point "
        f"(j,k)=({out.j},{out.k}), derivative {d.rows()!r}"
        f"{' = [[1,4],[4,17]] exact' if exact_d else ' MISMATCH'}; "
        f"one-step composite {composite.rows()!r}"
        f"{' = [[1,2],[2,5]] exact' if comp_ok else ' MISMATCH'}"
    )
    return ok, measured, "all four identities exact under rational arithmetic"


# ---------------------------------------------------------------------------
# 2: return-time identity and per-twist composition, Monte Carlo


def _c2_return_identity(scale, seed, spec):
    import numpy as np

    from . import vectorized as vec

    y_lo, y_hi = float(spec.y_lo), float(spec.y_hi)
    x_lo, x_hi = float(spec.x_lo), float(spec.x_hi)
    sh, sv = float(spec.slope_h), float(spec.slope_v)

    total = scale["return_samples"]
    bad_rtn = bad_img = bad_overflow = 0
    worst = 0.0
    done = 0
    while done < total:
        m = min(1_000_000, total - done)
        x0, y0 = vec.sample_core(seed, _rng.STREAM_RETURN_CHECK, done, m, spec)
        done += m
        j, k, xr, yr = vec.core_return_arr(x0, y0, spec, DEFAULT_RETURN_CAP,
                                           overflow="mask")
        ok_lab = j > 0
        bad_overflow += int(m - np.count_nonzero(ok_lab))
        # independent side: step the composed map one application at a time,
        # counting twist actions, until the orbit re-enters the core square
        idx = np.arange(m)[ok_lab]
        wx, wy = x0[ok_lab].copy(), y0[ok_lab].copy()
        rtn = np.zeros(m, np.int64)
        jc = np.zeros(m, np.int64)
        kc = np.zeros(m, np.int64)
        xs = np.empty(m)
        ys = np.empty(m)
        steps = 0
        while idx.size:
            steps += 1
            if steps > DEFAULT_RETURN_CAP:
                bad_overflow += idx.size
                break
            hmask = (wy >= y_lo) & (wy <= y_hi)
            wx = np.where(hmask, (wx + sh * (wy - y_lo)) % 2.0, wx)
            jc[idx] += hmask
            vmask = (wx >= x_lo) & (wx <= x_hi)
            wy = np.where(vmask, (wy + sv * (wx - x_lo)) % 2.0, wy)
            kc[idx] += vmask
            in_s = vmask & (wy >= y_lo) & (wy <= y_hi)
            back = idx[in_s]
            rtn[back] = steps
            xs[back], ys[back] = wx[in_s], wy[in_s]
            idx, wx, wy = idx[~in_s], wx[~in_s], wy[~in_s]
        got = ok_lab & (rtn > 0)
        bad_rtn += int(np.count_nonzero(
            (rtn[got] != (j + k - 1)[got])
            | (jc[got] != j[got])
            | (kc[got] != k[got])
        ))
        dx = np.abs(xs[got] - xr[got]) % 2.0
        dy = np.abs(ys[got] - yr[got]) % 2.0
        dist = np.maximum(np.minimum(dx, 2.0 - dx), np.minimum(dy, 2.0 - dy))
        if dist.size:
            worst = max(worst, float(dist.max()))
        bad_img += int(np.count_nonzero(dist > 1e-9))

    ok = bad_rtn == 0 and bad_img == 0
    measured = (
        f"{total} core points: {bad_rtn} label/return-time exceptions, "
        f"{bad_img} image mismatches (worst stepped-vs-closed-form "
        f"distance {worst:.2e}), {bad_overflow} over cap"
    )
    return ok, measured, "zero exceptions; images agree to 1e-9"


# ---------------------------------------------------------------------------
# 3: cone invariance and minimum expansion, both directions


def _c3_cones(scale, seed, spec):
    from .cocycle import cone_sweep

    n = scale["cone_samples"]
    fwd = cone_sweep(n, seed, spec, direction="forward")
    bwd = cone_sweep(n, seed, spec, direction="backward")
    ok = fwd.clean and bwd.clean and fwd.min_ratio > SQRT5 and bwd.min_ratio > SQRT5
    measured = (
        f"forward {fwd.cone_violations}+{fwd.expansion_violations} violations "
        f"(min ratio {fwd.min_ratio:.6f}), backward "
        f"{bwd.cone_violations}+{bwd.expansion_violations} "
        f"(min ratio {bwd.min_ratio:.6f}), {n} samples each"
    )
    return ok, measured, f"zero violations, ratios > sqrt5 = {SQRT5:.4f}"


# ---------------------------------------------------------------------------
# 4: numeric Jacobians against the closed-form branch derivative


def _c4_jacobian(scale, seed, spec):
    import numpy as np

    from . import vectorized as vec
    from .cocycle import BranchMismatch, branch_matrix, numeric_jacobian

    want = scale["jac_points"]
    got = 0
    worst_float = 0.0
    exact_bad = 0
    start = 0
    while got < want and start < 20 * want:
        m = min(4 * want, 20 * want - start)
        x, y = vec.sample_core(seed, _rng.STREAM_JACOBIAN, start, m, spec)
        start += m
        for i in range(m):
            if got >= want:
                break
            z = TorusPoint.of(float(x[i]), float(y[i]))
            try:
                fd = numeric_jacobian(z, spec)  # raises off cell interiors
            except BranchMismatch:
                continue
            lab = core_return(z, spec)
            ref = branch_matrix(lab.j, lab.k, spec)
            diff = max(
                abs(float(a) - float(b))
                for ra, rb in zip(fd.rows(), ref.rows())
                for a, b in zip(ra, rb)
            )
            worst_float = max(worst_float, diff)
            zq = TorusPoint.of(Fraction(float(x[i])), Fraction(float(y[i])))
            try:
                af = numeric_jacobian(zq, spec, exact=True)
            except BranchMismatch:
                continue
            if af.rows() != ref.rows():
                exact_bad += 1
            got += 1
    ok = got >= want and worst_float <= 1e-6 and exact_bad == 0
    measured = (
        f"{got} cell-interior points: worst finite-difference error "
        f"{worst_float:.2e}, {exact_bad} exact-affine mismatches"
    )
    return ok, measured, "float error <= 1e-6, rational affine fit exact"


# ---------------------------------------------------------------------------
# 5: cell-measure power law


def _c5_cell_measure(scale, seed, spec):
    import numpy as np

    from . import partition as P
    from .util import loglog_slope

    samples = scale["cell_samples"]
    n_hi = scale["cell_n_hi"]
    hist = P.cell_histogram(n_hi, samples, seed, spec)
    ns = np.arange(2, n_hi + 1)
    mu = hist[2: n_hi + 1] / samples
    se = np.sqrt(np.maximum(mu * (1.0 - mu), 0.0) / samples)
    fit = loglog_slope(ns, mu, se, n_min=2.0)
    ok = fit.n_used >= 5 and -3.5 <= fit.slope <= -2.5
    measured = (f"slope {fit.slope:+.3f} over {fit.n_used} of {ns.size} "
                f"return times, {samples} samples")
    return ok, measured, "slope in [-3.5, -2.5]"


# ---------------------------------------------------------------------------
# 6: singularity-line crossings on the right edge


def _c6_edge_crossings(scale, seed, spec):
    from . import partition as P

    n_hi = scale["edge_n"]
    exact_bad = 0
    worst = 0.0
    for n in range(2, n_hi + 1):
        lo = (Fraction(1, 2 * (n + 1)) + Fraction(1, 2 * n)) / 2
        hi = (Fraction(1, 2 * n) + Fraction(1, 2 * (n - 1))) / 2
        want = Fraction(1, 2 * n)
        hit = P.locate_cell_boundary(
            TorusPoint.of(Fraction(1), lo), TorusPoint.of(Fraction(1), hi),
            spec, tol=0, which="h")
        if hit.y != want or hit.x != 1:
            exact_bad += 1
        fhit = P.locate_cell_boundary(
            TorusPoint.of(1.0, float(lo)), TorusPoint.of(1.0, float(hi)),
            spec, which="h")
        worst = max(worst, abs(float(fhit.y) - float(want)))
    ok = exact_bad == 0 and worst <= 1e-9
    measured = (f"n in [2,{n_hi}]: {exact_bad} exact mismatches, worst float "
                f"error {worst:.2e}")
    return ok, measured, "y = 1/(2n) exact (rational) and to 1e-9 (float)"


# ---------------------------------------------------------------------------
# 7: closed-form expanding eigenvalues


def _c7_eigenvalues(scale, seed, spec):
    from .cocycle import (
        branch_matrix,
        corner_branch_matrix,
        spectral_radius,
        two_step_corner_eigenvalue,
    )

    n_hi = scale["eig_n"]
    worst = 0.0
    for n in range(1, n_hi + 1):
        got = spectral_radius(branch_matrix(n, 1, spec))
        want = 1.0 + 2.0 * n + math.sqrt(4.0 * n * (n + 1.0))
        worst = max(worst, abs(got - want) / want)
    # the asymptotic-ratio band is pinned at n = 10^4 (lambda/24n is
    # 1 + 10/24n + O(1/n^2), so smaller n sit outside it); closed form,
    # so no reason to scale it down with the profile
    n_ratio = 10_000
    lam = two_step_corner_eigenvalue(n_ratio)
    ratio = lam / (24.0 * n_ratio)
    prod_worst = max(
        abs(spectral_radius(corner_branch_matrix(p, n_ratio)) - lam) / lam
        for p in ("early_h", "early_v", "late_h", "late_v")
    )
    ok = worst <= 1e-12 and 0.999 <= ratio <= 1.001 and prod_worst <= 1e-12
    measured = (
        f"one-return formula worst rel err {worst:.1e} for n <= {n_hi}; "
        f"two-return eigenvalue / 24n = {ratio:.6f} at n={n_ratio}, "
        f"product-matrix rel err {prod_worst:.1e}"
    )
    return ok, measured, "1e-12 agreement; ratio in [0.999, 1.001]"


# ---------------------------------------------------------------------------
# 8: inverse-expansion sums (the growth-condition functional)


def _c8_one_step(scale, seed, spec):
    import numpy as np

    from . import manifold as M
    from .cocycle import ONE_STEP_SERIES_LIMIT, one_step_partial_series

    n0 = scale["series_n"]
    series = one_step_partial_series(n0)
    series_err = abs(series - ONE_STEP_SERIES_LIMIT)

    delta = scale["corner_delta"]
    corner = M.one_step_sum(M.corner_crossing_segment(delta), spec,
                            power=2, expansion="spectral")
    corner_err = abs(corner.sum_inv - 0.32323)

    count = scale["sup_segments"]
    u = _rng.uniform_block(seed, _rng.STREAM_SEGMENTS, 0, count, 4)
    length = 1e-4
    sup = 0.0
    for i in range(count):
        theta = math.pi / 4.0 + (math.pi / 4.0) * u[i, 2]
        hx = 0.5 * length * math.cos(theta)
        hy = 0.5 * length * math.sin(theta)
        cx = hx + u[i, 0] * (1.0 - 2.0 * hx)
        cy = hy + u[i, 1] * (1.0 - 2.0 * hy)
        seg = M.Segment(TorusPoint.of(cx - hx, cy - hy),
                        TorusPoint.of(cx + hx, cy + hy))
        rep = M.one_step_sum(seg, spec, power=2, expansion="tangent")
        sup = max(sup, rep.sum_inv)

    ok = series_err <= 1e-3 and corner_err <= 0.02 and sup < 0.9
    measured = (
        f"window series at N={n0}: {series:.7f} (err {series_err:.1e}); "
        f"corner chord delta={delta:g}: {corner.sum_inv:.6f} "
        f"({corner.count} components, err {corner_err:.4f}); "
        f"sup over {count} random unstable segments {sup:.4f}"
    )
    return ok, measured, ("series within 1e-3 of 0.0734553; corner within "
                          "0.02 of 0.32323; sup < 0.9")


# ---------------------------------------------------------------------------
# 9: unstable-segment vertical doubling and heteroclinic crossings


def _c9_manifold(scale, seed, spec):
    from . import manifold as M

    gens = scale["generations"]
    budget = scale["budget"]
    seed_seg = M.corner_seed_segment()
    history = M.iterate_segments(seed_seg, spec, gens, budget=budget)
    ratios = [g.min_v_ratio for g in history[1:]]
    min_ratio = min(ratios)
    bad = sum(r <= 2.0 for r in ratios)

    het = M.heteroclinic_probe(seed_seg, spec, budget=budget)
    gens_found = list(het.found_generations)
    later_ok = bool(gens_found) and all(
        g in gens_found for g in range(het.first_generation, max(gens_found) + 1)
    )
    ok = bad == 0 and het.first_generation <= 4 and later_ok and het.transversal
    measured = (
        f"{gens} generations (budget {budget}): min vertical-growth ratio "
        f"{min_ratio:.3f}, {bad} below 2; stable-line crossing first at "
        f"generation {het.first_generation}, present at {gens_found}"
        f"{', transversal' if het.transversal else ', TANGENT'}"
    )
    return ok, measured, ("every generation's ratio > 2; crossing by "
                          "generation 4 and at all later ones tested")


# ---------------------------------------------------------------------------
# 10: Lyapunov exponents of both maps


def _c10_lyapunov(scale, seed, spec):
    from .cocycle import lyapunov_ensemble

    pts, iters = scale["lyap_points"], scale["lyap_iters"]
    core = lyapunov_ensemble(pts, iters, seed, spec, "core")
    full = lyapunov_ensemble(pts, iters, seed, spec, "ltm")
    bound = 0.5 * math.log(5.0)
    ok = core.mean > bound and full.mean > 0.0
    measured = (
        f"induced map {core.mean:.4f} +- {core.std:.4f} "
        f"({pts}x{iters}, dropped {core.dropped}); composed map "
        f"{full.mean:.4f} +- {full.std:.4f}"
    )
    return ok, measured, f"induced > (ln 5)/2 = {bound:.4f}; composed > 0"


# ---------------------------------------------------------------------------
# 11 & 12: correlation decay, stated pair and the induced-map contrast


def _noise_crossing(series, mult=3.0):
    """First lag from which |C_n| stays below mult*stderr to the end."""
    import numpy as np

    c = np.abs(np.asarray(series.c))
    lim = mult * np.asarray(series.stderr)
    above = c >= lim
    n = np.asarray(series.n)
    if not above.any():
        return int(n[0])
    last = int(np.max(np.nonzero(above)))
    return int(n[last]) + 1


def _c11_correlation(scale, seed, spec, ctx):
    from . import correlations as C
    from .util import loglog_slope

    ens, n_max = scale["ensemble"], scale["n_max"]
    phi, psi = C.observable_by_name("cos_px"), C.observable_by_name("cos_pxy")
    stated = C.estimate_correlation(phi, psi, n_max, ens, seed, spec)
    fit = loglog_slope(stated.n, stated.c, stated.stderr)
    ok = fit.n_used >= 2 and -1.5 <= fit.slope <= -0.7

    odd = C.estimate_correlation(phi, phi, n_max, ens, seed, spec)
    ofit = loglog_slope(odd.n, odd.c, odd.stderr)
    ctx["h_odd"] = odd
    ctx["stated_h"] = stated

    slope_txt = (f"slope {fit.slope:+.3f}" if fit.n_used >= 2
                 else "no slope (window empty)")
    measured = (
        f"stated odd/even pair: {fit.n_used}/{n_max - 4} lags exceed noise at "
        f"ensemble {ens:.0e}, {slope_txt} -- cross-correlation is identically "
        f"zero by parity (see README); odd-odd pair at same scale: slope "
        f"{ofit.slope:+.3f} over {ofit.n_used} lags"
    )
    return ok, measured, "filtered log-log slope in [-1.5, -0.7]"


def _c12_contrast(scale, seed, spec, ctx):
    import numpy as np

    from . import correlations as C

    ens, n_max = scale["ensemble"], scale["core_n_max"]
    phi, psi = C.observable_by_name("cos_px"), C.observable_by_name("cos_pxy")
    stated_core = C.estimate_correlation_core(phi, psi, n_max, ens, seed, spec)
    below_by = _noise_crossing(stated_core)
    clause1 = below_by <= 20

    stated_h = ctx.get("stated_h")
    comparable = 0
    worse = 0
    if stated_h is not None:
        hc = np.abs(np.asarray(stated_h.c))
        hs = np.abs(np.asarray(stated_core.c))
        hn = 3.0 * np.asarray(stated_h.stderr)
        sn = 3.0 * np.asarray(stated_core.stderr)
        hi = min(30, n_max, len(hc) - 1, len(hs) - 1)
        for n in range(10, hi + 1):
            if hc[n] >= hn[n] and hs[n] >= sn[n]:
                comparable += 1
                worse += hs[n] >= hc[n]
    clause2 = worse == 0
    ok = clause1 and clause2

    odd_core = C.estimate_correlation_core(phi, phi, n_max, ens, seed, spec)
    odd_below = _noise_crossing(odd_core)
    odd_h = ctx.get("h_odd")
    o_comp = o_worse = 0
    if odd_h is not None:
        hc = np.abs(np.asarray(odd_h.c))
        hs = np.abs(np.asarray(odd_core.c))
        hn = 3.0 * np.asarray(odd_h.stderr)
        sn = 3.0 * np.asarray(odd_core.stderr)
        hi = min(30, n_max, len(hc) - 1, len(hs) - 1)
        for n in range(10, hi + 1):
            if hc[n] >= hn[n] and hs[n] >= sn[n]:
                o_comp += 1
                o_worse += hs[n] >= hc[n]
    measured = (
        f"stated pair: induced-map curve below noise from n={below_by} "
        f"({comparable} comparable lags in [10,30] -- vacuous, both curves "
        f"are zero by parity; see README); odd-odd pair: induced below noise "
        f"from n={odd_below}, composed above it through n=30, induced < "
        f"composed at {o_comp - o_worse}/{o_comp} comparable lags"
    )
    return ok, measured, ("induced curve below noise by n = 20 and under the "
                          "composed curve wherever both exceed noise")


# ---------------------------------------------------------------------------
# 13: visit-count split, complement decay, isolation depths


def _c13_markarian(scale, seed, spec, ctx):
    import numpy as np

    from . import correlations as C
    from .util import linear_fit, semilog_slope

    # size the busy threshold from the induced map's own decay rate
    odd_core = ctx.get("core_odd")
    if odd_core is None:
        phi = C.observable_by_name("cos_px")
        odd_core = C.estimate_correlation_core(phi, phi, 12, 200_000, seed, spec)
    pfit = semilog_slope(odd_core.n, odd_core.c, odd_core.stderr)
    theta = math.exp(pfit.slope) if pfit.slope < 0 else 0.5
    b = C.default_markarian_b(theta)

    ns = scale["mark_ns"]
    samples = scale["mark_samples"]
    betas, comps = [], []
    for n in ns:
        scan = C.markarian_scan(n, b, samples, seed, spec)
        betas.append(scan.beta_hat)
        comps.append(max(scan.complement_frac.value, 0.5 / samples))
    betas_ok = all(bh > 0 for bh in betas)
    cfit = linear_fit(np.log(ns), np.log(comps))
    comp_ok = -1.5 <= cfit.slope <= -0.6

    iso = C.isolation_scan(100, scale["iso_hi"], scale["iso_samples"],
                           seed, spec)
    iso_ok = iso.slope > 0 and len(iso.bins) >= 2
    ok = betas_ok and comp_ok and iso_ok
    measured = (
        f"b={b:.2f}: beta_hat {[round(x, 3) for x in betas]} at n={list(ns)}; "
        f"complement slope {cfit.slope:+.3f}; isolation depth-vs-ln(n) slope "
        f"{iso.slope:+.3f} over {len(iso.bins)} bins "
        f"(minima {[bn[2] for bn in iso.bins]})"
    )
    return ok, measured, ("all beta_hat > 0; complement slope in "
                          "[-1.5, -0.6]; isolation slope > 0")


# ---------------------------------------------------------------------------
# suite driver

_CRITERIA = (
    (1, "fixed-point-structure", _c1_fixed_point),
    (2, "return-identity", _c2_return_identity),
    (3, "cone-expansion", _c3_cones),
    (4, "jacobian-oracle", _c4_jacobian),
    (5, "cell-measure-law", _c5_cell_measure),
    (6, "edge-crossings", _c6_edge_crossings),
    (7, "eigenvalue-formulas", _c7_eigenvalues),
    (8, "growth-functional", _c8_one_step),
    (9, "manifold-doubling", _c9_manifold),
    (10, "lyapunov-exponents", _c10_lyapunov),
    (11, "correlation-decay", _c11_correlation),
    (12, "induced-contrast", _c12_contrast),
    (13, "visit-count-split", _c13_markarian),
)

_NEEDS_CTX = {11, 12, 13}

#: public (index, name) view of the checklist, in run order
CRITERIA = tuple((index, name) for index, name, _ in _CRITERIA)


def run_suite(profile: str = "desk", seed: int = 0,
              spec: LtmSpec | None = None, only=None) -> list:
    """Run the acceptance checks in order; returns CriterionResult per check."""
    if profile not in SCALES:
        raise ValueError(f"unknown profile {profile!r}")
    scale = SCALES[profile]
    spec = spec if spec is not None else LtmSpec.canonical()
    wanted = set(only) if only is not None else None
    ctx: dict = {}
    results = []
    for index, name, fn in _CRITERIA:
        if wanted is not None and index not in wanted:
            continue
        t0 = time.monotonic()
        if index in _NEEDS_CTX:
            passed, measured, expected = fn(scale, seed, spec, ctx)
        else:
            passed, measured, expected = fn(scale, seed, spec)
        results.append(CriterionResult(
            index=index, name=name, passed=bool(passed),
            measured=measured, expected=expected,
            seconds=time.monotonic() - t0,
        ))
    return results
