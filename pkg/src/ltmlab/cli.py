"""Command-line workbench: every experiment as a deterministic subcommand.

Each subcommand draws from fixed Philox streams, so a repeated invocation
with the same flags writes byte-identical CSV files; wall-clock timing and
anything else run-dependent is quarantined in the sidecar's "volatile"
section. Config files are flat key=value text; explicit flags override
config values, which override the profile defaults.

Exit codes: 0 success, 2 assertion/property failure, 3 return-time overflow,
4 bad configuration (unknown keys, malformed values, unsupported backend).
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import util
from .core import (
    LtmSpec,
    ReturnTimeOverflow,
    TorusPoint,
    core_return,
    orbit,
)

EXIT_OK = 0
EXIT_ASSERT = 2
EXIT_OVERFLOW = 3
EXIT_CONFIG = 4


class ConfigError(Exception):
    """Bad flag/config-file/spec-file input; maps to exit code 4."""


# ---------------------------------------------------------------------------
# profiles: default workload scales (explicit flags always win)

_PROFILES = {
    "smoke": {
        "samples": 50_000,
        "ensemble": 100_000,
        "n_max": 20,
        "steps": 10,
        "points": 100,
        "iterations": 1_000,
        "generations": 12,
        "budget": 1_024,
        "series_n": 1_000,
        "delta": 1e-4,
        "scan_ns": (100, 1_000),
        "iso_hi": 1_600,
        "tail_max": 40,
    },
    "desk": {
        "samples": 1_000_000,
        "ensemble": 10_000_000,
        "n_max": 60,
        "steps": 24,
        "points": 1_000,
        "iterations": 10_000,
        "generations": 200,
        "budget": 4_096,
        "series_n": 10_000,
        "delta": 1e-5,
        "scan_ns": (100, 1_000, 10_000),
        "iso_hi": 12_800,
        "tail_max": 100,
    },
    "deep": {
        "samples": 10_000_000,
        "ensemble": 100_000_000,
        "n_max": 100,
        "steps": 100,
        "points": 4_000,
        "iterations": 40_000,
        "generations": 400,
        "budget": 16_384,
        "series_n": 100_000,
        "delta": 1e-5,
        "scan_ns": (100, 1_000, 10_000, 100_000),
        "iso_hi": 102_400,
        "tail_max": 200,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's outputs; echoed into sidecars."""

    spec: LtmSpec
    backend: str
    seed: int
    samples: int
    ensemble: int
    n_max: int
    output_dir: Path
    threads: str
    profile: str

    def payload(self) -> dict:
        return {
            "spec": {k: str(v) for k, v in vars(self.spec).items()},
            "backend": self.backend,
            "seed": self.seed,
            "samples": self.samples,
            "ensemble": self.ensemble,
            "n_max": self.n_max,
            "output_dir": str(self.output_dir),
            "threads": self.threads,
            "profile": self.profile,
            "parallelism": "single-process vectorized; threads is a shard hint",
        }


# ---------------------------------------------------------------------------
# parsing helpers

_CONFIG_TYPES: dict[str, object] = {}


def _flag(parser, name: str, **kw) -> None:
    """add_argument that records the value type for config-file coercion."""
    dest = name.lstrip("-").replace("-", "_")
    _CONFIG_TYPES.setdefault(dest, kw.get("type", str))
    parser.add_argument(name, dest=dest, default=None, **kw)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # malformed flags are bad config, not assertions
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parse_scalar(text: str, backend: str):
    if backend == "rational":
        return Fraction(text)
    return float(Fraction(text))  # accepts "1/2" and "0.25" alike


def _parse_point(text: str, backend: str) -> TorusPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--point wants 'x,y', got {text!r}")
    try:
        return TorusPoint.of(
            _parse_scalar(parts[0].strip(), backend),
            _parse_scalar(parts[1].strip(), backend),
        )
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"bad point {text!r}: {e}") from None


def _load_kv(path: Path) -> dict:
    out = {}
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    for ln, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def _spec_from_file(path: Path) -> LtmSpec:
    kv = _load_kv(path)
    fields = set(LtmSpec.__dataclass_fields__)
    unknown = set(kv) - fields
    if unknown:
        raise ConfigError(f"{path}: unknown spec fields {sorted(unknown)}")
    try:
        return LtmSpec(**{k: Fraction(v) for k, v in kv.items()})
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"{path}: {e}") from None


def _apply_config(args: argparse.Namespace, path: Path) -> None:
    kv = _load_kv(path)
    for key, val in kv.items():
        dest = key.replace("-", "_")
        if dest not in _CONFIG_TYPES:
            raise ConfigError(f"{path}: unknown config key {key!r}")
        if getattr(args, dest, None) is not None:
            continue  # explicit flag wins
        typ = _CONFIG_TYPES[dest]
        try:
            setattr(args, dest, typ(val) if callable(typ) else val)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{path}: bad value for {key}: {e}") from None


def _pick(args, name: str, profile: str):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return _PROFILES[profile][name]


def _require_float_backend(cfg: RunConfig, command: str) -> None:
    if cfg.backend != "float":
        raise ConfigError(
            f"{command} is a Monte Carlo command; only the float backend applies"
        )


def _fmt(x) -> object:
    """CSV cell formatting: shortest round-trip floats, exact Fractions."""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Fraction):
        return str(x)
    return x


def _emit(
    cfg: RunConfig,
    name: str,
    header,
    rows,
    experiment: str,
    extra: dict | None = None,
    t0: float | None = None,
) -> Path:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.output_dir / f"{name}.csv"
    util.write_csv(path, header, [[_fmt(c) for c in row] for row in rows])
    payload = {"experiment": experiment, "run_config": cfg.payload()}
    if extra:
        payload.update(extra)
    volatile = {"wall_seconds": round(time.monotonic() - t0, 3)} if t0 else None
    util.write_sidecar(path, payload, volatile)
    print(f"wrote {path}")
    return path


# ---------------------------------------------------------------------------
# subcommands


def cmd_orbit(cfg: RunConfig, args) -> int:
    if args.point is None:
        raise ConfigError("orbit needs --point x,y")
    z = _parse_point(args.point, cfg.backend)
    steps = _pick(args, "steps", cfg.profile)
    name = args.map or "ltm"
    pts = orbit(z, cfg.spec, steps, map_name=name)
    rows = [(i, _fmt(p.x), _fmt(p.y)) for i, p in enumerate(pts)]
    for i, x, y in rows:
        print(f"{i}\t{x}\t{y}")
    if args.out is not None:
        _emit(cfg, f"orbit_{name}", ["step", "x", "y"], rows,
              experiment=f"forward orbit under map '{name}'")
    return EXIT_OK


def cmd_classify(cfg: RunConfig, args) -> int:
    t0 = time.monotonic()
    if args.point:
        rows = []
        for text in args.point:
            z = _parse_point(text, cfg.backend)
            out = core_return(z, cfg.spec)
            rows.append((_fmt(z.x), _fmt(z.y), out.j, out.k, out.j + out.k - 1))
        if len(rows) == 1:
            _, _, j, k, n = rows[0]
            print(f"j={j} k={k} n={n}")
        else:
            for x, y, j, k, n in rows:
                print(f"{x},{y}\tj={j} k={k} n={n}")
        if args.out is not None:
            _emit(cfg, "classify", ["x", "y", "j", "k", "n"], rows,
                  experiment="first-return branch labels at given points", t0=t0)
        return EXIT_OK
    if args.grid is None:
        raise ConfigError("classify needs --point x,y (repeatable) or --grid N")
    import numpy as np

    from . import vectorized as vec

    g = args.grid
    u = (np.arange(g) + 0.5) / g
    xs, ys = np.meshgrid(u, u, indexing="ij")
    x0, w = float(cfg.spec.x_lo), float(cfg.spec.x_hi - cfg.spec.x_lo)
    y0, h = float(cfg.spec.y_lo), float(cfg.spec.y_hi - cfg.spec.y_lo)
    x = (x0 + w * xs).ravel()
    y = (y0 + h * ys).ravel()
    j, k = vec.classify_arr(x, y, cfg.spec, 10_000_000)
    rows = zip(map(repr, x), map(repr, y), j.tolist(), k.tolist(), (j + k - 1).tolist())
    _emit(cfg, "classify_grid", ["x", "y", "j", "k", "n"], rows,
          experiment="first-return branch labels on a core-square grid", t0=t0)
    return EXIT_OK


def cmd_cells(cfg: RunConfig, args) -> int:
    _require_float_backend(cfg, "cells")
    import numpy as np

    from . import partition as P

    t0 = time.monotonic()
    samples = cfg.samples
    n_hi = min(cfg.n_max, 200)
    hist = P.cell_histogram(n_hi, samples, cfg.seed, cfg.spec)
    ns = np.arange(2, n_hi + 1)
    mu = hist[2 : n_hi + 1] / samples
    se = np.sqrt(np.maximum(mu * (1 - mu), 0) / samples)
    fit = util.loglog_slope(ns, mu, se, n_min=2.0)
    rows = [(int(n), repr(float(m)), repr(float(s))) for n, m, s in zip(ns, mu, se)]
    tail_max = _pick(args, "tail_max", cfg.profile)
    ms, fracs, ferr = [], [], []
    m = 10
    while m <= tail_max:
        est = P.tail_measure(m, samples, cfg.seed, cfg.spec)
        ms.append(m)
        fracs.append(est.value)
        ferr.append(est.stderr)
        m *= 2
    tfit = util.loglog_slope(ms, fracs, ferr, n_min=1.0)
    _emit(cfg, "cells", ["n", "mu_hat", "stderr"], rows,
          experiment="per-return-time cell measure sweep",
          extra={"loglog_slope": fit.slope, "fit_points": fit.n_used}, t0=t0)
    _emit(cfg, "cells_tail",
          ["m", "tail_frac", "stderr"],
          [(m, repr(float(f)), repr(float(s))) for m, f, s in zip(ms, fracs, ferr)],
          experiment="cumulative tail measure of high-return cells",
          extra={"loglog_slope": tfit.slope}, t0=t0)
    print(f"cell-measure slope {fit.slope:+.3f}; tail slope {tfit.slope:+.3f}")
    return EXIT_OK


def cmd_sigma(cfg: RunConfig, args) -> int:
    from . import partition as P

    t0 = time.monotonic()
    n_hi = min(cfg.n_max, 200)
    rows = [
        (ln.family, ln.index, _fmt(ln.a.x), _fmt(ln.a.y), _fmt(ln.b.x), _fmt(ln.b.y))
        for ln in P.singular_lines_h(n_hi) + P.singular_lines_v(n_hi)
    ]
    _emit(cfg, "sigma_lines", ["family", "index", "ax", "ay", "bx", "by"], rows,
          experiment="explicit singularity-line families of the induced map", t0=t0)

    exact_mode = cfg.backend == "rational"
    crows = []
    worst = 0.0
    for n in range(2, min(n_hi, 50) + 1):
        lo = (Fraction(1, 2 * (n + 1)) + Fraction(1, 2 * n)) / 2
        hi = (Fraction(1, 2 * n) + Fraction(1, 2 * (n - 1))) / 2
        if exact_mode:
            z0 = TorusPoint.of(Fraction(1), lo)
            z1 = TorusPoint.of(Fraction(1), hi)
            hit = P.locate_cell_boundary(z0, z1, cfg.spec, tol=0, which="h")
        else:
            z0 = TorusPoint.of(1.0, float(lo))
            z1 = TorusPoint.of(1.0, float(hi))
            hit = P.locate_cell_boundary(z0, z1, cfg.spec, which="h")
        want = Fraction(1, 2 * n)
        err = abs(float(hit.y) - float(want))
        worst = max(worst, err)
        crows.append((n, _fmt(hit.y), _fmt(want), repr(err)))
    _emit(cfg, "sigma_crossings", ["n", "y_found", "y_exact", "abs_err"], crows,
          experiment="bisection-located cell boundaries on the right edge",
          extra={"max_abs_err": worst, "exact_backend": exact_mode}, t0=t0)
    print(f"edge crossings n<=min({n_hi},50): max |err| = {worst:.3g}")
    return EXIT_OK


def cmd_cones(cfg: RunConfig, args) -> int:
    _require_float_backend(cfg, "cones")
    from . import cocycle as K

    t0 = time.monotonic()
    reports = [
        K.cone_sweep(cfg.samples, cfg.seed, cfg.spec, direction=d)
        for d in ("forward", "backward")
    ]
    rows = [
        (r.direction, r.samples, r.cone_violations, r.expansion_violations,
         repr(r.min_ratio), r.dropped)
        for r in reports
    ]
    _emit(cfg, "cones",
          ["direction", "samples", "cone_violations", "expansion_violations",
           "min_ratio", "dropped"],
          rows, experiment="invariant-cone and minimum-expansion sweep", t0=t0)
    ok = all(r.clean for r in reports)
    for r in reports:
        print(f"{r.direction}: {'clean' if r.clean else 'VIOLATIONS'} "
              f"min ratio {r.min_ratio:.6f} over {r.samples} samples")
    return EXIT_OK if ok else EXIT_ASSERT


def cmd_lyapunov(cfg: RunConfig, args) -> int:
    _require_float_backend(cfg, "lyapunov")
    from . import cocycle as K

    t0 = time.monotonic()
    points = _pick(args, "points", cfg.profile)
    iters = _pick(args, "iterations", cfg.profile)
    rows = []
    for map_name in ("core", "ltm"):
        ens = K.lyapunov_ensemble(points, iters, cfg.seed, cfg.spec, map_name)
        rows.append((map_name, points, iters, repr(ens.mean), repr(ens.std),
                     repr(ens.minimum), ens.dropped))
        print(f"{map_name}: exponent {ens.mean:.4f} +- {ens.std:.4f} "
              f"(min {ens.minimum:.4f}, dropped {ens.dropped})")
    _emit(cfg, "lyapunov",
          ["map", "points", "iterations", "mean", "std", "min", "dropped"],
          rows, experiment="ensemble top Lyapunov exponents", t0=t0)
    return EXIT_OK


def cmd_onestep(cfg: RunConfig, args) -> int:
    _require_float_backend(cfg, "onestep")
    from . import cocycle as K
    from . import manifold as M

    t0 = time.monotonic()
    series_n = _pick(args, "series_n", cfg.profile)
    srows = []
    n = 10
    while n <= series_n:
        val = K.one_step_partial_series(n)
        srows.append((n, repr(val), repr(abs(val - K.ONE_STEP_SERIES_LIMIT))))
        n *= 10
    _emit(cfg, "onestep_series", ["n_start", "partial_sum", "err_vs_limit"],
          srows, experiment="corner-window partial series convergence",
          extra={"limit": K.ONE_STEP_SERIES_LIMIT}, t0=t0)

    delta = _pick(args, "delta", cfg.profile)
    lam = 1.0 + math.sqrt(2.0)
    interior = M.Segment(TorusPoint.of(0.002, 0.002 * lam),
                         TorusPoint.of(0.008, 0.008 * lam))
    probes = [
        ("interior", 0.006, interior),
        ("funnel", 1e-4, M.corner_funnel_segment(1e-4)),
        ("corner", delta, M.corner_crossing_segment(delta)),
    ]
    rows = []
    for kind, d, seg in probes:
        for mode in ("tangent", "spectral"):
            rep = M.one_step_sum(seg, cfg.spec, power=2, expansion=mode)
            rows.append((kind, repr(d), mode, repr(rep.sum_inv), rep.count))
            print(f"{kind:9s} {mode:9s} sum {rep.sum_inv:.6f} ({rep.count} pieces)")
    _emit(cfg, "onestep_segments",
          ["kind", "delta", "expansion", "sum_inv", "components"],
          rows, experiment="two-return expansion sums along probe segments", t0=t0)
    return EXIT_OK


def cmd_manifold(cfg: RunConfig, args) -> int:
    _require_float_backend(cfg, "manifold")
    from . import manifold as M

    t0 = time.monotonic()
    gens = _pick(args, "generations", cfg.profile)
    budget = _pick(args, "budget", cfg.profile)
    seed_seg = M.corner_seed_segment()
    history = M.iterate_segments(seed_seg, cfg.spec, gens, budget=budget)
    rows = [
        (g.index, g.segments.shape[0] if hasattr(g.segments, "shape") else len(g.segments),
         repr(g.total_length), repr(g.total_l_v), repr(g.min_v_ratio),
         g.pruned_count, repr(g.pruned_length))
        for g in history
    ]
    het = M.heteroclinic_probe(seed_seg, cfg.spec, budget=budget)
    extra = {
        "heteroclinic_first_generation": het.first_generation,
        "heteroclinic_generations": list(het.found_generations),
        "stable_slope": het.stable_slope,
        "transversal": het.transversal,
    }
    _emit(cfg, "manifold",
          ["generation", "segments", "total_length", "total_l_v",
           "min_v_ratio", "pruned_count", "pruned_length"],
          rows, experiment="unstable-segment growth under the induced map",
          extra=extra, t0=t0)
    last = history[-1]
    print(f"gen {last.index}: {rows[-1][1]} segments, total height "
          f"{last.total_l_v:.3f}, min height ratio {last.min_v_ratio:.2f}")
    print(f"stable-line crossing first at generation {het.first_generation}; "
          f"seen at {list(het.found_generations)}")
    return EXIT_OK


def cmd_correlate(cfg: RunConfig, args) -> int:
    _require_float_backend(cfg, "correlate")
    from . import correlations as C

    t0 = time.monotonic()
    # default pair is odd-odd: the odd/even cross pairs vanish identically
    # under the parity symmetry (x,y) -> (1-x,1-y) of even-slope twists
    names = (args.obs or "cos_px,cos_px").split(",")
    if len(names) != 2:
        raise ConfigError("--obs wants 'phi,psi'")
    try:
        phi = C.observable_by_name(names[0].strip())
        psi = C.observable_by_name(names[1].strip())
    except KeyError as e:
        raise ConfigError(f"unknown observable {e}") from None
    which = args.maps or "both"
    if which not in ("both", "ltm", "core"):
        raise ConfigError("--maps must be both, ltm or core")
    extra: dict = {"phi": phi.name, "psi": psi.name}
    def describe(fit, kind: str) -> str:
        if fit.n_used < 2:
            return f"{kind} slope n/a ({fit.n_used} lags above noise)"
        return f"{kind} slope {fit.slope:+.3f} over {fit.n_used} filtered lags"

    if which in ("both", "ltm"):
        ser = C.estimate_correlation(phi, psi, cfg.n_max, cfg.ensemble,
                                     cfg.seed, cfg.spec)
        fit = util.loglog_slope(ser.n, ser.c, ser.stderr)
        extra["ltm_loglog_slope"] = fit.slope if fit.n_used >= 2 else None
        extra["ltm_fit_points"] = fit.n_used
        _emit(cfg, "correlate_ltm", ["n", "C_n", "stderr", "n_eff"],
              ser.rows(), experiment="correlation decay under the composed map",
              extra=extra, t0=t0)
        print(f"composed map: {describe(fit, 'log-log')}")
    if which in ("both", "core"):
        ser = C.estimate_correlation_core(phi, psi, min(cfg.n_max, 40),
                                          cfg.ensemble, cfg.seed, cfg.spec)
        fit = util.semilog_slope(ser.n, ser.c, ser.stderr)
        extra["core_semilog_slope"] = fit.slope if fit.n_used >= 2 else None
        extra["core_fit_points"] = fit.n_used
        _emit(cfg, "correlate_core", ["n", "C_n", "stderr", "n_eff"],
              ser.rows(), experiment="correlation decay under the induced map",
              extra=extra, t0=t0)
        print(f"induced map: {describe(fit, 'semilog')}")
    return EXIT_OK


def cmd_markarian(cfg: RunConfig, args) -> int:
    _require_float_backend(cfg, "markarian")
    import numpy as np

    from . import correlations as C

    t0 = time.monotonic()
    if args.b is not None:
        b = args.b
    else:
        pilot = C.estimate_correlation_core(
            C.observable_by_name("cos_px"), C.observable_by_name("cos_px"),
            12, 200_000, cfg.seed, cfg.spec)
        fit = util.semilog_slope(pilot.n, pilot.c, pilot.stderr)
        theta = math.exp(fit.slope)
        b = C.default_markarian_b(theta)
    scan_ns = _PROFILES[cfg.profile]["scan_ns"]
    rows = []
    for n in scan_ns:
        scan = C.markarian_scan(n, b, cfg.samples, cfg.seed, cfg.spec)
        rows.append((n, repr(b), repr(scan.frac_busy.value),
                     repr(scan.beta_hat), repr(scan.complement_frac.value)))
        print(f"n={n}: busy {scan.frac_busy.value:.4f}, complement "
              f"{scan.complement_frac.value:.2e}, beta_hat {scan.beta_hat:.3f}")
    comp = [float(r[4]) for r in rows]
    slope = util.linear_fit(np.log([r[0] for r in rows]), np.log(comp)).slope
    _emit(cfg, "markarian",
          ["n", "b", "frac_B", "beta_hat", "complement_frac"], rows,
          experiment="busy-fraction scan of per-orbit visit counts",
          extra={"complement_loglog_slope": slope}, t0=t0)

    iso_hi = _pick(args, "iso_hi", cfg.profile)
    iso = C.isolation_scan(100, iso_hi, cfg.samples, cfg.seed, cfg.spec)
    irows = [
        (int(math.isqrt(lo * hi)), int(mn), int(ct))
        for lo, hi, mn, ct in iso.bins
    ]
    _emit(cfg, "isolation", ["n", "min_max_N", "samples"], irows,
          experiment="worst-case visit depth near the funnel corner",
          extra={"fit_slope": iso.slope, "fit_intercept": iso.intercept}, t0=t0)
    print(f"isolation: min-depth fit slope {iso.slope:+.3f}")

    td = C.tail_decomposition(100, 0.5, cfg.samples, cfg.seed, cfg.spec)
    trows = [(td.n, repr(td.beta), td.threshold,
              repr(td.forward.value), repr(td.forward.stderr),
              repr(td.backward.value), repr(td.backward.stderr))]
    _emit(cfg, "markarian_tail",
          ["n", "beta", "threshold", "forward", "forward_se",
           "backward", "backward_se"],
          trows, experiment="forward/backward deep-cell hit fractions", t0=t0)
    return EXIT_OK


def cmd_acceptance(cfg: RunConfig, args) -> int:
    from . import acceptance as acc

    t0 = time.monotonic()
    results = acc.run_suite(cfg.profile, seed=cfg.seed, spec=cfg.spec)
    rows = []
    for r in results:
        line = acc.format_line(r)
        print(line)
        rows.append((r.index, r.name, "PASS" if r.passed else "FAIL",
                     r.measured, r.expected, repr(round(r.seconds, 2))))
    n_fail = sum(not r.passed for r in results)
    _emit(cfg, "acceptance",
          ["index", "name", "status", "measured", "expected", "seconds"],
          rows, experiment="full acceptance suite",
          extra={"failures": n_fail, "profile": cfg.profile}, t0=t0)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return EXIT_OK if n_fail == 0 else EXIT_ASSERT


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _flag(common, "--spec-file", type=str, help="LtmSpec overrides, key=value file")
    _flag(common, "--config", type=str, help="flat key=value defaults file")
    _flag(common, "--backend", type=str, choices=["float", "rational"],
          help="arithmetic backend (default float)")
    _flag(common, "--seed", type=int, help="base RNG seed (default 0)")
    _flag(common, "--samples", type=int, help="Monte Carlo sample count")
    _flag(common, "--ensemble", type=int, help="correlation ensemble size")
    _flag(common, "--n-max", type=int, help="lag / index sweep bound")
    _flag(common, "--threads", type=str, help="worker hint: integer or 'auto'")
    _flag(common, "--out", type=str, help="output directory (default '.')")
    _flag(common, "--profile", type=str, choices=list(_PROFILES),
          help="workload scale (default desk)")

    top = _Parser(prog="ltmlab", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, fn, help_text: str) -> _Parser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("orbit", cmd_orbit, "iterate a point under a named map")
    _flag(p, "--point", type=str, help="starting point 'x,y'")
    _flag(p, "--steps", type=int, help="iterations to take")
    _flag(p, "--map", type=str, choices=["ltm", "h", "v", "core"],
          help="which map to iterate")

    p = add("classify", cmd_classify, "branch labels (j,k,n) for points or a grid")
    p.add_argument("--point", action="append", default=None,
                   help="point 'x,y'; repeatable")
    _CONFIG_TYPES.setdefault("point", str)
    _flag(p, "--grid", type=int, help="classify an NxN core-square grid")

    p = add("cells", cmd_cells, "cell-measure sweep and tail fractions")
    _flag(p, "--tail-max", type=int, help="largest cumulative-tail index")

    p = add("sigma", cmd_sigma, "singularity-line families and edge crossings")

    add("cones", cmd_cones, "cone invariance / expansion property sweep")

    p = add("lyapunov", cmd_lyapunov, "ensemble Lyapunov exponents, both maps")
    _flag(p, "--points", type=int, help="ensemble size")
    _flag(p, "--iterations", type=int, help="iterations per orbit")

    p = add("onestep", cmd_onestep, "expansion sums along probe segments")
    _flag(p, "--delta", type=float, help="corner-chord distance")
    _flag(p, "--series-n", type=int, help="largest partial-series start index")

    p = add("manifold", cmd_manifold, "unstable-segment growth experiment")
    _flag(p, "--generations", type=int, help="growth generations")
    _flag(p, "--budget", type=int, help="per-generation segment budget")

    p = add("correlate", cmd_correlate, "correlation decay, composed/induced maps")
    _flag(p, "--obs", type=str, help="observable pair 'phi,psi'")
    _flag(p, "--maps", type=str, choices=["both", "ltm", "core"],
          help="which maps to estimate")

    p = add("markarian", cmd_markarian, "visit-count scans and isolation depths")
    _flag(p, "--b", type=float, help="busy threshold multiplier")
    _flag(p, "--iso-hi", type=int, help="largest isolation label")

    add("acceptance", cmd_acceptance, "run the acceptance suite")
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            _apply_config(args, Path(args.config))
        spec = (
            _spec_from_file(Path(args.spec_file))
            if args.spec_file is not None
            else LtmSpec.canonical()
        )
        profile = args.profile or "desk"
        threads = args.threads or "auto"
        if threads != "auto":
            try:
                int(threads)
            except ValueError:
                raise ConfigError(f"--threads wants an integer or 'auto', got {threads!r}")
        cfg = RunConfig(
            spec=spec,
            backend=args.backend or "float",
            seed=args.seed if args.seed is not None else 0,
            samples=args.samples or _PROFILES[profile]["samples"],
            ensemble=args.ensemble or _PROFILES[profile]["ensemble"],
            n_max=args.n_max or _PROFILES[profile]["n_max"],
            output_dir=Path(args.out or "."),
            threads=threads,
            profile=profile,
        )
        return args.func(cfg, args)
    except ConfigError as e:
        print(f"ltmlab: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ReturnTimeOverflow as e:
        print(f"ltmlab: return-time overflow: {e}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
