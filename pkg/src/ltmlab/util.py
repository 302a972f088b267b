"""Shared statistics and output plumbing: fits, binomial estimates, CSV/JSON."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class MeasureEstimate:
    """A Monte Carlo proportion with its binomial standard error."""

    value: float
    stderr: float
    hits: int
    samples: int

    def scaled(self, factor: float) -> "MeasureEstimate":
        return MeasureEstimate(
            self.value * factor, self.stderr * factor, self.hits, self.samples
        )


def binomial_estimate(hits: int, samples: int) -> MeasureEstimate:
    p = hits / samples
    return MeasureEstimate(
        value=p,
        stderr=math.sqrt(max(p * (1.0 - p), 0.0) / samples),
        hits=int(hits),
        samples=int(samples),
    )


@dataclass(frozen=True)
class FitResult:
    """Least-squares line fit with the mask of entries that entered the fit."""

    slope: float
    intercept: float
    used: np.ndarray
    n_used: int


def _fit_line(x: np.ndarray, y: np.ndarray, used: np.ndarray) -> FitResult:
    n_used = int(np.count_nonzero(used))
    if n_used < 2:
        return FitResult(float("nan"), float("nan"), used, n_used)
    slope, intercept = np.polyfit(x[used], y[used], 1)
    return FitResult(float(slope), float(intercept), used, n_used)


def loglog_slope(
    n: Sequence[float],
    c: Sequence[float],
    err: Sequence[float] | None = None,
    n_min: float = 5.0,
    noise_mult: float = 3.0,
) -> FitResult:
    """Slope of log|c| against log n, after dropping the transient (n < n_min)
    and entries within noise_mult standard errors of zero."""
    n = np.asarray(n, dtype=float)
    c = np.asarray(c, dtype=float)
    used = (n >= n_min) & np.isfinite(c) & (np.abs(c) > 0)
    if err is not None:
        used &= np.abs(c) > noise_mult * np.asarray(err, dtype=float)
    return _fit_line(np.log(np.where(n > 0, n, 1.0)), np.log(np.abs(np.where(c != 0, c, 1.0))), used)


def semilog_slope(
    n: Sequence[float],
    c: Sequence[float],
    err: Sequence[float] | None = None,
    n_min: float = 1.0,
    noise_mult: float = 3.0,
) -> FitResult:
    """Slope of log|c| against n (exponential-decay axes), noise-filtered."""
    n = np.asarray(n, dtype=float)
    c = np.asarray(c, dtype=float)
    used = (n >= n_min) & np.isfinite(c) & (np.abs(c) > 0)
    if err is not None:
        used &= np.abs(c) > noise_mult * np.asarray(err, dtype=float)
    return _fit_line(n, np.log(np.abs(np.where(c != 0, c, 1.0))), used)


def linear_fit(x: Sequence[float], y: Sequence[float]) -> FitResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    used = np.isfinite(x) & np.isfinite(y)
    return _fit_line(x, y, used)


def nondecreasing_trend(values: Sequence[float], violations_allowed: int = 1) -> bool:
    """Whether a sequence is nondecreasing up to a tolerated number of dips."""
    v = np.asarray(values, dtype=float)
    return int(np.count_nonzero(np.diff(v) < 0)) <= violations_allowed


# ---------------------------------------------------------------------------
# output files


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """RFC-4180-style CSV (stdlib quoting), one header row then data rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(list(row))
    return path


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_suffix(path.suffix + ".meta.json")


def write_sidecar(path, payload: Mapping, volatile: Mapping | None = None) -> Path:
    """JSON metadata sidecar next to an output file.

    payload must be reproducible for identical configurations; anything
    run-dependent (wall time, hostnames) belongs in `volatile`, which
    readers are expected to ignore when comparing runs.
    """
    out = sidecar_path(path)
    doc = dict(payload)
    if volatile:
        doc["volatile"] = dict(volatile)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out
