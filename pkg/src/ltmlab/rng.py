"""Deterministic, shard-independent sampling streams.

Every Monte Carlo estimator draws from a Philox counter-based stream keyed
by (seed, stream tag). Sample index i owns the fixed double-slots
[d*i, d*(i+1)) of its stream, where d is the per-sample draw count and must
divide the 4-double Philox block. A shard covering indices [start, stop)
therefore reproduces exactly the same numbers regardless of how the index
range is partitioned — merging shard results in index order is equivalent
to one giant sequential run.

Verified here and in tests: numpy's Philox with counter=k equals skipping
4k doubles of the same keyed stream.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

BLOCK_DOUBLES = 4  # Philox-4x64 emits four 64-bit words per counter tick

# stream tags, one per estimator family (documented so runs are reproducible
# across versions; never renumber)
STREAM_CELLS = 1
STREAM_CORR_FULL = 2
STREAM_CORR_CORE = 3
STREAM_CONES = 4
STREAM_LYAPUNOV = 5
STREAM_MARKARIAN = 6
STREAM_ISOLATION = 7
STREAM_NEIGHBORHOOD = 8
STREAM_SEGMENTS = 9
STREAM_RETURN_CHECK = 10
STREAM_JACOBIAN = 11
STREAM_TAILS = 12
STREAM_TAIL_DECOMP = 13
STREAM_CONE_DIRS = 14


def uniform_block(
    seed: int, tag: int, start: int, count: int, doubles_per_sample: int
) -> np.ndarray:
    """Uniform [0,1) doubles for sample indices [start, start+count).

    Returns shape (count, doubles_per_sample). doubles_per_sample must be
    1, 2 or 4 so that sample boundaries align with Philox blocks for every
    aligned shard start; pad the request to 4 when a sample needs 3 draws.
    """
    d = doubles_per_sample
    if d not in (1, 2, 4):
        raise ValueError("doubles_per_sample must be 1, 2 or 4")
    first_double = start * d
    if first_double % BLOCK_DOUBLES:
        raise ValueError(
            f"shard start {start} with d={d} does not align to a Philox block; "
            f"use shard sizes that are multiples of {BLOCK_DOUBLES // d}"
        )
    bg = np.random.Philox(
        seed=np.random.SeedSequence((int(seed), int(tag))),
        counter=first_double // BLOCK_DOUBLES,
    )
    gen = np.random.Generator(bg)
    flat = gen.random(count * d, dtype=np.float64)
    return flat.reshape(count, d)


def shard_ranges(total: int, shard_size: int) -> Iterator[tuple]:
    """(start, stop) index ranges covering [0, total) in fixed order.

    shard_size is rounded up to a multiple of 4 so every shard start stays
    block-aligned for any d in {1, 2, 4}.
    """
    if shard_size <= 0:
        raise ValueError("shard_size must be positive")
    shard_size = ((shard_size + 3) // 4) * 4
    start = 0
    while start < total:
        yield start, min(start + shard_size, total)
        start += shard_size


DEFAULT_SHARD = 1_000_000
