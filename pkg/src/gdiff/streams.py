"""Reproducible, partition-independent random streams.

Samples are grouped in fixed blocks of ``BLOCK`` consecutive indices. Block
``b`` draws its variates from a generator seeded by ``(seed, b)``, and
always draws a full block before slicing, so sample ``i`` sees the same
variates whatever ``n`` is and however blocks are spread across workers.
Reductions are summed in block order, which makes aggregates bit-identical
for any worker count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK = 8192
THREADS_ENV = "GDIFF_THREADS"


def default_workers() -> int:
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(block),))))


def blocks(n: int):
    """``(block_index, start, stop)`` triples covering ``range(n)``."""
    return [(b, start, min(start + BLOCK, n)) for b, start in enumerate(range(0, n, BLOCK))]


def map_blocks(fn, n: int, workers: int | None = None):
    """Apply ``fn(block, start, stop)`` to every block; results come back in block order."""
    parts = blocks(n)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(parts) <= 1:
        return [fn(*p) for p in parts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: fn(*p), parts))
