"""Blocked Monte Carlo with per-block random substreams.

Replications are cut into fixed-size blocks. Block ``b`` of stream ``s``
under master seed ``seed`` always draws from the Philox generator keyed by
``SeedSequence([seed, s, b])``, so results are identical for any number of
worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, TypeVar

import numpy as np

BLOCK_SIZE = 1000

# stream tags keep draws for different purposes independent under one seed
NULL_STREAM = 0
ALT_STREAM = 1
NYSTROM_STREAM = 2
CRIT_FOR_POWER_STREAM = 3

T = TypeVar("T")


def substream(seed: int, stream: int, block: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def blocks(reps: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    """``(block_index, size)`` pairs covering ``reps`` replications."""
    out = []
    for b, lo in enumerate(range(0, reps, block_size)):
        out.append((b, min(block_size, reps - lo)))
    return out


def map_blocks(fn: Callable[[int, int], T], reps: int, workers: int = 1) -> list[T]:
    """Evaluate ``fn(block_index, size)`` for every block, results in block order.

    ``fn`` must be picklable when ``workers > 1``.
    """
    work = blocks(reps)
    if workers <= 1 or len(work) == 1:
        return [fn(b, size) for b, size in work]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, b, size) for b, size in work]
        return [f.result() for f in futures]
