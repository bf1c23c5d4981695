"""Deterministic RNG streams and worker-count-independent parallel mapping.

Results of any parallel computation must not depend on the worker count, so
work is split into a fixed block layout up front; each block draws from its own
Philox stream keyed by (seed, block index), and workers merely consume blocks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

FIXED_BLOCKS = 64


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, stream]))


def partition(total: int, blocks: int = FIXED_BLOCKS) -> list[int]:
    """Split total items into a fixed layout of near-equal blocks.

    The layout depends only on (total, blocks), never on the worker count.
    """
    blocks = min(max(1, blocks), total) if total > 0 else 1
    base, extra = divmod(total, blocks)
    return [base + (1 if i < extra else 0) for i in range(blocks)]


def deterministic_map(fn, items, workers: int = 1) -> list:
    """Map fn over items, preserving order; identical output for any workers."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
