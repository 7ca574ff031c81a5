"""Small shared helpers: substream RNG and a deterministic worker map."""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor

import numpy as np


def substream(seed, *ids) -> np.random.Generator:
    """Independent generator keyed by (seed, *ids).

    String ids are hashed to integers so substreams are stable across runs
    and independent of evaluation order or thread scheduling.
    """
    keys = [int(seed)]
    for x in ids:
        if isinstance(x, str):
            digest = hashlib.sha256(x.encode()).digest()[:8]
            keys.append(int.from_bytes(digest, "little"))
        else:
            keys.append(int(x))
    return np.random.default_rng(np.random.SeedSequence(keys))


def parallel_map(fn, items, threads: int = 1):
    """Map preserving input order; results do not depend on worker count."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))
