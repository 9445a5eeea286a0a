"""Counter-based random streams and worker-count resolution.

Randomized routines consume uniform draws in fixed-size chunks, each chunk
coming from its own Philox generator keyed by (seed, chunk index).  A
sample's randomness is therefore a pure function of the seed and its global
sample index, so hit counts and sampled codes are bit-identical no matter
how chunks are distributed over workers.
"""

from __future__ import annotations

import os

import numpy as np

# Samples per chunk.  Fixed constant: changing it changes the draws.
CHUNK = 4096


def check_seed(seed) -> int:
    """Validate and return a seed usable as a 64-bit Philox key word."""
    if not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be in [0, 2^64), got {seed}")
    return seed


def chunk_rng(seed, chunk: int) -> np.random.Generator:
    """Generator for one chunk of a keyed stream."""
    key = np.array([check_seed(seed), chunk], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def resolve_workers(workers=None) -> int:
    """Worker count to use, honoring the MULTIPACK_THREADS cap (0 = auto)."""
    env = os.environ.get("MULTIPACK_THREADS", "").strip()
    cap = None
    if env:
        cap = int(env)
        if cap <= 0:
            cap = os.cpu_count() or 1
    if workers is None:
        workers = cap if cap is not None else 1
    elif workers <= 0:
        workers = os.cpu_count() or 1
    if cap is not None:
        workers = min(workers, cap)
    return max(1, int(workers))
