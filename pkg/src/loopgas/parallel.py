"""Deterministic parallelism: counter-based RNG streams and ordered reduction.

Every Monte Carlo estimator is split into fixed-size sample blocks.  Block k
of a named stream always uses the Philox stream keyed by (seed, stream label,
k), and block results are reduced in block order, so the numbers are
byte-identical for any worker count, including serial runs.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_MASK = (1 << 64) - 1

BLOCK_SIZE = 4096


def derive_seed(seed: int, *labels) -> int:
    """Stable 64-bit stream id from a base seed and hashable labels.

    Uses blake2b, not the builtin hash, so the value does not depend on
    PYTHONHASHSEED or the process.
    """
    text = repr((int(seed) & _MASK,) + labels).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "big")


def task_rng(seed: int, task_id: int) -> np.random.Generator:
    """Independent generator for one task; identical across runs and workers."""
    key = np.array([int(seed) & _MASK, int(task_id) & _MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_blocks(n_samples: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    """Partition a sample budget into (block_id, count) pairs.

    The partition depends only on n_samples, never on the worker count.
    """
    blocks = []
    done = 0
    k = 0
    while done < n_samples:
        take = min(block_size, n_samples - done)
        blocks.append((k, take))
        done += take
        k += 1
    return blocks


def parallel_map(fn, args_list, threads: int = 1) -> list:
    """Map preserving input order; threads <= 1 runs inline."""
    if threads <= 1:
        return [fn(a) for a in args_list]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, args_list))
