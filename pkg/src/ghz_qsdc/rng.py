"""Deterministic random streams keyed by (master seed, purpose tag, integer keys).

Each stream is an independent Philox generator whose seed sequence is
``SeedSequence(master, spawn_key=(crc32(tag), *keys))``. Anyone holding the
master seed can regenerate a stream without replaying the others.
"""

from __future__ import annotations

import zlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def tag_word(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, tag: str, *keys: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seeds must be non-negative")
    ss = np.random.SeedSequence(seed & SEED_MASK, spawn_key=(tag_word(tag), *(int(k) for k in keys)))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, tag: str, *keys: int) -> int:
    """A 64-bit child seed, e.g. the seed of trial ``i`` is ``derive_seed(master, "trial", i)``."""
    ss = np.random.SeedSequence(seed & SEED_MASK, spawn_key=(tag_word(tag), *(int(k) for k in keys)))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)
