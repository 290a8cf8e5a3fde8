"""Seeding discipline.

Every randomized operation takes a ``seed`` that is either a plain int or an
already-constructed numpy ``Generator``.  Ints are mapped to a counter-based
Philox stream (optionally salted with extra tags), so the same seed produces
the same draws on every platform; Generators are passed through untouched so
callers can chain operations on one stream.
"""

from __future__ import annotations

import numpy as np

U64 = (1 << 64) - 1

SeedLike = "int | np.random.Generator"


def philox_rng(seed: "int | np.random.Generator", *tags: int) -> np.random.Generator:
    """Philox generator for (seed, tags); pass-through for Generator input."""
    if isinstance(seed, np.random.Generator):
        return seed
    entropy = [int(seed) & U64, *(int(t) & U64 for t in tags)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_u64(seed: int, *tags: int) -> int:
    """Deterministic 64-bit sub-seed for (seed, tags)."""
    ss = np.random.SeedSequence([int(seed) & U64, *(int(t) & U64 for t in tags)])
    return int(ss.generate_state(1, np.uint64)[0])
