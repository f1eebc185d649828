"""Deterministic random-stream derivation.

Monte Carlo loops derive one independent seed per trial from
(master_seed, trial_index) with a SplitMix64-style mixer, so a trial range
can be split across workers and merged without sharing generator state:
stats aggregated from any sharding of the index range are identical.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit scramble."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def stream_seed(master_seed: int, index: int) -> int:
    """Seed of the index-th derived stream (the index-th SplitMix64 output)."""
    if index < 0:
        raise ValueError("stream index must be non-negative")
    return mix64((master_seed + (index + 1) * _GOLDEN) & _MASK64)


def make_rng(seed: int) -> np.random.Generator:
    """numpy Generator seeded for reproducible draws."""
    return np.random.Generator(np.random.PCG64(seed))
