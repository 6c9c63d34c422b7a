"""Deterministic random substreams.

Every random draw in the package comes from a generator built here, keyed by
integers, so results never depend on execution order or ambient entropy.
"""
from __future__ import annotations

import zlib

import numpy as np

# stream tags
ENVIRONMENT = 0
ALGORITHM = 1
MODEL = 2
OPTIMIZER = 3


def stable_hash(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def substream(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))))


def derive_seed(seed: int, *keys: int) -> int:
    """Collapse a seed and integer keys into a single 63-bit seed."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(2, dtype=np.uint32).astype(np.uint64) @ np.array([1 << 32, 1], dtype=np.uint64)) >> 1


def run_seed(master_seed: int, problem_id: str, run_index: int) -> int:
    """Per-run seed shared by every variant, so the ablation is a paired comparison."""
    return derive_seed(master_seed, stable_hash(problem_id), run_index)
