"""Deterministic seed derivation for reproducible, trial-isolated randomness.

Every random draw in the simulator is keyed by an integer seed derived from a
master seed and an index path, so any single trial can be regenerated without
replaying the ones before it, and parallel trial execution cannot reorder the
streams.
"""

import numpy as np


def child_seed(root_seed: int, *path: int) -> int:
    """Derive a decorrelated child seed from ``root_seed`` and an index path."""
    ss = np.random.SeedSequence((int(root_seed),) + tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed) -> np.random.Generator:
    """Return ``seed`` itself if it is already a Generator, else a fresh one."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
