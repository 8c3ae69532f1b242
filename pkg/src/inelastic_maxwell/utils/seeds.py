"""Counter-based random streams.

Every stream is a Philox generator keyed by the master seed plus a spawn key
(purpose, index, ...). Streams with distinct keys are independent, and the
same key always reproduces the same stream regardless of creation order.
"""
import numpy as np

from .errors import ArgumentError

# First component of every spawn key
DYNAMICS = 0
INITIAL = 1
SAMPLING = 2
SLACK = 3


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """
    Derive the random stream for ``key`` from a 64-bit master seed.

    Args:
        master_seed (int): Nonnegative master seed
        *key (int): Nonnegative spawn key components

    Returns:
        np.random.Generator: Philox-backed generator
    """
    if master_seed < 0 or master_seed >= 2 ** 64:
        raise ArgumentError(f"seed must be a 64-bit unsigned integer, got {master_seed}")
    if any(k < 0 for k in key):
        raise ArgumentError("spawn key components must be nonnegative")
    sequence = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))
