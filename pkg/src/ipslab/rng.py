"""Reproducible seeding.

Every replica derives its randomness from (master seed, replica index)
through numpy's SeedSequence, so results do not depend on scheduling or
thread count.  Numba kernels receive a single uint64 stream seed.
"""

import numpy as np


def seed_sequence(master, *key):
    return np.random.SeedSequence(entropy=master, spawn_key=tuple(int(k) for k in key))


def make_rng(master, *key):
    """Generator for numpy-level sampling, one per (master, key...) tuple."""
    return np.random.default_rng(seed_sequence(master, *key))


def kernel_seed(master, *key):
    """uint64 stream seed for a numba kernel."""
    state = seed_sequence(master, *key).generate_state(1, dtype=np.uint64)
    return np.uint64(state[0])


def kernel_seeds(master, n, *key):
    """n per-replica uint64 seeds, independent of execution order."""
    return np.array([kernel_seed(master, *key, k) for k in range(n)], dtype=np.uint64)
