"""Seeded random streams.

Every randomized routine draws from ``numpy.random.Generator`` backed by
PCG64, seeded through ``SeedSequence`` with an integer key.  Keys combine the
user seed with the identity of the unit of work (stratum level, predictor
index, trial number), so a draw depends only on *what* is being drawn, never
on the order in which work is scheduled.
"""
from __future__ import annotations

import numpy as np

GENERATOR_NAME = "PCG64"


def make_rng(seed: int, *key: int) -> np.random.Generator:
    if seed < 0 or any(k < 0 for k in key):
        raise ValueError("seed and key components must be non-negative integers")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, key)])))


def partial_shuffle(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """First ``k`` positions of a Fisher-Yates shuffle of ``range(n)``.

    A uniform simple random sample of size ``k`` without replacement, in draw
    order.
    """
    if not 0 <= k <= n:
        raise ValueError(f"cannot draw {k} items from {n}")
    idx = np.arange(n)
    for i in range(k):
        j = int(rng.integers(i, n))
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:k].copy()

