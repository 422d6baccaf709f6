"""Deterministic per-task seeds via splitmix64."""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 output for state ``x`` (already advanced)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, index: int) -> int:
    """Seed of task ``index`` under root ``seed``: the index-th splitmix64
    output of the stream started at ``seed``."""
    state = (int(seed) + index * 0x9E3779B97F4A7C15) & MASK64
    return splitmix64(state)


def child_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, index))
