"""Deterministic expansion of one 64-bit run seed into independent RNG streams.

Rule: the generator for stream key ``(k1, k2, ...)`` is
``Generator(PCG64(SeedSequence(entropy=seed, spawn_key=(k1, k2, ...))))``.
Keys in use:

* ``(0, 0)`` synthetic probability sequence (LNS random walk)
* ``(0, 1)`` per-timestamp selection of users holding value 1
* ``(1, mechanism_code, round(epsilon * 1e6), w)`` mechanism randomness
"""
import numpy as np

DATA = 0
MECHANISM = 1
MECHANISM_CODES = {"LBU": 0, "LSP": 1, "LBD": 2, "LBA": 3, "LPU": 4, "LPD": 5, "LPA": 6}


def substream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def mechanism_rng(seed: int, name: str, epsilon: float, w: int) -> np.random.Generator:
    return substream(seed, MECHANISM, MECHANISM_CODES[name.upper()], round(epsilon * 1e6), w)
