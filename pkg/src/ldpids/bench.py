"""Timing of the compiled kernels against their numpy fallbacks."""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from . import _fallback

try:
    from . import _kernels
except ImportError:
    _kernels = None


def _cases(rng):
    values = rng.integers(0, 5, 1_000_000).astype(np.uint8)
    uniforms = rng.random(values.shape[0])
    e = np.exp(1.0)
    p, q = e / (e + 4), 1 / (e + 4)
    block = np.ascontiguousarray(rng.random((300, 4000)) * 0.05)
    return {
        "grr_perturb_counts (1M reports, d=5)": lambda m: m.grr_perturb_counts(values, uniforms, p, q, 5),
        "window_scan (300 x 4000, w=20)": lambda m: m.window_scan(block, 20, 1e9),
    }


def run(repeat: int = 5, seed: int = 0) -> list:
    rows = []
    for name, fn in _cases(np.random.default_rng(seed)).items():
        py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=repeat))
        cy = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=repeat)) if _kernels else float("nan")
        rows.append((name, cy, py))
    return rows


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':40s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}")
    for name, cy, py in run(args.repeat):
        print(f"{name:40s} {cy:10.4f} {py:10.4f} {py / cy:8.1f}x")


if __name__ == "__main__":
    main()
