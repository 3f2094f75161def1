"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def grr_perturb_values(values, uniforms, p, q, d):
    values = np.asarray(values).astype(np.int64, copy=False)
    uniforms = np.asarray(uniforms, dtype=np.float64)
    keep = uniforms < p
    other = np.where(keep, 0.0, (uniforms - p) / q).astype(np.int64)
    np.minimum(other, d - 2, out=other)
    other += other >= values
    return np.where(keep, values, other)


def grr_perturb_counts(values, uniforms, p, q, d):
    return np.bincount(grr_perturb_values(values, uniforms, p, q, d), minlength=d).astype(np.int64)


def window_scan(block, w, limit):
    block = np.asarray(block, dtype=np.float64)
    if block.size == 0:
        return 0.0, -1, -1
    cs = np.cumsum(block, axis=0)
    sums = cs.copy()
    sums[w:] -= cs[:-w]
    best = max(float(sums.max()), 0.0)
    over = sums > limit
    if not over.any():
        return best, -1, -1
    t, u = np.unravel_index(int(np.argmax(over)), over.shape)
    return best, int(t), int(u)
