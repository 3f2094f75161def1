# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Must stay bit-identical to ``_fallback``."""
import numpy as np
cimport numpy as cnp

ctypedef fused index_t:
    cnp.uint8_t
    cnp.int16_t
    cnp.int32_t
    cnp.int64_t


cdef inline long _perturb_one(long v, double u, double p, double q, long d) nogil:
    cdef long other
    if u < p:
        return v
    other = <long>((u - p) / q)
    if other > d - 2:
        other = d - 2
    if other >= v:
        other += 1
    return other


def grr_perturb_values(index_t[::1] values, const double[::1] uniforms,
                       double p, double q, long d):
    cdef Py_ssize_t n = values.shape[0], i
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _perturb_one(<long>values[i], uniforms[i], p, q, d)
    return out


def grr_perturb_counts(index_t[::1] values, const double[::1] uniforms,
                       double p, double q, long d):
    cdef Py_ssize_t n = values.shape[0], i
    counts = np.zeros(d, dtype=np.int64)
    cdef cnp.int64_t[::1] c = counts
    with nogil:
        for i in range(n):
            c[_perturb_one(<long>values[i], uniforms[i], p, q, d)] += 1
    return counts


def window_scan(const double[:, ::1] block, long w, double limit):
    """Scan a (T, users) block; return (max window sum, t, user) of the first excess."""
    cdef Py_ssize_t T = block.shape[0], U = block.shape[1], t, u
    cdef double best = 0.0, s
    cdef Py_ssize_t vt = -1, vu = -1
    sums = np.zeros(U, dtype=np.float64)
    cdef double[::1] acc = sums
    with nogil:
        for t in range(T):
            for u in range(U):
                s = acc[u] + block[t, u]
                if t >= w:
                    s -= block[t - w, u]
                acc[u] = s
                if s > best:
                    best = s
                if vt < 0 and s > limit:
                    vt = t
                    vu = u
    return best, vt, vu
