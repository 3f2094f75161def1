import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ldpids import _fallback, kernels

_kernels = pytest.importorskip("ldpids._kernels")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.floats(0.01, 8), st.integers(0, 2000), st.integers(0, 2**32 - 1),
       st.sampled_from([np.uint8, np.int16, np.int32, np.int64]))
def test_perturb_backends_identical(d, eps, n, seed, dtype):
    rng = np.random.default_rng(seed)
    vals = rng.integers(0, d, n).astype(dtype)
    u = rng.random(n)
    e = np.exp(eps)
    p, q = e / (e + d - 1), 1 / (e + d - 1)
    a = _kernels.grr_perturb_values(vals, u, p, q, d)
    b = _fallback.grr_perturb_values(vals, u, p, q, d)
    assert np.array_equal(a, b)
    assert np.array_equal(_kernels.grr_perturb_counts(vals, u, p, q, d), _fallback.grr_perturb_counts(vals, u, p, q, d))


def test_perturb_edge_uniform():
    # u just below 1 must map to the last other value, never to the true one
    p, q = 0.5, 0.25
    vals = np.array([0, 2, 1], dtype=np.int64)
    u = np.full(3, np.nextafter(1.0, 0.0))
    for mod in (_kernels, _fallback):
        out = mod.grr_perturb_values(vals, u, p, q, 3)
        assert np.all(out != vals) and np.all(out < 3)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 40), st.integers(1, 12), st.integers(1, 15), st.integers(0, 2**32 - 1), st.floats(0.0, 3.0))
def test_window_scan_backends_identical(T, U, w, seed, limit):
    rng = np.random.default_rng(seed)
    block = np.ascontiguousarray(rng.integers(0, 3, (T, U)) * 0.25)
    a = _kernels.window_scan(block, w, limit)
    b = _fallback.window_scan(block, w, limit)
    assert a[1:] == b[1:]
    assert a[0] == pytest.approx(b[0], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(1, 6), st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_window_scan_matches_brute_force(T, U, w, seed):
    rng = np.random.default_rng(seed)
    block = rng.integers(0, 3, (T, U)).astype(float)
    limit = 2.0
    best, first = 0.0, None
    for t in range(T):
        for u in range(U):
            s = block[max(0, t - w + 1):t + 1, u].sum()
            best = max(best, s)
            if s > limit and first is None:
                first = (t, u)
    m, vt, vu = kernels.window_scan(np.ascontiguousarray(block), w, limit)
    assert m == pytest.approx(best)
    assert (vt, vu) == (first if first else (-1, -1))
