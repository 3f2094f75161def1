import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ldpids.audit import ReportLedger, audit_once_per_window, audit_window_budget


def test_uniform_ledger_passes():
    T, N, w, eps = 30, 5, 6, 1.0
    m = np.full((T, N), eps / w)
    res = audit_window_budget(m, w, eps)
    assert res.passed and res.max_window == pytest.approx(eps)


def test_consecutive_full_spend_violates():
    m = np.zeros((10, 3))
    m[4, 1] = m[5, 1] = 1.0
    res = audit_window_budget(m, 2, 1.0)
    assert not res.passed
    v = res.violation
    assert (v.user, v.window_start, v.window_end) == (1, 5, 6)
    assert v.amount == pytest.approx(2.0)


def test_once_per_window_boundaries():
    w = 5
    ok = np.zeros((20, 1))
    ok[[2, 2 + w]] = 1
    assert audit_once_per_window(ok, w).passed
    bad = np.zeros((20, 1))
    bad[[2, 2 + w - 1]] = 1
    res = audit_once_per_window(bad, w)
    assert not res.passed and res.violation.window_end == 2 + w


def test_ledger_matches_dense():
    led = ReportLedger(6)
    led.record(1, None, 0.1)
    led.record(2, np.array([4, 1]), 1.0)
    led.record(2, np.array([0]), 0.5)
    led.record(3, np.array([1]), 1.0)
    dense = led.budget_matrix()
    assert dense.shape == (3, 6)
    assert dense[1].tolist() == [0.5, 1.0, 0, 0, 1.0, 0]
    res = audit_window_budget(led, 2, 1.0)
    assert not res.passed
    assert (res.violation.user, res.violation.window_start, res.violation.window_end) == (1, 1, 2)
    assert res.violation.amount == pytest.approx(1.1)
    # user 0 reported at t=1 (everyone) and t=2
    assert audit_once_per_window(led, 2).violation.user == 0


def test_ledger_blocks_cover_all_users(monkeypatch):
    import ldpids.audit as audit

    monkeypatch.setattr(audit, "_BLOCK_CELLS", 8)
    led = ReportLedger(13)
    led.record(1, np.arange(13), 1.0)
    led.record(3, np.array([12]), 1.0)
    res = audit_once_per_window(led, 3)
    assert not res.passed and res.violation.user == 12
    assert audit_once_per_window(led, 2).passed


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_first_violation_matches_brute_force(T, N, w, seed):
    rng = np.random.default_rng(seed)
    m = (rng.random((T, N)) < 0.3).astype(float)
    res = audit_once_per_window(m, w)
    first = None
    for t in range(T):
        for u in range(N):
            if m[max(0, t - w + 1):t + 1, u].sum() > 1 and first is None:
                first = (u, t + 1)
    if first is None:
        assert res.passed
    else:
        assert (res.violation.user, res.violation.window_end) == first
