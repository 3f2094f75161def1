import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ldpids.errors import DegenerateSeries, LengthMismatch
from ldpids.metrics import RunTrace, cfpu, event_roc, monitored_series, mre, roc_auc
from ldpids.stream import Strategy


def make_trace(releases, truths, comm=None):
    releases, truths = np.atleast_2d(releases).astype(float), np.atleast_2d(truths).astype(float)
    T = releases.shape[0]
    comm = np.zeros(T, dtype=int) if comm is None else np.asarray(comm)
    return RunTrace(releases, truths, comm, (Strategy.PUBLISH,) * T)


def test_mre_examples():
    truth = np.array([[0.3, 0.7], [0.5, 0.5]])
    assert mre(make_trace(truth, truth)) == 0.0
    assert mre(make_trace([[0.2]], [[0.1]])) == pytest.approx(1.0)
    # floor applies to empty cells
    assert mre(make_trace([[0.001, 1.0]], [[0.0, 1.0]])) == pytest.approx(0.5)


@given(st.lists(st.floats(0, 1), min_size=4, max_size=4), st.lists(st.floats(-1, 1), min_size=4, max_size=4))
def test_mre_linear_in_error(truth, err):
    c = np.array(truth).reshape(2, 2)
    e = np.array(err).reshape(2, 2)
    assert mre(make_trace(c + 2 * e, c)) == pytest.approx(2 * mre(make_trace(c + e, c)), rel=1e-9, abs=1e-12)


def test_cfpu():
    tr = make_trace(np.zeros((4, 2)), np.zeros((4, 2)), [10, 10, 10, 10])
    assert cfpu(tr, 10) == 1.0
    tr = make_trace(np.zeros((40, 2)), np.zeros((40, 2)), [1] * 40)
    assert cfpu(tr, 20) == 0.05


def test_trace_lengths_checked():
    with pytest.raises(LengthMismatch):
        RunTrace(np.zeros((3, 2)), np.zeros((2, 2)), np.zeros(3), (Strategy.PUBLISH,) * 3)


def test_monitor_series():
    h = np.array([[0.2, 0.8], [0.6, 0.4]])
    assert np.allclose(monitored_series(h, "mean"), [0.8, 0.4])
    assert np.allclose(monitored_series(h, "max"), [0.8, 0.6])
    assert np.allclose(monitored_series(h, 0), [0.2, 0.6])


def _binary(series):
    s = np.asarray(series, dtype=float)
    return np.column_stack([1 - s, s])


def test_roc_perfect_detector():
    truth = _binary(np.sin(np.linspace(0, 6, 100)) * 0.1 + 0.2)
    curve = event_roc(make_trace(truth, truth))
    assert (0.0, 1.0) in curve.points
    assert roc_auc(curve) == pytest.approx(1.0)


def test_roc_hand_example():
    truth = _binary([0.0, 0.1, 0.9, 1.0])  # delta = 0.75, positives at t=3,4
    rel = _binary([0.5, 0.2, 0.3, 0.8])
    curve = event_roc(make_trace(rel, truth))
    assert curve.delta == pytest.approx(0.75)
    assert curve.points == [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
    assert roc_auc(curve) == pytest.approx(0.75)


def test_roc_ties_and_monotone():
    truth = _binary([0.0, 1.0, 0.0, 1.0])
    rel = _binary([0.5, 0.5, 0.5, 0.5])
    curve = event_roc(make_trace(rel, truth))
    assert curve.points == [(0.0, 0.0), (1.0, 1.0)]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_roc_monotone_property(seed):
    rng = np.random.default_rng(seed)
    truth = _binary(rng.random(50))
    rel = _binary(rng.random(50))
    c = event_roc(make_trace(rel, truth))
    assert np.all(np.diff(c.fpr) >= 0) and np.all(np.diff(c.tpr) >= 0)
    assert c.points[0] == (0.0, 0.0) and c.points[-1] == (1.0, 1.0)


def test_roc_independent_releases_near_half():
    rng = np.random.default_rng(0)
    aucs = [roc_auc(event_roc(make_trace(_binary(rng.random(200)), _binary(rng.random(200)))))
            for _ in range(300)]
    # permutation oracle: AUC of independent scores has mean 1/2
    assert abs(np.mean(aucs) - 0.5) < 0.01


def test_roc_degenerate():
    flat = _binary([0.3] * 5)
    with pytest.raises(DegenerateSeries):
        event_roc(make_trace(flat, flat))
