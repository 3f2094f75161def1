"""Utility (MRE), communication (CFPU) and event-monitoring (ROC) measures over a run."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateSeries, InvalidParams, LengthMismatch

DEFAULT_GAMMA = 0.001


@dataclass(frozen=True)
class RunTrace:
    releases: np.ndarray  # (T, d)
    truths: np.ndarray  # (T, d)
    comm_events: np.ndarray  # (T,)
    strategies: tuple

    def __post_init__(self):
        T = self.releases.shape[0]
        if self.truths.shape != self.releases.shape or len(self.comm_events) != T or len(self.strategies) != T:
            raise LengthMismatch("trace sequences must share length T and histogram width")

    @property
    def T(self) -> int:
        return int(self.releases.shape[0])


def mre(trace: RunTrace, gamma: float = DEFAULT_GAMMA) -> float:
    """Mean over timestamps and cells of ``|r - c| / max(c, gamma)``."""
    if trace.T < 1:
        raise InvalidParams("empty trace")
    err = np.abs(trace.releases - trace.truths) / np.maximum(trace.truths, gamma)
    return float(err.mean())


def cfpu(trace: RunTrace, N: int) -> float:
    """Average uploads per user per timestamp."""
    return float(np.sum(trace.comm_events)) / (N * trace.T)


def monitored_series(histograms: np.ndarray, monitor: Union[str, int] = "mean") -> np.ndarray:
    """Scalar per timestamp: ``"mean"`` is the index-weighted mean sum_k k*c[k]
    (equal to c[1] on a binary domain), ``"max"`` the largest cell, an int a fixed cell."""
    h = np.asarray(histograms, dtype=np.float64)
    if monitor == "mean":
        return h @ np.arange(h.shape[1], dtype=np.float64)
    if monitor == "max":
        return h.max(axis=1)
    if isinstance(monitor, (int, np.integer)):
        return h[:, int(monitor)]
    raise InvalidParams(f"unknown monitor {monitor!r}")


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    delta: float

    @property
    def points(self) -> list:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def auc(self) -> float:
        return float(np.sum(np.diff(self.fpr) * (self.tpr[1:] + self.tpr[:-1]) / 2.0))


def event_roc(trace: RunTrace, monitor: Union[str, int] = "mean", delta_fraction: float = 0.75) -> RocCurve:
    """ROC of above-threshold detection on the released series.

    Positives are timestamps whose true monitored value exceeds
    ``delta = min + delta_fraction * (max - min)`` of the true series. The
    detector flags ``released >= threshold`` for every distinct released value.
    """
    if trace.T < 2:
        raise InvalidParams("event monitoring needs at least 2 timestamps")
    truth = monitored_series(trace.truths, monitor)
    score = monitored_series(trace.releases, monitor)
    lo, hi = float(truth.min()), float(truth.max())
    if hi <= lo:
        raise DegenerateSeries("true monitored series is constant")
    delta = lo + delta_fraction * (hi - lo)
    labels = truth > delta
    n_pos = int(labels.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateSeries("threshold leaves only one class")
    order = np.argsort(-score, kind="stable")
    s, y = score[order], labels[order]
    tp, fp = np.cumsum(y), np.cumsum(~y)
    # keep the last index of each run of tied scores
    last = np.r_[s[1:] != s[:-1], True]
    tpr = np.r_[0.0, tp[last] / n_pos]
    fpr = np.r_[0.0, fp[last] / n_neg]
    thresholds = np.r_[np.inf, s[last]]
    return RocCurve(fpr, tpr, thresholds, delta)


def roc_auc(curve: RocCurve) -> float:
    return curve.auc()
