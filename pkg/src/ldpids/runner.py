"""Drive a mechanism over a stream and collect its trace and report ledger."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .audit import ReportLedger
from .metrics import RunTrace
from .stream import Mechanism, Stream


@dataclass(frozen=True)
class RunResult:
    trace: RunTrace
    ledger: ReportLedger
    outcomes: tuple


def simulate(mech: Mechanism, stream: Stream, truths: Optional[np.ndarray] = None,
             keep_outcomes: bool = False) -> RunResult:
    """Feed every snapshot of ``stream`` to ``mech`` in order."""
    if truths is None:
        truths = stream.true_histograms()
    ledger = ReportLedger(stream.N)
    releases = np.empty((stream.T, stream.d))
    comm = np.empty(stream.T, dtype=np.int64)
    strategies, kept = [], []
    for snap in stream.snapshots():
        out = mech.step(snap)
        releases[snap.t - 1] = out.release
        comm[snap.t - 1] = out.comm_events
        strategies.append(out.strategy)
        ledger.record_outcome(out)
        if keep_outcomes:
            kept.append(out)
    return RunResult(RunTrace(releases, truths, comm, tuple(strategies)), ledger, tuple(kept))
