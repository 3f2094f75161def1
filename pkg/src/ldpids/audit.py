"""Mechanism-agnostic w-event accounting checks over per-user report ledgers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import kernels

TOLERANCE = 1e-9
_BLOCK_CELLS = 1 << 22


class ReportLedger:
    """Every upload of a run: ``(t, users, epsilon)``; ``users=None`` means everyone."""

    def __init__(self, N: int):
        self.N = N
        self.T = 0
        self.events: list = []

    def record(self, t: int, users: Optional[np.ndarray], epsilon: float) -> None:
        if users is not None:
            users = np.sort(np.asarray(users, dtype=np.int64))
        self.events.append((t, users, float(epsilon)))
        self.T = max(self.T, t)

    def record_outcome(self, outcome) -> None:
        self.T = max(self.T, outcome.t)
        for r in outcome.reports:
            self.record(outcome.t, r.users, r.epsilon)

    def blocks(self, kind: str):
        """Yield ``(first_user, dense (T, B) matrix)`` of budget or report counts."""
        step = max(1, _BLOCK_CELLS // max(self.T, 1))
        for u0 in range(0, self.N, step):
            u1 = min(self.N, u0 + step)
            block = np.zeros((self.T, u1 - u0))
            for t, users, eps in self.events:
                amount = eps if kind == "budget" else 1.0
                if users is None:
                    block[t - 1] += amount
                else:
                    lo, hi = np.searchsorted(users, [u0, u1])
                    np.add.at(block[t - 1], users[lo:hi] - u0, amount)
            yield u0, block

    def budget_matrix(self) -> np.ndarray:
        return np.concatenate([b for _, b in self.blocks("budget")], axis=1)

    def participation_matrix(self) -> np.ndarray:
        return np.concatenate([b for _, b in self.blocks("reports")], axis=1)


@dataclass(frozen=True)
class Violation:
    check: str
    user: int
    window_start: int
    window_end: int
    amount: float
    limit: float


@dataclass(frozen=True)
class AuditResult:
    check: str
    passed: bool
    max_window: float
    violation: Optional[Violation] = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "violation"


def _scan(source, kind: str, w: int, limit: float, check: str) -> AuditResult:
    if isinstance(source, ReportLedger):
        blocks = source.blocks(kind)
    else:  # raw (T, N) matrix, rows are timestamps
        blocks = [(0, np.ascontiguousarray(source, dtype=np.float64))]
    best, first = 0.0, None
    for u0, block in blocks:
        m, vt, vu = kernels.window_scan(np.ascontiguousarray(block), w, limit)
        best = max(best, m)
        if vt >= 0 and (first is None or (vt, u0 + vu) < first):
            first = (vt, u0 + vu)
    if first is None:
        return AuditResult(check, True, best)
    t_end = first[0] + 1
    # recompute the offending window sum for the report
    if isinstance(source, ReportLedger):
        col = np.zeros(source.T)
        for t, users, eps in source.events:
            if users is None or np.searchsorted(users, first[1], side="right") > np.searchsorted(users, first[1]):
                col[t - 1] += eps if kind == "budget" else 1.0
    else:
        col = np.asarray(source, dtype=np.float64)[:, first[1]]
    start = max(1, t_end - w + 1)
    spent = float(col[start - 1:t_end].sum())
    return AuditResult(check, False, best, Violation(check, first[1], start, t_end, spent, limit))


def audit_window_budget(ledger: Union[ReportLedger, np.ndarray], w: int, epsilon_total: float,
                        tol: float = TOLERANCE) -> AuditResult:
    """Every user's spend over every ``w`` consecutive timestamps stays within ``epsilon_total``."""
    return _scan(ledger, "budget", w, epsilon_total + tol, "window_budget")


def audit_once_per_window(participation: Union[ReportLedger, np.ndarray], w: int) -> AuditResult:
    """No user reports more than once within any ``w`` consecutive timestamps."""
    return _scan(participation, "reports", w, 1.0 + TOLERANCE, "once_per_window")
