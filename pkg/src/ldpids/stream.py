"""Time-indexed truth and the per-timestamp step contract shared by all mechanisms.

Timestamps are 1-based. Users are addressed by their position ``0..N-1`` in
the stream; a :class:`Stream` keeps the mapping back to external ids.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import IndexOutOfRange, InvalidParams, OutOfOrderTimestamp
from .fo import Domain


class Strategy(enum.Enum):
    PUBLISH = "publish"
    APPROXIMATE = "approximate"


@dataclass(frozen=True)
class UserStream:
    user_id: object
    values: np.ndarray


@dataclass(frozen=True)
class StreamSnapshot:
    """All users' values at timestamp ``t``; entry ``i`` belongs to user ``i``."""

    t: int
    values: np.ndarray

    @property
    def N(self) -> int:
        return int(self.values.shape[0])


@dataclass
class Stream:
    """Dense ``(T, N)`` matrix of domain indices."""

    values: np.ndarray
    domain: Domain
    user_ids: Optional[Sequence] = None

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 2:
            raise InvalidParams("stream values must be a (T, N) matrix")
        if self.values.size and (self.values.min() < 0 or self.values.max() >= self.domain.d):
            raise IndexOutOfRange("stream contains values outside the domain")
        if self.user_ids is None:
            self.user_ids = tuple(range(self.N))
        elif len(self.user_ids) != self.N:
            raise InvalidParams("user_ids length must equal N")

    @property
    def T(self) -> int:
        return int(self.values.shape[0])

    @property
    def N(self) -> int:
        return int(self.values.shape[1])

    @property
    def d(self) -> int:
        return self.domain.d

    def snapshot(self, t: int) -> StreamSnapshot:
        if not 1 <= t <= self.T:
            raise IndexOutOfRange(f"timestamp {t} outside 1..{self.T}")
        return StreamSnapshot(t, self.values[t - 1])

    def snapshots(self) -> Iterator[StreamSnapshot]:
        for t in range(1, self.T + 1):
            yield self.snapshot(t)

    def true_histogram(self, t: int) -> np.ndarray:
        return true_histogram(self.snapshot(t), self.d)

    def true_histograms(self) -> np.ndarray:
        return np.stack([self.true_histogram(t) for t in range(1, self.T + 1)])

    def user_streams(self) -> list[UserStream]:
        return [UserStream(uid, self.values[:, i]) for i, uid in enumerate(self.user_ids)]

    @classmethod
    def from_user_streams(cls, streams: Sequence[UserStream], domain: Domain) -> "Stream":
        values = np.stack([np.asarray(s.values) for s in streams], axis=1)
        return cls(values, domain, tuple(s.user_id for s in streams))


def true_histogram(snapshot: StreamSnapshot, d: int) -> np.ndarray:
    """Fraction of users holding each domain value."""
    counts = np.bincount(np.asarray(snapshot.values, dtype=np.int64), minlength=d)
    return counts / snapshot.N


@dataclass(frozen=True)
class Report:
    """One round of uploads: each listed user sends one report at budget ``epsilon``.

    ``users=None`` means the whole population.
    """

    users: Optional[np.ndarray]
    n: int
    epsilon: float
    purpose: str


@dataclass(frozen=True)
class StepOutcome:
    t: int
    release: np.ndarray
    strategy: Strategy
    reports: tuple = ()
    dis: Optional[float] = None
    err: Optional[float] = None

    @property
    def comm_events(self) -> int:
        return sum(r.n for r in self.reports)

    def budget_vector(self, N: int) -> np.ndarray:
        spent = np.zeros(N)
        for r in self.reports:
            if r.users is None:
                spent += r.epsilon
            else:
                spent[r.users] += r.epsilon
        return spent

    @property
    def budget_spent(self) -> dict:
        """Map user position -> epsilon spent at this timestamp (silent users omitted)."""
        out: dict = {}
        for r in self.reports:
            users = range(r.n) if r.users is None else r.users.tolist()
            for u in users:
                out[u] = out.get(u, 0.0) + r.epsilon
        return out


@dataclass(frozen=True)
class MechanismConfig:
    epsilon: float
    w: int
    d: int
    N: int
    u_min: int = 1
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidParams("epsilon must be positive")
        if self.w < 1:
            raise InvalidParams("w must be >= 1")
        if self.d < 2:
            raise InvalidParams("d must be >= 2")
        if self.N < 2 * self.w:
            raise InvalidParams(f"N={self.N} too small for w={self.w}; need N >= 2w")
        if self.u_min < 1:
            raise InvalidParams("u_min must be >= 1")


class Mechanism:
    """Online stepper: consumes snapshots in order, emits one outcome per timestamp."""

    name = "base"

    def __init__(self, config: MechanismConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.t = 0
        self.last_release = np.zeros(config.d)

    def step(self, snapshot: StreamSnapshot) -> StepOutcome:
        if snapshot.t != self.t + 1:
            raise OutOfOrderTimestamp(f"expected t={self.t + 1}, got t={snapshot.t}")
        if snapshot.N != self.config.N:
            raise InvalidParams(f"snapshot has {snapshot.N} users, mechanism expects {self.config.N}")
        self.t = snapshot.t
        outcome = self._step(snapshot)
        self.last_release = outcome.release
        return outcome

    def _step(self, snapshot: StreamSnapshot) -> StepOutcome:
        raise NotImplementedError

    def _approximate(self, reports=(), dis=None, err=None) -> StepOutcome:
        return StepOutcome(self.t, self.last_release, Strategy.APPROXIMATE, tuple(reports), dis, err)


def mechanism_step(mech: Mechanism, snapshot: StreamSnapshot) -> StepOutcome:
    return mech.step(snapshot)
