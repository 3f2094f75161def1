"""Population-division mechanisms: each user reports at most once per window, with full epsilon."""
from __future__ import annotations

import math
from collections import deque

import numpy as np

from ..adaptive import estimate_dissimilarity, publication_error
from ..errors import PoolExhausted
from ..fo import avg_variance
from ..stream import StepOutcome, Strategy
from ._base import FrequencyMechanism


class UserPool:
    """Available users plus the cohorts that are locked until they leave the window."""

    def __init__(self, N: int):
        self.N = N
        self.available = np.arange(N, dtype=np.int64)
        self.in_use: deque = deque()  # (cohort, t_used), t_used non-decreasing

    def sample(self, k: int, t: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``k`` users uniformly without replacement and lock them as used at ``t``."""
        m = self.available.shape[0]
        if k > m:
            raise PoolExhausted(f"t={t}: requested {k} users but only {m} available")
        pos = rng.choice(m, size=k, replace=False)
        cohort = self.available[pos]
        keep = np.ones(m, dtype=bool)
        keep[pos] = False
        self.available = self.available[keep]
        self.in_use.append((cohort, t))
        return cohort

    def recycle(self, t: int, w: int) -> None:
        """Return every cohort used at or before ``t - w + 1``."""
        freed = []
        while self.in_use and self.in_use[0][1] <= t - w + 1:
            freed.append(self.in_use.popleft()[0])
        if freed:
            self.available = np.concatenate([self.available, *freed])

    @property
    def n_in_use(self) -> int:
        return sum(c.shape[0] for c, _ in self.in_use)


def pool_sample(pool: UserPool, k: int, t: int, rng: np.random.Generator) -> np.ndarray:
    return pool.sample(k, t, rng)


def pool_recycle(pool: UserPool, t: int, w: int) -> None:
    pool.recycle(t, w)


def scale_estimate(cohort_estimate):
    """Cohort frequencies already estimate population frequencies; identity by design."""
    return cohort_estimate


class LPU(FrequencyMechanism):
    """Uniform population: w fixed random groups take turns, one per timestamp."""

    name = "LPU"

    def __init__(self, config, rng):
        super().__init__(config, rng)
        self.groups = np.array_split(rng.permutation(config.N), config.w)

    def _step(self, snapshot):
        group = self.groups[(self.t - 1) % self.config.w]
        est, report = self.collect(snapshot.values[group], group, self.config.epsilon, "release")
        return StepOutcome(self.t, scale_estimate(est), Strategy.PUBLISH, (report,))


class _AdaptivePopulation(FrequencyMechanism):
    def __init__(self, config, rng):
        super().__init__(config, rng)
        self.pool = UserPool(config.N)
        self.unit = config.N // (2 * config.w)
        self.var_dis = avg_variance(config.epsilon, self.unit, config.d)

    def _dissimilarity(self, snapshot):
        users = self.pool.sample(self.unit, self.t, self.rng)
        est, report = self.collect(snapshot.values[users], users, self.config.epsilon, "dissimilarity")
        return estimate_dissimilarity(scale_estimate(est), self.last_release, self.var_dis), report

    def _publish(self, snapshot, n_pub, dis_report, dis, err):
        users = self.pool.sample(n_pub, self.t, self.rng)
        est, report = self.collect(snapshot.values[users], users, self.config.epsilon, "publication")
        return StepOutcome(self.t, scale_estimate(est), Strategy.PUBLISH, (dis_report, report), dis, err)

    def step(self, snapshot):
        outcome = super().step(snapshot)
        self.pool.recycle(self.t, self.config.w)
        return outcome


class LPD(_AdaptivePopulation):
    """Population distribution: each publication takes half of the remaining publication users."""

    name = "LPD"

    def __init__(self, config, rng):
        super().__init__(config, rng)
        self.pub_sizes: deque = deque(maxlen=config.w - 1)

    def _step(self, snapshot):
        cfg = self.config
        dis, dis_report = self._dissimilarity(snapshot)
        n_pp = (cfg.N // 2 - sum(self.pub_sizes)) // 2
        err = publication_error(cfg.epsilon, n_pp, cfg.d) if n_pp >= 1 else math.inf
        if self.decide(dis, err) is Strategy.PUBLISH and n_pp >= cfg.u_min:
            self.pub_sizes.append(n_pp)
            return self._publish(snapshot, n_pp, dis_report, dis, err)
        self.pub_sizes.append(0)
        return self._approximate((dis_report,), dis, err)


class LPA(_AdaptivePopulation):
    """Population absorption: skipped timestamps donate their users to the next publication,
    which then nullifies as many following timestamps."""

    name = "LPA"

    def __init__(self, config, rng):
        super().__init__(config, rng)
        self.last_pub_t = 0
        self.last_pub_size = 0

    def _step(self, snapshot):
        cfg = self.config
        dis, dis_report = self._dissimilarity(snapshot)
        # cold start behaves like a one-unit publication at t=0
        nullified = max(self.last_pub_size // self.unit - 1, 0)
        if self.t - self.last_pub_t <= nullified:
            return self._approximate((dis_report,), dis)
        absorbed = self.t - (self.last_pub_t + nullified)
        n_pp = self.unit * min(absorbed, cfg.w)
        err = publication_error(cfg.epsilon, n_pp, cfg.d)
        if self.decide(dis, err) is Strategy.PUBLISH:
            self.last_pub_t, self.last_pub_size = self.t, n_pp
            return self._publish(snapshot, n_pp, dis_report, dis, err)
        return self._approximate((dis_report,), dis, err)
