"""Budget-division mechanisms: every user reports at every timestamp with a slice of epsilon."""
from __future__ import annotations

from collections import deque
from fractions import Fraction

from ..adaptive import estimate_dissimilarity, publication_error
from ..fo import avg_variance
from ..stream import StepOutcome, Strategy
from ._base import FrequencyMechanism


class LBU(FrequencyMechanism):
    """Uniform budget: epsilon/w per user per timestamp."""

    name = "LBU"

    def _step(self, snapshot):
        cfg = self.config
        est, report = self.collect(snapshot.values, None, cfg.epsilon / cfg.w, "release")
        return StepOutcome(self.t, est, Strategy.PUBLISH, (report,))


class LSP(FrequencyMechanism):
    """Sampling: the full budget is spent on the first timestamp of every w-block."""

    name = "LSP"

    def _step(self, snapshot):
        if (self.t - 1) % self.config.w:
            return self._approximate()
        est, report = self.collect(snapshot.values, None, self.config.epsilon, "release")
        return StepOutcome(self.t, est, Strategy.PUBLISH, (report,))


class _AdaptiveBudget(FrequencyMechanism):
    def __init__(self, config, rng):
        super().__init__(config, rng)
        self.eps_dis = config.epsilon / (2 * config.w)
        self.var_dis = avg_variance(self.eps_dis, config.N, config.d)

    def _dissimilarity(self, snapshot):
        est, report = self.collect(snapshot.values, None, self.eps_dis, "dissimilarity")
        return estimate_dissimilarity(est, self.last_release, self.var_dis), report

    def _publish(self, snapshot, epsilon, dis_report, dis, err):
        est, report = self.collect(snapshot.values, None, epsilon, "publication")
        return StepOutcome(self.t, est, Strategy.PUBLISH, (dis_report, report), dis, err)


class LBD(_AdaptiveBudget):
    """Budget distribution: each publication takes half of the window's remaining budget.

    Publication budgets are tracked as exact fractions of epsilon.
    """

    name = "LBD"

    def __init__(self, config, rng):
        super().__init__(config, rng)
        self.pub_shares: deque = deque(maxlen=config.w - 1)

    def _step(self, snapshot):
        cfg = self.config
        dis, dis_report = self._dissimilarity(snapshot)
        remaining = Fraction(1, 2) - sum(self.pub_shares, Fraction(0))
        share = remaining / 2
        eps_pub = float(share) * cfg.epsilon
        err = publication_error(eps_pub, cfg.N, cfg.d)
        if self.decide(dis, err) is Strategy.PUBLISH:
            self.pub_shares.append(share)
            return self._publish(snapshot, eps_pub, dis_report, dis, err)
        self.pub_shares.append(Fraction(0))
        return self._approximate((dis_report,), dis, err)


class LBA(_AdaptiveBudget):
    """Budget absorption: skipped timestamps donate their uniform share to the next publication,
    which then nullifies as many following timestamps.

    Budgets are integer multiples of epsilon/(2w) and tracked as such.
    """

    name = "LBA"

    def __init__(self, config, rng):
        super().__init__(config, rng)
        self.last_pub_t = 0
        self.last_pub_units = 0

    def _step(self, snapshot):
        cfg = self.config
        dis, dis_report = self._dissimilarity(snapshot)
        # cold start behaves like a one-unit publication at t=0
        nullified = max(self.last_pub_units - 1, 0)
        if self.t - self.last_pub_t <= nullified:
            return self._approximate((dis_report,), dis)
        absorbed = self.t - (self.last_pub_t + nullified)
        units = min(absorbed, cfg.w)
        eps_pub = units * self.eps_dis
        err = publication_error(eps_pub, cfg.N, cfg.d)
        if self.decide(dis, err) is Strategy.PUBLISH:
            self.last_pub_t, self.last_pub_units = self.t, units
            return self._publish(snapshot, eps_pub, dis_report, dis, err)
        return self._approximate((dis_report,), dis, err)
