from __future__ import annotations

import numpy as np

from ..adaptive import choose_strategy
from ..fo import GrrParams, grr_estimate, grr_perturb_counts
from ..stream import Mechanism, Report


class FrequencyMechanism(Mechanism):
    """Mechanism that collects GRR reports from cohorts of users."""

    def __init__(self, config, rng):
        super().__init__(config, rng)
        self._params: dict = {}
        # replaceable publish/approximate rule, called once per undecided timestamp
        self.decide = choose_strategy

    def params(self, epsilon: float) -> GrrParams:
        p = self._params.get(epsilon)
        if p is None:
            p = self._params[epsilon] = GrrParams.make(epsilon, self.config.d)
        return p

    def collect(self, values: np.ndarray, users, epsilon: float, purpose: str):
        """Perturb ``values`` (the cohort's true indices) and return ``(estimate, report)``."""
        params = self.params(epsilon)
        counts = grr_perturb_counts(values, params, self.rng)
        n = int(values.shape[0])
        return grr_estimate(counts, n, params), Report(users, n, epsilon, purpose)
