"""Private dissimilarity, potential publication error, and the publish/approximate rule."""
from __future__ import annotations

import math

import numpy as np

from .errors import EmptyCohort, LengthMismatch
from .fo import avg_variance
from .stream import Strategy


def estimate_dissimilarity(est, last_release, var_avg: float) -> float:
    """Unbiased estimate of the mean squared gap between the truth and ``last_release``.

    ``est`` must be an unbiased histogram estimate whose cell-averaged variance
    is ``var_avg``. The result can be negative and is returned as is.
    """
    est = np.asarray(est, dtype=np.float64)
    last_release = np.asarray(last_release, dtype=np.float64)
    if est.shape != last_release.shape:
        raise LengthMismatch(f"{est.shape} vs {last_release.shape}")
    diff = est - last_release
    return float(np.mean(diff * diff)) - var_avg


def publication_error(epsilon_pub: float, cohort_n: int, d: int) -> float:
    if cohort_n < 1:
        raise EmptyCohort("publication error needs a non-empty cohort")
    return avg_variance(epsilon_pub, cohort_n, d)


def choose_strategy(dis: float, err: float) -> Strategy:
    # strict: ties approximate
    if dis > err and not math.isnan(dis):
        return Strategy.PUBLISH
    return Strategy.APPROXIMATE
