"""Generalized randomized response: perturbation, estimation and variance."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EmptyCohort, IndexOutOfRange, InvalidBudget, InvalidFrequency, InvalidParams, LengthMismatch


@dataclass(frozen=True)
class Domain:
    """Ordered categorical domain; index ``k`` stands for ``labels[k]``."""

    labels: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) < 2:
            raise InvalidParams("a domain needs at least 2 values")
        if len(set(labels)) != len(labels):
            raise InvalidParams("domain labels must be unique")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def of_size(cls, d: int) -> "Domain":
        return cls(tuple(range(d)))

    @property
    def d(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self._index[label]

    def label(self, index: int):
        return self.labels[index]


def _check_budget(epsilon: float) -> None:
    if not (epsilon > 0) or math.isinf(epsilon):
        raise InvalidBudget(f"privacy budget must be positive and finite, got {epsilon!r}")


@dataclass(frozen=True)
class GrrParams:
    epsilon: float
    d: int
    p: float
    q: float

    @classmethod
    def make(cls, epsilon: float, d: int) -> "GrrParams":
        _check_budget(epsilon)
        if d < 2:
            raise InvalidParams("GRR needs d >= 2")
        if epsilon < 700:
            e = math.exp(epsilon)
            p, q = e / (e + d - 1), 1.0 / (e + d - 1)
        else:  # exp overflows; the mechanism is effectively the identity
            p, q = 1.0, 0.0
        return cls(epsilon=float(epsilon), d=int(d), p=p, q=q)


def grr_perturb(true_index: int, params: GrrParams, rng: np.random.Generator) -> int:
    """Randomize one value: keep it w.p. ``p``, else move to a uniform other index."""
    if not 0 <= true_index < params.d:
        raise IndexOutOfRange(f"index {true_index} outside [0, {params.d})")
    u = np.array([rng.random()])
    v = np.array([true_index], dtype=np.int64)
    return int(kernels.grr_perturb_values(v, u, params.p, params.q, params.d)[0])


def _as_kernel_input(values: np.ndarray) -> np.ndarray:
    values = np.ascontiguousarray(values)
    if values.dtype not in (np.uint8, np.int16, np.int32, np.int64):
        values = values.astype(np.int64)
    return values


def grr_perturb_many(values: np.ndarray, params: GrrParams, rng: np.random.Generator) -> np.ndarray:
    """Vector form of :func:`grr_perturb`; one uniform draw per report."""
    values = _as_kernel_input(values)
    u = rng.random(values.shape[0])
    return kernels.grr_perturb_values(values, u, params.p, params.q, params.d)


def grr_perturb_counts(values: np.ndarray, params: GrrParams, rng: np.random.Generator) -> np.ndarray:
    """Perturb every value and return the histogram of perturbed reports.

    Consumes exactly the same draws as :func:`grr_perturb_many`.
    """
    values = _as_kernel_input(values)
    u = rng.random(values.shape[0])
    return kernels.grr_perturb_counts(values, u, params.p, params.q, params.d)


def grr_estimate(perturbed_counts, n: int, params: GrrParams) -> np.ndarray:
    """Unbiased frequency estimate ``(c'/n - q) / (p - q)``; deliberately not clipped."""
    counts = np.asarray(perturbed_counts, dtype=np.float64)
    if counts.shape != (params.d,):
        raise LengthMismatch(f"expected {params.d} counts, got shape {counts.shape}")
    if n <= 0:
        raise EmptyCohort("cannot estimate frequencies from zero reports")
    return (counts / n - params.q) / (params.p - params.q)


def _expm1_sq(epsilon: float) -> tuple[float, float]:
    em1 = math.expm1(epsilon)
    return em1, em1 * em1


def grr_variance(epsilon: float, n: int, d: int, f_k: float) -> float:
    """Variance of one cell's GRR estimate with true frequency ``f_k``."""
    _check_budget(epsilon)
    if not 0.0 <= f_k <= 1.0:
        raise InvalidFrequency(f"frequency must lie in [0, 1], got {f_k!r}")
    if n < 1:
        raise EmptyCohort("variance needs n >= 1")
    em1, em1_sq = _expm1_sq(epsilon)
    if em1_sq == 0.0:
        return math.inf
    return (d - 2 + math.exp(epsilon)) / (n * em1_sq) + f_k * (d - 2) / (n * em1)


def avg_variance(epsilon: float, n: int, d: int) -> float:
    """Cell-averaged GRR variance ``V(eps, n)``; exact because frequencies sum to 1."""
    _check_budget(epsilon)
    if n < 1:
        raise EmptyCohort("variance needs n >= 1")
    em1, em1_sq = _expm1_sq(epsilon)
    if em1_sq == 0.0:
        return math.inf
    return (d - 2 + math.exp(epsilon)) / (n * em1_sq) + (d - 2) / (d * n * em1)
