"""Synthetic binary streams (LNS, Sin, Log) and CSV ingestion."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import EmptyFile, InvalidParams, MalformedRow, UnknownLabel
from .fo import Domain
from .seeding import DATA, substream
from .stream import Stream

DEFAULT_PARAMS = {
    "LNS": {"p0": 0.05, "sqrt_q": 0.0025},
    "SIN": {"A": 0.05, "b": 0.01, "h": 0.075},
    "LOG": {"A": 0.25, "b": 0.01},
}


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    T: int
    N: int
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in DEFAULT_PARAMS:
            raise InvalidParams(f"unknown generator {self.kind!r}; choose LNS, Sin or Log")
        if self.T < 1 or self.N < 1:
            raise InvalidParams("T and N must be >= 1")
        unknown = set(self.params) - set(DEFAULT_PARAMS[kind])
        if unknown:
            raise InvalidParams(f"unknown {kind} parameters: {sorted(unknown)}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", {**DEFAULT_PARAMS[kind], **self.params})


def gen_probability_sequence(spec: GeneratorSpec) -> np.ndarray:
    """``p_1..p_T`` for the requested model, clamped to [0, 1]."""
    P = spec.params
    t = np.arange(1, spec.T + 1, dtype=np.float64)
    if spec.kind == "LNS":
        if P["sqrt_q"] < 0:
            raise InvalidParams("sqrt_q must be >= 0")
        steps = substream(spec.seed, DATA, 0).normal(0.0, P["sqrt_q"], spec.T)
        out = np.empty(spec.T)
        p = P["p0"]
        for i, s in enumerate(steps):
            p = min(1.0, max(0.0, p + s))
            out[i] = p
        return out
    if spec.kind == "SIN":
        seq = P["A"] * np.sin(P["b"] * t) + P["h"]
    else:
        seq = P["A"] / (1.0 + np.exp(-P["b"] * t))
    return np.clip(seq, 0.0, 1.0)


def gen_binary_streams(p_sequence, N: int, seed: int = 0) -> Stream:
    """Exactly ``round(p_t * N)`` users hold value 1 at each ``t``; the set is redrawn per ``t``."""
    p_sequence = np.asarray(p_sequence, dtype=np.float64)
    if np.any((p_sequence < 0) | (p_sequence > 1)):
        raise InvalidParams("probabilities must lie in [0, 1]")
    rng = substream(seed, DATA, 1)
    values = np.zeros((p_sequence.shape[0], N), dtype=np.uint8)
    for i, p in enumerate(p_sequence):
        k = int(round(p * N))
        if k:
            values[i, rng.choice(N, size=k, replace=False)] = 1
    return Stream(values, Domain((0, 1)))


def generate(spec: GeneratorSpec) -> Stream:
    return gen_binary_streams(gen_probability_sequence(spec), spec.N, spec.seed)


def load_stream_csv(path: Union[str, Path], labels: Union[int, Sequence]) -> Stream:
    """Read ``user_id,timestamp,value`` rows into dense per-user streams.

    ``labels`` is the declared domain (or its size ``d``, meaning labels ``"0".."d-1"``).
    Time runs from the smallest to the largest timestamp seen. A user's gaps are
    forward-filled; users with no record at the first timestamp are dropped.
    Users are ordered by id.
    """
    if isinstance(labels, int):
        labels = [str(i) for i in range(labels)]
    domain = Domain(tuple(str(x) for x in labels))
    records: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyFile(f"{path}: empty file")
        if [h.strip() for h in header] != ["user_id", "timestamp", "value"]:
            raise MalformedRow(f"{path}: header must be user_id,timestamp,value, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise MalformedRow(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            user, ts, value = (x.strip() for x in row)
            try:
                t = int(ts)
            except ValueError:
                raise MalformedRow(f"{path}:{lineno}: timestamp {ts!r} is not an integer") from None
            if t < 1:
                raise MalformedRow(f"{path}:{lineno}: timestamps must be positive")
            try:
                v = domain.index(value)
            except KeyError:
                raise UnknownLabel(f"{path}:{lineno}: label {value!r} not in declared domain") from None
            per_user = records.setdefault(user, {})
            if t in per_user:
                raise MalformedRow(f"{path}:{lineno}: duplicate record for user {user!r} at t={t}")
            per_user[t] = v
    if not records:
        raise EmptyFile(f"{path}: no data rows")
    t0 = min(min(r) for r in records.values())
    t1 = max(max(r) for r in records.values())
    users = sorted(u for u, r in records.items() if t0 in r)
    if not users:
        raise EmptyFile(f"{path}: no user has a value at the first timestamp")
    T = t1 - t0 + 1
    values = np.empty((T, len(users)), dtype=np.int64)
    for j, u in enumerate(users):
        r = records[u]
        last = r[t0]
        for i in range(T):
            last = r.get(t0 + i, last)
            values[i, j] = last
    dtype = np.uint8 if domain.d <= 255 else np.int32
    return Stream(values.astype(dtype), domain, tuple(users))
