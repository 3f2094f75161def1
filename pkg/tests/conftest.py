import itertools

import numpy as np
import pytest

from ldpids.fo import Domain
from ldpids.mechanisms import make_mechanism
from ldpids.runner import simulate
from ldpids.stream import MechanismConfig, Strategy, Stream


def constant_stream(T, N, d=2, value=0):
    return Stream(np.full((T, N), value, dtype=np.int64), Domain.of_size(d))


def random_stream(T, N, d, seed=0):
    rng = np.random.default_rng(seed)
    return Stream(rng.integers(0, d, (T, N)), Domain.of_size(d))


def scripted(decisions):
    """Decision hook replaying a fixed publish(True)/approximate(False) script, then approximating."""
    it = iter(decisions)

    def decide(dis, err):
        return Strategy.PUBLISH if next(it, False) else Strategy.APPROXIMATE

    return decide


def run_scripted(name, decisions, *, T, N, w, epsilon=1.0, d=2, seed=0, stream=None):
    stream = stream or random_stream(T, N, d, seed)
    mech = make_mechanism(name, MechanismConfig(epsilon, w, d, N), np.random.default_rng(seed))
    mech.decide = scripted(decisions)
    return simulate(mech, stream, keep_outcomes=True)


def all_scripts(length):
    return itertools.product((False, True), repeat=length)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
