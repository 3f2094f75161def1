"""The seven w-event LDP stream mechanisms and a name registry."""
import numpy as np

from ..errors import InvalidParams
from ..stream import MechanismConfig
from .budget import LBA, LBD, LBU, LSP
from .population import LPA, LPD, LPU, UserPool, pool_recycle, pool_sample, scale_estimate

MECHANISMS = {cls.name: cls for cls in (LBU, LSP, LBD, LBA, LPU, LPD, LPA)}
BUDGET_DIVISION = ("LBU", "LBD", "LBA")
POPULATION_DIVISION = ("LSP", "LPU", "LPD", "LPA")


def make_mechanism(name: str, config: MechanismConfig, rng: np.random.Generator):
    try:
        cls = MECHANISMS[name.upper()]
    except KeyError:
        raise InvalidParams(f"unknown mechanism {name!r}; choose from {sorted(MECHANISMS)}") from None
    return cls(config, rng)


__all__ = [
    "LBU", "LSP", "LBD", "LBA", "LPU", "LPD", "LPA",
    "MECHANISMS", "BUDGET_DIVISION", "POPULATION_DIVISION", "make_mechanism",
    "UserPool", "pool_sample", "pool_recycle", "scale_estimate",
]
