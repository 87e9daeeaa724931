"""
Shared plumbing of the verification suites: one row per checked instance,
as written to the suite CSVs, and the per-instance random stream.
"""
from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np


@dataclass
class SuiteRow:
    suite: str
    instance: int
    passed: bool
    defect: float
    note: str = ""

    def to_dict(self) -> Dict:
        return asdict(self)


def instance_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, index), so suites can run in any order."""
    return np.random.default_rng([seed, index])
