import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running discrete probes")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
