"""
Seeded fibre ODEs for the unique-continuation suite.
"""
import numpy as np

from normal_family.model import FibreODE

# ===== CONFIG =====
MAX_SYSTEM_SIZE = 2
TAU_RANGE = (-2.0, 2.0)


def random_fibre_ode(rng: np.random.Generator, system_size: int = 0) -> FibreODE:
    """
    Second-order system on [0, 1] with leading coefficient I + 0.1·z·G and
    complex affine lower-order terms. system_size = 0 draws it as well.
    """
    n = system_size or int(rng.integers(1, MAX_SYSTEM_SIZE + 1))
    coeffs = np.zeros((3, 2, n, n), dtype=complex)
    coeffs[2, 0] = np.eye(n)
    coeffs[2, 1] = 0.1 * rng.standard_normal((n, n))
    coeffs[1] = 0.3 * (rng.standard_normal((2, n, n)) + 1j * rng.standard_normal((2, n, n)))
    coeffs[0] = rng.standard_normal((2, n, n)) + 1j * rng.standard_normal((2, n, n))
    return FibreODE(2, n, (0.0, 1.0), coeffs, (float(rng.uniform(*TAU_RANGE)), ()))
