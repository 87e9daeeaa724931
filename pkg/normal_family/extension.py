"""
Doubling of the fibre across both endpoints and the nonnegative bump
potential on the added (minus) side.

Both realizations describe a circle of length 2L carrying the operator
reflected through the endpoints: "circle" parametrizes the minus side as
[L, 2L] (2L ∼ 0), "mirror" as [−L, 0] (−L ∼ L).
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from normal_family.model import FibreODE, reflect_coefficients

# ===== CONFIG =====
DEFAULT_BUMP_HEIGHT = 1.0
EXTENSION_KINDS = ("circle", "mirror")


@dataclass(frozen=True)
class FibreExtension:
    kind: str = "circle"
    bump_height: float = DEFAULT_BUMP_HEIGHT

    def __post_init__(self):
        if self.kind not in EXTENSION_KINDS:
            raise ValueError(f"extension kind must be one of {EXTENSION_KINDS}")
        if self.bump_height < 0:
            raise ValueError("bump height must be nonnegative")

    def minus_interval(self, interval: Tuple[float, float]) -> Tuple[float, float]:
        a, b = interval
        if self.kind == "circle":
            return b, 2 * b - a
        return 2 * a - b, a

    def reflection_center(self, interval: Tuple[float, float]) -> float:
        a, b = interval
        return 2 * b if self.kind == "circle" else 2 * a

    def bump(self, z: float, interval: Tuple[float, float]) -> float:
        """h·exp(−1/(1−w²)) with w the affine coordinate of the minus side mapped to (−1, 1)."""
        lo, hi = self.minus_interval(interval)
        w = (z - 0.5 * (lo + hi)) / (0.5 * (hi - lo))
        if abs(w) >= 1.0 or self.bump_height == 0.0:
            return 0.0
        return float(self.bump_height * np.exp(-1.0 / (1.0 - w * w)))

    def minus_ode(self, ode: FibreODE) -> FibreODE:
        """The reflected operator plus a(z)·I on the minus side."""
        interval = ode.interval
        n = ode.system_size
        coeffs = reflect_coefficients(ode.coefficients, self.reflection_center(interval))
        eye = np.eye(n, dtype=complex)

        def potential(z: float) -> np.ndarray:
            return self.bump(z, interval) * eye
        return FibreODE(ode.order, n, self.minus_interval(interval), coeffs, ode.mu, potential)

    def minus_data(self, start_jets: np.ndarray, end_jets: np.ndarray) -> np.ndarray:
        """
        Reorders minus-side jets to (data at original start; data at original
        end). In both realizations the far end of the minus side is identified
        with the original start.
        """
        return np.vstack([end_jets, start_jets])
