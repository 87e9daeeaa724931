"""
Solution space of a fibre ODE by checkpointed integration of the companion
system ∂_z V = i M(z) V.

Columns are re-orthonormalized at every checkpoint and the triangular
factors accumulated, so the integrator never carries exponentially scaled
columns while the returned jets still describe the canonical basis
(start jets = I).
"""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from linalg_core.errors import IntegrationFailure
from normal_family.model import FibreODE
from utils.logger import setup_logger

logger = setup_logger("Fundamental")

# ===== CONFIG =====
CHECKPOINTS = 16
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
RESIDUAL_TOL = 1e-7
RESIDUAL_SAMPLES = 3


@dataclass
class SolutionBasis:
    """
    mN solutions of the fibre ODE. `start_jets` and `end_jets` are the jet
    maps at the two interval ends; column j of both belongs to one solution.
    """
    ode: FibreODE
    start_jets: np.ndarray
    end_jets: np.ndarray
    residual: float
    segments: List[Tuple[float, float, object, np.ndarray]] = field(default_factory=list, repr=False)

    def data_matrix(self) -> np.ndarray:
        """(jet at start; jet at end), 2mN × mN."""
        return np.vstack([self.start_jets, self.end_jets])

    def jets_at(self, z: float) -> np.ndarray:
        """Jets (v, D_z v, …) of the basis solutions at z."""
        n = self.ode.size
        for a, b, sol, transform in self.segments:
            if a <= z <= b:
                return sol(z).reshape(n, n) @ transform
        raise ValueError(f"z={z} outside {self.ode.interval}")


def _rhs(ode: FibreODE):
    n = ode.size

    def f(z, y):
        return (1j * ode.companion(z) @ y.reshape(n, n)).ravel()
    return f


def _segment_residual(ode: FibreODE, sol, a: float, b: float) -> float:
    """Max relative ‖∂_z V − i M V‖ at interior points, 4th-order differences of the dense output."""
    n = ode.size
    h = 1e-3 * (b - a)
    worst = 0.0
    for z in np.linspace(a, b, RESIDUAL_SAMPLES + 2)[1:-1]:
        vals = [sol(z + k * h).reshape(n, n) for k in (-2, -1, 1, 2)]
        dv = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
        y = sol(z).reshape(n, n)
        m = ode.companion(z)
        scale = max(np.linalg.norm(y) * (1.0 + np.linalg.norm(m)), 1e-300)
        worst = max(worst, float(np.linalg.norm(dv - 1j * m @ y)) / scale)
    return worst


def fundamental_matrix(ode: FibreODE, checkpoints: int = CHECKPOINTS,
                       residual_tol: float = RESIDUAL_TOL) -> SolutionBasis:
    """
    Integrates from the start of the interval with the canonical initial data.
    Raises IntegrationFailure when the step controller gives up or a
    solution fails the substitution check.
    """
    n = ode.size
    z0, z1 = ode.interval
    knots = np.linspace(z0, z1, checkpoints + 1)
    y = np.eye(n, dtype=complex)
    accumulated = np.eye(n, dtype=complex)
    segments = []
    residual = 0.0
    f = _rhs(ode)

    for a, b in zip(knots[:-1], knots[1:]):
        sol = solve_ivp(f, (a, b), y.ravel(), method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL,
                        dense_output=True)
        if not sol.success:
            step = float(sol.t[-1] - sol.t[-2]) if len(sol.t) > 1 else 0.0
            raise IntegrationFailure(float(sol.t[-1]), step, sol.message)
        residual = max(residual, _segment_residual(ode, sol.sol, a, b))
        segments.append((a, b, sol.sol, accumulated.copy()))
        q, r = np.linalg.qr(sol.y[:, -1].reshape(n, n))
        y = q
        accumulated = r @ accumulated

    if residual > residual_tol:
        raise IntegrationFailure(z1, 0.0, f"substitution residual {residual:.3e}")
    end_jets = y @ accumulated
    return SolutionBasis(ode, np.eye(n, dtype=complex), end_jets, residual, segments)
