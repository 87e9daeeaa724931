"""
One-sided traces of grid functions: jets at a boundary line by polynomial
extrapolation from one side, with a stability report that flags a
non-smooth approach to the line.
"""
from dataclasses import dataclass
from math import factorial
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from linalg_core.errors import TraceUnstable

# ===== CONFIG =====
TRACE_TOL = 1e-3


@dataclass
class TraceResult:
    jets: np.ndarray
    report: float


def _fit(t: np.ndarray, values: np.ndarray, degree: int) -> np.ndarray:
    vander = P.polyvander(t[: degree + 1], degree)
    return np.linalg.solve(vander, values[: degree + 1])


def one_sided_trace(values: np.ndarray, h: float, m: int = 2, p: Optional[int] = None, skip: int = 1,
                    sign: float = 1.0, tol: Optional[float] = TRACE_TOL) -> TraceResult:
    """
    Jet (v, D_ρ v, …, D_ρ^{m−1} v) at ρ = 0 from samples values[r] at
    ρ = (skip + r)·h, r = 0..p+1. Trailing axes are carried along.

    The degree-p interpolant through the first p+1 samples gives the jet;
    the report compares it with the degree-(p+1) interpolant, each
    coefficient scaled by h^l and the whole by the largest sample. `sign`
    converts D_ρ into the derivative along the global coordinate
    (∂ = sign·∂_ρ). TraceUnstable when report > tol (tol=None: never).
    """
    p = m + 1 if p is None else p
    if p < m - 1:
        raise ValueError("extrapolation degree must reach the jet order")
    values = np.asarray(values, dtype=complex)
    if values.shape[0] < p + 2:
        raise ValueError(f"degree {p} with its check needs {p + 2} samples, got {values.shape[0]}")
    trailing = values.shape[1:]
    flat = values[: p + 2].reshape(p + 2, -1)
    t = skip + np.arange(p + 2, dtype=float)

    low = _fit(t, flat, p)[:m]
    high = _fit(t, flat, p + 1)[:m]
    scale = np.array([factorial(l) for l in range(m)], dtype=float)[:, None]
    magnitude = float(np.max(np.abs(flat))) if flat.size else 0.0
    report = float(np.max(np.abs(low - high) * scale)) / magnitude if magnitude > 0 else 0.0

    to_jet = np.array([factorial(l) * (-1j * sign / h) ** l for l in range(m)])[:, None]
    jets = (to_jet * low).reshape((m,) + trailing)
    if tol is not None and report > tol:
        raise TraceUnstable(report, tol)
    return TraceResult(jets, report)
