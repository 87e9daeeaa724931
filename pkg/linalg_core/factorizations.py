"""
Dense LU solves with an explicit pivot test.
"""
import numpy as np
import scipy.linalg as sla

from linalg_core.errors import SingularMatrix
from linalg_core.types import as_complex_matrix

# ===== CONFIG =====
PIVOT_TOL = 1e-13


def lu_solve(a, b, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """
    Solves A X = B by partial-pivot LU.

    Raises SingularMatrix when |U_ii| < pivot_tol · max|A_ij| for some i.
    """
    a = as_complex_matrix(a, "A")
    b_arr = np.asarray(b, dtype=complex)
    vector_rhs = b_arr.ndim == 1
    b_mat = as_complex_matrix(b_arr, "B")
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"A must be square, got {a.shape}")
    if b_mat.shape[0] != n:
        raise ValueError(f"B has {b_mat.shape[0]} rows, expected {n}")
    if n == 0:
        return b_arr.copy()

    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        raise SingularMatrix(0, 0.0)

    lu, piv = sla.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    small = np.flatnonzero(pivots < pivot_tol * scale)
    if small.size:
        k = int(small[0])
        raise SingularMatrix(k, float(pivots[k]))

    x = sla.lu_solve((lu, piv), b_mat, check_finite=False)
    return x[:, 0] if vector_rhs else x


def inverse(a, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    a = as_complex_matrix(a, "A")
    return lu_solve(a, np.eye(a.shape[0], dtype=complex), pivot_tol)
