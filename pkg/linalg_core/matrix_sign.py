"""
Matrix sign function by the scaled Newton iteration
X ← ½(μX + (μX)⁻¹), μ = |det X|^(−1/n).
"""
import numpy as np

from linalg_core.errors import ContourTooClose
from linalg_core.factorizations import inverse
from linalg_core.types import Projector, as_complex_matrix, fro

# ===== CONFIG =====
SIGN_TOL = 1e-13
SIGN_MAX_ITER = 100


def matrix_sign(a, tol: float = SIGN_TOL, max_iter: int = SIGN_MAX_ITER) -> np.ndarray:
    """sign(A) for A without purely imaginary eigenvalues."""
    x = as_complex_matrix(a, "A")
    n = x.shape[0]
    last_change = np.inf
    for _ in range(max_iter):
        _, logdet = np.linalg.slogdet(x)
        mu = float(np.exp(-logdet / n)) if np.isfinite(logdet) else 1.0
        x_next = 0.5 * (mu * x + inverse(mu * x))
        scale = max(fro(x_next), 1.0)
        change = fro(x_next - x)
        if change <= tol * scale:
            return x_next
        # rounding floor reached
        if change <= 1e-8 * scale and change >= last_change:
            return x_next
        last_change = change
        x = x_next
    raise ContourTooClose(fro(x @ x - np.eye(n)), max_iter)


def upper_half_plane_projector(a) -> Projector:
    """
    Spectral projector of A onto eigenvalues with Im λ > 0:
    (I + sign(−iA)) / 2, since −iλ has positive real part exactly when Im λ > 0.
    """
    a = as_complex_matrix(a, "A")
    s = matrix_sign(-1j * a)
    return Projector.certify(0.5 * (np.eye(a.shape[0]) + s), label="sign")
