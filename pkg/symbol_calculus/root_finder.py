"""
Independent scalar oracle: polynomial roots by Aberth–Ehrlich simultaneous
iteration, and the Calderón projector built from root vectors.
"""
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from linalg_core.subspaces import projector_from_pair
from linalg_core.types import Projector, SubspaceBasis
from symbol_calculus.symbols import Covector, PolyMatrixSymbol

# ===== CONFIG =====
ABERTH_MAX_ITER = 500
ABERTH_TOL = 1e-15


def polynomial_roots(coeffs, max_iter: int = ABERTH_MAX_ITER, tol: float = ABERTH_TOL) -> np.ndarray:
    """Roots of Σ c_k x^k (coefficients in ascending order, c_m ≠ 0)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    m = len(c) - 1
    if m < 1:
        return np.zeros(0, dtype=complex)
    dc = P.polyder(c)
    radius = 1.0 + float(np.max(np.abs(c[:-1] / c[-1])))
    z = radius * np.exp(1j * (2.0 * np.pi * np.arange(m) / m + 0.4))

    for _ in range(max_iter):
        p_val = P.polyval(z, c)
        dp_val = P.polyval(z, dc)
        ratio = p_val / np.where(dp_val == 0, 1.0, dp_val)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        repulsion = np.sum(1.0 / diff, axis=1) - 1.0
        step = ratio / (1.0 - ratio * repulsion)
        z = z - step
        if np.max(np.abs(step) / (1.0 + np.abs(z))) <= tol:
            break
    return z


def scalar_tau_polynomial(sym: PolyMatrixSymbol, xi_prime: Covector, principal: bool = True) -> np.ndarray:
    if sym.system_size != 1:
        raise ValueError("root oracle needs a scalar symbol (N = 1)")
    source = sym.principal_part() if principal else sym
    return np.array([a[0, 0] for a in source.tau_coefficients(xi_prime)])


def root_vectors(roots: np.ndarray, order: int) -> np.ndarray:
    """Columns (1, λ, …, λ^{m−1}) for each root λ."""
    return np.vander(roots, order, increasing=True).T


def projector_from_roots(sym: PolyMatrixSymbol, xi_prime: Covector) -> Tuple[Projector, np.ndarray]:
    """Calderón projector of a scalar symbol from root vectors split by the sign of Im λ."""
    roots = polynomial_roots(scalar_tau_polynomial(sym, xi_prime))
    vecs = root_vectors(roots, sym.order)
    upper = vecs[:, roots.imag > 0]
    lower = vecs[:, roots.imag < 0]
    range_space = SubspaceBasis(upper) if upper.shape[1] else SubspaceBasis.zero(sym.order)
    kernel_space = SubspaceBasis(lower) if lower.shape[1] else SubspaceBasis.zero(sym.order)
    return projector_from_pair(range_space, kernel_space), roots
