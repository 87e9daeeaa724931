"""
First-order reduction of the transversal ODE σ(D_t, ξ′) v = 0.
"""
from typing import List

import numpy as np

from linalg_core.errors import ZeroCovector
from linalg_core.factorizations import lu_solve
from symbol_calculus.symbols import Covector, PolyMatrixSymbol


def block_companion(coeffs: List[np.ndarray]) -> np.ndarray:
    """
    Companion of Σ_k a_k λ^k in the variables V = (v, D v, …, D^{m−1} v):
    identity blocks on the superdiagonal, last block row −a_m⁻¹(a_0, …, a_{m−1}).
    """
    m = len(coeffs) - 1
    n = coeffs[0].shape[0]
    top = np.hstack(coeffs[:m])
    last = -lu_solve(coeffs[m], top)
    a = np.zeros((m * n, m * n), dtype=complex)
    if m > 1:
        a[: (m - 1) * n, n:] = np.eye((m - 1) * n)
    a[(m - 1) * n:, :] = last
    return a


def companion_matrix(sym: PolyMatrixSymbol, xi_prime: Covector, principal: bool = False) -> np.ndarray:
    """
    (mN)×(mN) matrix A with D_t V = A V, so V(t) = exp(itA) V(0).
    `principal=True` reduces the principal part only.
    """
    if xi_prime.tangential_norm() == 0.0:
        raise ZeroCovector()
    source = sym.principal_part() if principal else sym
    return block_companion(source.tau_coefficients(xi_prime))


def homogeneity_scaling(order: int, system_size: int, lam: float) -> np.ndarray:
    """diag(1, λ, …, λ^{m−1}) ⊗ I_N."""
    return np.kron(np.diag(lam ** np.arange(order, dtype=float)), np.eye(system_size))
