"""
Subspace algebra: projectors from complementary pairs, direct-sum tests,
gram-orthogonal projectors and distances.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from linalg_core.errors import GramNotPD, NotComplementary
from linalg_core.factorizations import inverse
from linalg_core.types import Projector, SubspaceBasis, as_complex_matrix, fro
from utils.settings import RANK_TOL


@dataclass
class DirectSumReport:
    is_direct_sum: bool
    gap: float


def _orthonormal_columns(u: SubspaceBasis) -> np.ndarray:
    return u.orthonormal()


def direct_sum_check(u: SubspaceBasis, v: SubspaceBasis, tol: float = RANK_TOL) -> DirectSumReport:
    """
    gap = smallest singular value of [orth(U) | orth(V)]. Dimensions that do
    not add up to the ambient dimension never form a direct sum.
    """
    if u.ambient_dim != v.ambient_dim:
        raise ValueError(f"ambient dims differ: {u.ambient_dim} vs {v.ambient_dim}")
    n = u.ambient_dim
    k = u.dim + v.dim
    if k == 0:
        return DirectSumReport(n == 0, 1.0 if n == 0 else 0.0)
    stacked = np.hstack([_orthonormal_columns(u), _orthonormal_columns(v)])
    sv = np.linalg.svd(stacked, compute_uv=False)
    gap = float(sv[-1]) if k <= n else 0.0
    return DirectSumReport(k == n and gap > tol, gap)


def projector_from_pair(range_space: SubspaceBasis, kernel_space: SubspaceBasis,
                        tol: float = RANK_TOL, mu=None) -> Projector:
    """C = [R | K] · diag(I, 0) · [R | K]⁻¹."""
    report = direct_sum_check(range_space, kernel_space, tol)
    if not report.is_direct_sum:
        raise NotComplementary(report.gap, mu)
    r = range_space.orthonormal()
    k = kernel_space.orthonormal()
    m = np.hstack([r, k])
    m_inv = inverse(m)
    c = r @ m_inv[: range_space.dim, :]
    return Projector.certify(c, range_space, kernel_space, label="pair")


def gram_check(gram) -> np.ndarray:
    g = as_complex_matrix(gram, "gram")
    if g.shape[0] != g.shape[1]:
        raise GramNotPD(f"gram must be square, got {g.shape}")
    if fro(g - g.conj().T) > 1e-12 * max(fro(g), 1.0):
        raise GramNotPD("gram is not Hermitian")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise GramNotPD("gram is not positive definite")
    return g


def orth_projector(u: SubspaceBasis, gram: Optional[np.ndarray] = None) -> Projector:
    """Gram-orthogonal projector C = U (U* G U)⁻¹ U* G onto span(U)."""
    n = u.ambient_dim
    g = np.eye(n, dtype=complex) if gram is None else gram_check(gram)
    if g.shape[0] != n:
        raise ValueError(f"gram is {g.shape[0]}-dimensional, subspace lives in C^{n}")
    if not u.dim:
        return Projector.certify(np.zeros((n, n), dtype=complex), u, label="orth")
    b = u.basis
    small = b.conj().T @ g @ b
    c = b @ inverse(small) @ (b.conj().T @ g)
    return Projector.certify(c, u, label="orth")


def gram_adjoint(a: np.ndarray, gram: Optional[np.ndarray] = None) -> np.ndarray:
    """A* with respect to ⟨x, y⟩ = y^H G x, i.e. G⁻¹ A^H G."""
    if gram is None:
        return a.conj().T
    return inverse(gram) @ a.conj().T @ gram


def subspace_distance(u: SubspaceBasis, v: SubspaceBasis) -> float:
    """Spectral distance between the Euclidean orthogonal projectors; 1 when dims differ."""
    if u.ambient_dim != v.ambient_dim:
        raise ValueError("ambient dims differ")
    if u.dim != v.dim:
        return 1.0
    if u.dim == 0:
        return 0.0
    pu = _orthonormal_columns(u)
    pv = _orthonormal_columns(v)
    return float(np.linalg.norm(pu @ pu.conj().T - pv @ pv.conj().T, 2))


def null_space(a: np.ndarray, rank_tol: float = RANK_TOL) -> SubspaceBasis:
    a = np.asarray(a, dtype=complex)
    if a.shape[0] == 0 or not np.any(a):
        return SubspaceBasis(np.eye(a.shape[1], dtype=complex), rank_tol)
    return SubspaceBasis(sla.null_space(a, rcond=rank_tol), rank_tol)


def intersection(u: SubspaceBasis, v: SubspaceBasis, rank_tol: float = RANK_TOL) -> SubspaceBasis:
    if not u.dim or not v.dim:
        return SubspaceBasis.zero(u.ambient_dim)
    pu = _orthonormal_columns(u)
    pv = _orthonormal_columns(v)
    coeffs = null_space(np.hstack([pu, -pv]), rank_tol)
    if not coeffs.dim:
        return SubspaceBasis.zero(u.ambient_dim)
    return SubspaceBasis.span(pu @ coeffs.basis[: u.dim, :], rank_tol, u.ambient_dim)
