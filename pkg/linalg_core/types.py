"""
Matrix containers: complex matrices, subspace bases and certified projectors.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from linalg_core.errors import NotIdempotent, RankDeficient
from utils.settings import RANK_TOL


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Complex 2-D copy of `a`; rejects NaN/Inf."""
    m = np.array(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def fro(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro")) if a.size else 0.0


def idempotence_defect(c: np.ndarray) -> float:
    """‖C² − C‖_F relative to max(‖C‖_F, 1)."""
    return fro(c @ c - c) / max(fro(c), 1.0)


def numerical_rank(a: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rank_tol * sv[0]))


@dataclass
class SubspaceBasis:
    """
    Column basis of a subspace of C^ambient_dim. The zero subspace is an
    (ambient_dim × 0) basis.
    """
    basis: np.ndarray
    rank_tol: float = RANK_TOL
    ambient_dim: int = field(init=False)

    def __post_init__(self):
        if np.size(self.basis) == 0:
            n = np.shape(self.basis)[0] if np.ndim(self.basis) else 0
            self.basis = np.zeros((n, 0), dtype=complex)
        else:
            self.basis = as_complex_matrix(self.basis, "basis")
        self.ambient_dim = self.basis.shape[0]
        if self.rank_tol < 0:
            raise ValueError("rank_tol must be nonnegative")
        if self.dim:
            sv = np.linalg.svd(self.basis, compute_uv=False)
            if not sv[-1] > self.rank_tol * sv[0]:
                raise RankDeficient(numerical_rank(self.basis, self.rank_tol), self.dim)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def span(cls, columns, rank_tol: float = RANK_TOL, ambient_dim: Optional[int] = None) -> "SubspaceBasis":
        """Orthonormal basis of the column span, dropping numerically dependent columns."""
        cols = np.array(columns, dtype=complex)
        if cols.ndim == 1:
            cols = cols.reshape(-1, 1)
        n = ambient_dim if ambient_dim is not None else cols.shape[0]
        if cols.size == 0:
            return cls(np.zeros((n, 0), dtype=complex), rank_tol)
        u, sv, _ = np.linalg.svd(cols, full_matrices=False)
        r = int(np.sum(sv > rank_tol * sv[0])) if sv.size and sv[0] > 0 else 0
        return cls(u[:, :r], rank_tol)

    @classmethod
    def zero(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(np.zeros((ambient_dim, 0), dtype=complex))

    def orthonormal(self) -> np.ndarray:
        if not self.dim:
            return self.basis
        q, _ = np.linalg.qr(self.basis)
        return q

    def complement(self, gram: Optional[np.ndarray] = None) -> "SubspaceBasis":
        """Gram-orthogonal complement."""
        g = np.eye(self.ambient_dim) if gram is None else gram
        if not self.dim:
            return SubspaceBasis(np.eye(self.ambient_dim, dtype=complex), self.rank_tol)
        comp = sla.null_space(self.basis.conj().T @ g, rcond=self.rank_tol)
        return SubspaceBasis(comp, self.rank_tol)


@dataclass
class Projector:
    """Square matrix with its idempotence defect and, when known, declared range/kernel."""
    matrix: np.ndarray
    idem_defect: float
    range_basis: Optional[SubspaceBasis] = None
    kernel_basis: Optional[SubspaceBasis] = None
    label: str = ""

    @classmethod
    def certify(cls, matrix, range_basis: Optional[SubspaceBasis] = None,
                kernel_basis: Optional[SubspaceBasis] = None, label: str = "",
                tol: Optional[float] = None) -> "Projector":
        """
        Wraps `matrix` with its measured idempotence defect. With `tol` set,
        a defect above it raises NotIdempotent.
        """
        m = as_complex_matrix(matrix, "projector")
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"projector must be square, got {m.shape}")
        defect = idempotence_defect(m)
        if tol is not None and defect > tol:
            raise NotIdempotent(defect, tol)
        return cls(m, defect, range_basis, kernel_basis, label)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return numerical_rank(self.matrix)

    def range_space(self) -> SubspaceBasis:
        if self.range_basis is not None:
            return self.range_basis
        return SubspaceBasis.span(self.matrix)

    def apply(self, data: np.ndarray) -> np.ndarray:
        return self.matrix @ data
