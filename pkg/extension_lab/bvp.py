"""
Finite-dimensional boundary problems (T, γ) and the augmentation
T̄ = [[0, T*], [T, 0]].

"Support" is a coordinate mask: plus_mask[i] is True when coordinate i
lies on the original side, False on the added (minus) side.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from linalg_core.errors import RankDeficient
from linalg_core.subspaces import gram_check, null_space, orth_projector, projector_from_pair
from linalg_core.types import Projector, SubspaceBasis, as_complex_matrix, fro, numerical_rank
from utils.settings import RANK_TOL

# ===== CONFIG =====
RESTRICT_TOL = 1e-12


@dataclass
class AbstractBVP:
    T: np.ndarray
    gamma: np.ndarray
    gram: Optional[np.ndarray] = None
    plus_mask: Optional[np.ndarray] = None
    n: int = field(init=False)

    def __post_init__(self):
        self.T = as_complex_matrix(self.T, "T")
        self.n = self.T.shape[1]
        gamma = np.asarray(self.gamma, dtype=complex)
        self.gamma = gamma.reshape(0, self.n) if gamma.size == 0 else as_complex_matrix(gamma, "gamma")
        if self.gamma.shape[1] != self.n:
            raise ValueError(f"gamma acts on C^{self.gamma.shape[1]}, T on C^{self.n}")
        d = self.gamma.shape[0]
        if d and numerical_rank(self.gamma) < d:
            raise RankDeficient(numerical_rank(self.gamma), d)
        self.gram = np.eye(self.n, dtype=complex) if self.gram is None else gram_check(self.gram)
        if self.plus_mask is None:
            self.plus_mask = np.ones(self.n, dtype=bool)
        self.plus_mask = np.asarray(self.plus_mask, dtype=bool)
        if self.plus_mask.shape != (self.n,):
            raise ValueError("plus_mask must have one entry per coordinate")

    @property
    def data_dim(self) -> int:
        return self.gamma.shape[0]

    @property
    def minus_mask(self) -> np.ndarray:
        return ~self.plus_mask


def boundary_space(b: AbstractBVP) -> SubspaceBasis:
    """γ(ker T) ⊂ C^d."""
    kernel = null_space(b.T)
    if not kernel.dim or not b.data_dim:
        return SubspaceBasis.zero(b.data_dim)
    return SubspaceBasis.span(b.gamma @ kernel.basis, ambient_dim=b.data_dim)


def restrict_plus(b: AbstractBVP) -> AbstractBVP:
    """The problem seen from the plus side alone: plus block of T, plus columns of γ."""
    p = b.plus_mask
    return AbstractBVP(b.T[np.ix_(p, p)], b.gamma[:, p], b.gram[np.ix_(p, p)])


def restrict_check(op: np.ndarray, plus_mask: np.ndarray, tol: float = RESTRICT_TOL) -> bool:
    """True when the plus↔minus blocks of `op` vanish."""
    p = np.asarray(plus_mask, dtype=bool)
    scale = max(fro(op), 1.0)
    coupling = max(fro(op[np.ix_(p, ~p)]), fro(op[np.ix_(~p, p)]))
    return coupling <= tol * scale


# ----------------------------
# Augmentation
# ----------------------------

def augment(T: np.ndarray, gram: Optional[np.ndarray] = None,
            gram_target: Optional[np.ndarray] = None) -> np.ndarray:
    """
    [[0, T*], [T, 0]] on C^n ⊕ C^k for T: C^n → C^k, with T* = G_n⁻¹ T^H G_k.
    Self-adjoint for the gram diag(G_n, G_k).
    """
    t = as_complex_matrix(T, "T")
    k, n = t.shape
    g_n = np.eye(n) if gram is None else gram
    g_k = np.eye(k) if gram_target is None else gram_target
    t_star = np.linalg.solve(g_n, t.conj().T @ g_k)
    out = np.zeros((n + k, n + k), dtype=complex)
    out[:n, n:] = t_star
    out[n:, :n] = t
    return out


def augmented_bvp(b: AbstractBVP) -> AbstractBVP:
    """(T̄, γ ⊕ γ) with the doubled gram; ker T̄ = ker T ⊕ ker T*."""
    return AbstractBVP(
        augment(b.T, b.gram, b.gram),
        sla.block_diag(b.gamma, b.gamma),
        sla.block_diag(b.gram, b.gram),
        np.concatenate([b.plus_mask, b.plus_mask]),
    )


def calderon_from_augmented(b: AbstractBVP, complement: Optional[SubspaceBasis] = None) -> Projector:
    """
    C = π C̄ ι, with C̄ a projector onto the augmented boundary space: the
    orthogonal one by default, or the one along `complement`.
    """
    bar_space = boundary_space(augmented_bvp(b))
    if complement is None:
        c_bar = orth_projector(bar_space)
    else:
        c_bar = projector_from_pair(bar_space, complement)
    d = b.data_dim
    return Projector.certify(c_bar.matrix[:d, :d], label="augmented")
