"""
Turning a boundary problem into an invertible one without changing its
boundary data: the shadow modification T + Π_sh, the complement Π_comp
supported on the minus side, and the projection-perturbation lemmas
behind both.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from extension_lab.bvp import RESTRICT_TOL, AbstractBVP, boundary_space, restrict_check, restrict_plus
from linalg_core.errors import SideConditionViolated, UCPViolated
from linalg_core.subspaces import direct_sum_check, intersection, null_space, orth_projector, subspace_distance
from linalg_core.types import SubspaceBasis, fro
from utils.logger import setup_logger
from utils.settings import RANK_TOL

logger = setup_logger("ExtensionLab")

# ===== CONFIG =====
HERMITIAN_TOL = 1e-12


def _min_sv(a: np.ndarray) -> float:
    return float(np.linalg.svd(a, compute_uv=False)[-1]) if a.size else np.inf


def _orthonormal(a: np.ndarray) -> np.ndarray:
    return SubspaceBasis.span(a).orthonormal()


# ----------------------------
# Shadow modification
# ----------------------------

@dataclass
class ShadowModification:
    T_mod: np.ndarray
    Pi_sh: np.ndarray
    shadow_dim: int
    boundary_distance: float
    shadow_after: int


def shadow_space(b: AbstractBVP) -> SubspaceBasis:
    """ker T ∩ ker γ from a rank-revealing decomposition of [T; γ]."""
    return null_space(np.vstack([b.T, b.gamma]))


def modify_shadow(b: AbstractBVP) -> ShadowModification:
    """
    Π_sh = gram-orthogonal projector onto ker T ∩ ker γ and T_mod = T + Π_sh.
    Raises SideConditionViolated when rg Π_sh meets rg T.
    """
    shadow = shadow_space(b)
    pi = orth_projector(shadow, b.gram).matrix
    if shadow.dim and fro(b.T) > 0:
        shared = intersection(SubspaceBasis.span(pi, ambient_dim=b.n), SubspaceBasis.span(b.T, ambient_dim=b.n))
        if shared.dim:
            cosines = np.linalg.svd(_orthonormal(pi).conj().T @ _orthonormal(b.T), compute_uv=False)
            raise SideConditionViolated(float(cosines[0]))
    t_mod = b.T + pi
    modified = AbstractBVP(t_mod, b.gamma, b.gram, b.plus_mask)
    distance = subspace_distance(boundary_space(b), boundary_space(modified))
    after = shadow_space(modified).dim
    return ShadowModification(t_mod, pi, shadow.dim, distance, after)


# ----------------------------
# Projection perturbations
# ----------------------------

@dataclass
class Perturbation:
    matrix: np.ndarray
    min_sv: float


def perturb_real(T: np.ndarray, Pi: np.ndarray, alpha: float = 1.0) -> Perturbation:
    """T + αΠ; invertible whenever rg T ⊕ rg Π is the whole space."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    m = np.asarray(T, dtype=complex) + alpha * np.asarray(Pi, dtype=complex)
    return Perturbation(m, _min_sv(m))


def perturb_imag(T: np.ndarray, Pi: np.ndarray, alpha: float = 1.0) -> Perturbation:
    """T + iαΠ; invertible exactly when rg T + rg Π is the whole space (T self-adjoint)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    m = np.asarray(T, dtype=complex) + 1j * alpha * np.asarray(Pi, dtype=complex)
    return Perturbation(m, _min_sv(m))


# ----------------------------
# Complement on the minus side
# ----------------------------

def complement_in_minus(K: SubspaceBasis, b: AbstractBVP, chi: Optional[np.ndarray] = None,
                        tol: float = RANK_TOL) -> SubspaceBasis:
    """
    W = χ²K, certified W ⊕ K^⊥ = C^n (K^⊥ for the gram of `b`). `chi` defaults
    to the indicator of the minus side and must vanish on the plus side.
    Raises UCPViolated when a vector of K lives on the plus side only.
    """
    chi = b.minus_mask.astype(float) if chi is None else np.asarray(chi, dtype=float)
    if chi.shape != (b.n,):
        raise ValueError("chi must have one entry per coordinate")
    if np.any(chi[b.plus_mask] != 0.0):
        raise ValueError("chi must vanish on the plus side")
    if not K.dim:
        return SubspaceBasis.zero(b.n)

    k = K.orthonormal()
    # a combination of K vanishing on the minus rows is supported in plus
    sv = np.linalg.svd(k[b.minus_mask], compute_uv=False) if np.any(b.minus_mask) else np.zeros(0)
    on_minus = float(sv[-1]) if sv.size == K.dim else 0.0
    if on_minus <= tol:
        raise UCPViolated(on_minus)
    w = SubspaceBasis.span((chi ** 2)[:, None] * k, ambient_dim=b.n)
    if w.dim < K.dim:
        raise UCPViolated(0.0)
    report = direct_sum_check(w, K.complement(b.gram), tol)
    if not report.is_direct_sum:
        raise UCPViolated(report.gap)
    return w


# ----------------------------
# Assembly
# ----------------------------

@dataclass
class InvertibleExtension:
    T_final: np.ndarray
    Pi_sh: np.ndarray
    Pi_comp: np.ndarray
    min_sv: float
    boundary_distance: float
    comp_restricts_to_zero: bool


def _require_hermitian(b: AbstractBVP):
    gt = b.gram @ b.T
    if fro(gt - gt.conj().T) > HERMITIAN_TOL * max(fro(gt), 1.0):
        raise ValueError("make_invertible needs T self-adjoint for the gram")
    if not restrict_check(b.gram, b.plus_mask):
        raise ValueError("gram must not couple the plus and minus sides")


def make_invertible(b: AbstractBVP) -> InvertibleExtension:
    """
    T_final = T + Π_sh + Π_comp: Π_sh removes the plus-side shadow, Π_comp
    projects onto χ² ker(T + Π_sh) on the minus side. The plus-side problem
    and hence its boundary space are left untouched.
    """
    _require_hermitian(b)
    p = b.plus_mask
    plus = restrict_plus(b)
    shadow = modify_shadow(plus)
    pi_sh = np.zeros_like(b.T)
    pi_sh[np.ix_(p, p)] = shadow.Pi_sh
    t1 = b.T + pi_sh

    w = complement_in_minus(null_space(t1), b)
    pi_comp = orth_projector(w, b.gram).matrix
    t_final = t1 + pi_comp

    final_plus = restrict_plus(AbstractBVP(t_final, b.gamma, b.gram, b.plus_mask))
    distance = subspace_distance(boundary_space(plus), boundary_space(final_plus))
    min_sv = _min_sv(t_final)
    zero_on_plus = restrict_check(pi_comp, p) and fro(pi_comp[np.ix_(p, p)]) <= RESTRICT_TOL * max(fro(pi_comp), 1.0)
    logger.info(f"Invertible extension: shadow {shadow.shadow_dim}, complement {w.dim}, min sv {min_sv:.3e}")
    return InvertibleExtension(t_final, pi_sh, pi_comp, min_sv, distance, zero_on_plus)
