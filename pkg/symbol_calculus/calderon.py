"""
Principal-symbol Calderón projectors, the Dirichlet-to-Neumann symbol and
orthogonalization.

Boundary data are ordered (v, D_t v, …, D_t^{m−1} v)(0) with D_t = (1/i)∂_t
and the interior on the side t > 0. Conversion to ∂_ν data happens only in
`dn_symbol`.
"""
from typing import Optional, Tuple

import numpy as np

from linalg_core.errors import GraphConditionFailed, NotInvertible
from linalg_core.factorizations import inverse
from linalg_core.matrix_sign import upper_half_plane_projector
from linalg_core.riesz import ContourSpec, GAP_SAMPLES, cauchy_radius, half_plane_projectors, riesz_projector
from linalg_core.subspaces import gram_adjoint
from linalg_core.types import Projector, as_complex_matrix
from symbol_calculus.companion import companion_matrix
from symbol_calculus.symbols import Covector, PolyMatrixSymbol
from utils.settings import RANK_TOL

# ===== CONFIG =====
ORIENTATIONS = {"outward": -1, "inward": 1}


def symbol_gap(sym: PolyMatrixSymbol, xi_prime: Covector, radius: float,
               samples: int = GAP_SAMPLES) -> float:
    """
    Lower estimate of the distance of the companion spectrum to the real axis:
    ½ · min_τ σ_min(σ(τ, ξ′)) / B over `samples` real τ ∈ [−R, R], where
    B = Σ_k k‖a_k(ξ′)‖ R^{k−1} bounds |∂_τ σ| on the box.
    """
    principal = sym.principal_part()
    coeffs = principal.tau_coefficients(xi_prime)
    bound = sum(k * np.linalg.norm(a, 2) * radius ** (k - 1) for k, a in enumerate(coeffs) if k)
    tangential = xi_prime.tangential_array()
    smallest = np.inf
    for tau in np.linspace(-radius, radius, samples):
        values = np.concatenate([[tau], tangential])
        smallest = min(smallest, np.linalg.svd(principal.evaluate(values), compute_uv=False)[-1])
    return 0.5 * float(smallest) / max(bound, 1e-300)


def _split(sym: PolyMatrixSymbol, xi_prime: Covector) -> Tuple[Projector, Projector]:
    a = companion_matrix(sym, xi_prime, principal=True)
    gap = symbol_gap(sym, xi_prime, cauchy_radius(a))
    return half_plane_projectors(a, gap)


def calderon_symbol(sym: PolyMatrixSymbol, xi_prime: Covector) -> Projector:
    """
    Riesz projector of the principal companion for the open upper half-plane:
    its range is the boundary data of solutions decaying as t → +∞.
    """
    c_up, _ = _split(sym, xi_prime)
    c_up.label = "calderon_symbol"
    return c_up


def complementary_symbol(sym: PolyMatrixSymbol, xi_prime: Covector) -> Projector:
    """Lower half-plane projector; C⁺ + C⁻ = I."""
    _, c_lo = _split(sym, xi_prime)
    c_lo.label = "complementary_symbol"
    return c_lo


def sign_projector(sym: PolyMatrixSymbol, xi_prime: Covector) -> Projector:
    """Same projector as calderon_symbol, from the matrix sign function of −iA."""
    return upper_half_plane_projector(companion_matrix(sym, xi_prime, principal=True))


def single_root_eigenvalue(a: np.ndarray, center: complex, radius: float) -> complex:
    """Eigenvalue enclosed by a small circle, read off as tr(A C) / tr(C) of its Riesz projector."""
    c = riesz_projector(a, ContourSpec.circle(center, radius)).matrix
    return complex(np.trace(a @ c) / np.trace(c))


def dn_symbol(sym: PolyMatrixSymbol, xi_prime: Covector, normal_orientation: str = "outward") -> complex:
    """
    Principal symbol of the Dirichlet-to-Neumann map for m = 2, N = 1.

    The range of the Calderón projector is span{(1, λ)}: decaying solutions
    satisfy D_t v = λ v at t = 0, so ∂_t v = iλ v and ∂_ν = ∓∂_t gives
    DN = ∓ iλ (outward normal points to t < 0).
    """
    if sym.order != 2 or sym.system_size != 1:
        raise ValueError("dn_symbol needs a scalar second-order symbol")
    if normal_orientation not in ORIENTATIONS:
        raise ValueError(f"normal_orientation must be one of {sorted(ORIENTATIONS)}")
    projector = calderon_symbol(sym, xi_prime)
    if projector.rank > 1:
        raise ValueError(f"range has dimension {projector.rank}, expected 1")
    c = projector.matrix
    column = c[:, int(np.argmax(np.linalg.norm(c, axis=0)))]
    if abs(column[0]) <= 1e-12 * max(np.linalg.norm(column), 1e-300):
        raise GraphConditionFailed(float(abs(column[0])))
    lam = column[1] / column[0]
    return complex(ORIENTATIONS[normal_orientation] * 1j * lam)


def orthogonalize(c: Projector, gram: Optional[np.ndarray] = None, tol: float = RANK_TOL) -> Projector:
    """
    C_o = C (I + C − C*)⁻¹ with C* the gram-adjoint: the gram-orthogonal
    projector with the range of C.
    """
    cm = as_complex_matrix(c.matrix, "C")
    n = cm.shape[0]
    m = np.eye(n) + cm - gram_adjoint(cm, gram)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] <= tol * max(sv[0], 1.0):
        raise NotInvertible(float(sv[-1]))
    co = cm @ inverse(m)
    return Projector.certify(co, c.range_basis, label="orthogonalized")
