"""
Jump operator of a collar operator P = Σ_j A_j(ρ) D_ρ^j at ρ = 0: with H the
Heaviside function of the plus side,

    P(H u) = H P u + γ*(J γu),    γ*(V) = Σ_l D_ρ^l δ ⊗ V_l,

and the Green-identity check of J with Gaussian-damped polynomial data.
"""
from dataclasses import dataclass
from math import comb, factorial
from typing import Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import gamma as gamma_fn

from linalg_core.errors import GeometryMismatch
from normal_family.model import FibreODE, ModelOperator, Mu, as_mu, normal_operator, reflect_coefficients

# ===== CONFIG =====
COLLAR_WIDTH = 0.25
ENDPOINTS = ("start", "end")


@dataclass
class JumpOperator:
    """blocks[k, l] maps V_l to the coefficient of D_ρ^k δ; nonzero only when k + l ≤ m − 1."""
    blocks: np.ndarray

    @property
    def order(self) -> int:
        return self.blocks.shape[0]

    @property
    def system_size(self) -> int:
        return self.blocks.shape[2]

    def entry_order(self, k: int, l: int) -> int:
        """Tangential order of entry (k, l); negative means the entry vanishes."""
        return self.order - 1 - k - l

    def matrix(self) -> np.ndarray:
        m, n = self.order, self.system_size
        return self.blocks.transpose(0, 2, 1, 3).reshape(m * n, m * n)


def _point_collar_polynomials(op: ModelOperator, eta: Tuple[float, ...]) -> np.ndarray:
    """
    (−1)^k a_k(x) x^α η^α with x = 1/(1 + ρ), as ρ-Taylor polynomials of
    degree m. The collar runs from s = 1 into s > 1, where x²D_x = −D_s.
    """
    m, n = op.order, op.system_size
    out = np.zeros((m + 1, m + 1, n, n), dtype=complex)
    for (k, alpha, _), poly in op.coefficients.items():
        weight = np.prod([e ** a for e, a in zip(eta, alpha)])
        shift = int(sum(alpha))
        for (dx, _), c in poly.items():
            d = dx + shift
            if d == 0:
                out[k, 0] += (-1) ** k * weight * c
                continue
            # (1 + ρ)^(−d) = Σ_r (−1)^r C(d + r − 1, r) ρ^r
            for r in range(m + 1):
                out[k, r] += (-1) ** k * (-1) ** r * comb(d + r - 1, r) * weight * c
    return out


def collar_operator(op: ModelOperator, mu: Union[float, Mu] = 0.0, endpoint: str = "start") -> FibreODE:
    """
    The operator in the collar coordinate ρ ≥ 0 at a boundary line. Interval
    fibres: the normal operator at μ, with ρ = L − z at the end. Point
    fibres: the collar s = 1 + ρ of the BC boundary, coefficients expanded
    to degree m in ρ.
    """
    if endpoint not in ENDPOINTS:
        raise ValueError(f"endpoint must be one of {ENDPOINTS}")
    if op.fibre.dim:
        ode = normal_operator(op, mu)
        if endpoint == "start":
            return ode
        length = op.fibre.length
        return FibreODE(ode.order, ode.system_size, (0.0, length), reflect_coefficients(ode.coefficients, length),
                        ode.mu)
    if endpoint != "start":
        raise GeometryMismatch("a point fibre has a single BC boundary")
    tau_eta = as_mu(mu, op.base_dim)
    coeffs = _point_collar_polynomials(op, tau_eta[1])
    return FibreODE(op.order, op.system_size, (0.0, COLLAR_WIDTH), coeffs, tau_eta)


def jump_operator(collar: FibreODE) -> JumpOperator:
    """
    Leibniz reduction of A_j(ρ) D^{j−1−l} δ:
    J[k, l] = −i Σ_{j ≥ k+l+1} C(j−1−l, k) i^{j−1−l−k} A_j^{(j−1−l−k)}(0).
    """
    m, n = collar.order, collar.system_size
    coeffs = collar.coefficients
    deg = coeffs.shape[1]
    blocks = np.zeros((m, m, n, n), dtype=complex)
    for k in range(m):
        for l in range(m - k):
            for j in range(k + l + 1, m + 1):
                r = j - 1 - l - k
                if r >= deg:
                    continue
                blocks[k, l] += comb(j - 1 - l, k) * (1j) ** r * factorial(r) * coeffs[j, r]
    return JumpOperator(-1j * blocks)


# ----------------------------
# Green-identity oracle
# ----------------------------

def _matvec(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Product of a matrix polynomial (deg, N, N) and a vector polynomial (deg, N)."""
    out = np.zeros((a.shape[0] + v.shape[0] - 1, a.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(v.shape[0]):
            out[i + j] += a[i] @ v[j]
    return out


def _der(v: np.ndarray) -> np.ndarray:
    if v.shape[0] < 2:
        return np.zeros_like(v[:1])
    return P.polyder(v, axis=0)


def _add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((max(a.shape[0], b.shape[0]),) + a.shape[1:], dtype=complex)
    out[: a.shape[0]] += a
    out[: b.shape[0]] += b
    return out


def _gauss_der(g: np.ndarray) -> np.ndarray:
    """∂(g e^{−ρ²}) = (g′ − 2ρg) e^{−ρ²}."""
    shifted = np.concatenate([np.zeros_like(g[:1]), g], axis=0)
    return _add(_der(g), -2.0 * shifted)


def _gauss_integral(f: np.ndarray) -> complex:
    """∫_0^∞ f(ρ) e^{−ρ²} dρ for a scalar polynomial f."""
    n = np.arange(f.shape[0])
    return complex(np.sum(f * gamma_fn((n + 1) / 2.0) / 2.0))


def _dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Bilinear product of two vector polynomials as a scalar polynomial."""
    return sum(np.convolve(u[:, c], v[:, c]) for c in range(u.shape[1]))


def green_identity_defect(collar: FibreODE, u_poly: np.ndarray, phi_poly: np.ndarray) -> float:
    """
    |∫₀^∞ u·PᵗΦ − ∫₀^∞ Pu·Φ − Σ_k (−1)^k (Jγu)_k·(D^kΦ)(0)| for polynomial u
    and Φ = φ(ρ)e^{−ρ²}, relative to max(1, |∫ u·PᵗΦ|). Moments are exact.
    """
    if collar.potential is not None:
        raise ValueError("the oracle works with polynomial coefficients only")
    m, n = collar.order, collar.system_size
    u = np.asarray(u_poly, dtype=complex).reshape(-1, n)
    g = np.asarray(phi_poly, dtype=complex).reshape(-1, n)
    coeffs = collar.coefficients

    pu = np.zeros((1, n), dtype=complex)
    du = u
    for j in range(m + 1):
        pu = _add(pu, (-1j) ** j * _matvec(coeffs[j], du))
        du = _der(du)

    transposed = np.swapaxes(coeffs, 2, 3)
    pt_phi = np.zeros((1, n), dtype=complex)
    for j in range(m + 1):
        term = _matvec(transposed[j], g)
        for _ in range(j):
            term = _gauss_der(term)
        pt_phi = _add(pt_phi, (1j) ** j * term)

    lhs = _gauss_integral(_dot(u, pt_phi))
    interior = _gauss_integral(_dot(pu, g))

    data = np.zeros(m * n, dtype=complex)
    du = u
    for l in range(m):
        data[l * n:(l + 1) * n] = (-1j) ** l * du[0]
        du = _der(du)
    v = jump_operator(collar).matrix() @ data

    pairing = 0.0 + 0.0j
    dphi = g
    for k in range(m):
        pairing += (-1) ** k * (-1j) ** k * np.dot(v[k * n:(k + 1) * n], dphi[0])
        dphi = _gauss_der(dphi)
    return abs(lhs - interior - pairing) / max(1.0, abs(lhs))


def random_collar(rng: np.random.Generator, order: int = 2, system_size: int = 1, degree: int = 2,
                  variation: float = 0.3) -> FibreODE:
    """Collar operator with leading coefficient I + O(variation·ρ) and generic lower terms."""
    n = system_size
    coeffs = variation * (rng.standard_normal((order + 1, degree + 1, n, n))
                          + 1j * rng.standard_normal((order + 1, degree + 1, n, n))) / n
    coeffs[order, 0] = np.eye(n)
    coeffs[:order, 0] /= variation
    return FibreODE(order, n, (0.0, COLLAR_WIDTH), coeffs)


def random_test_pair(rng: np.random.Generator, system_size: int = 1, degree: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    shape = (degree + 1, system_size)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape),
            rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
