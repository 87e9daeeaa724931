"""
Model φ-operators P = x^{−cm} Σ a_{kαβ}(x, z) (x²D_x)^k (xD_y)^α D_z^β and
their normal family N(P)(τ, η) = Σ a_{kαβ}(0, z) τ^k η^α D_z^β on the fibre.

Coefficients are polynomials in (x, z), stored as {(x_deg, z_deg): N×N}.
The base variable y never enters a coefficient.
"""
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from linalg_core.errors import PointFibre, SingularMatrix
from linalg_core.types import as_complex_matrix
from symbol_calculus.companion import block_companion
from symbol_calculus.symbols import PolyMatrixSymbol

MultiIndex = Tuple[int, Tuple[int, ...], Tuple[int, ...]]
Poly2 = Dict[Tuple[int, int], np.ndarray]
Mu = Tuple[float, Tuple[float, ...]]

# ===== CONFIG =====
GEOMETRIES = ("HalfLineToy", "StripHyperbolic", "CuspDomain", "ExteriorToy")
MU_CAP = 16.0
LEADING_SAMPLES = 33
LEADING_TOL = 1e-12


@dataclass(frozen=True)
class FibreSpec:
    kind: str = "interval"
    length: float = 1.0

    def __post_init__(self):
        if self.kind not in ("point", "interval"):
            raise ValueError(f"fibre kind must be 'point' or 'interval', got {self.kind!r}")
        if self.kind == "interval" and not self.length > 0:
            raise ValueError("interval fibre needs a positive length")

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 0


def as_mu(mu: Union[float, Mu], base_dim: int) -> Mu:
    """Accepts τ alone or (τ, η)."""
    if np.isscalar(mu):
        return float(mu), (0.0,) * base_dim
    tau, eta = mu
    eta = tuple(float(e) for e in np.atleast_1d(eta))
    if len(eta) != base_dim:
        raise ValueError(f"eta has length {len(eta)}, base dimension is {base_dim}")
    return float(tau), eta


def mu_key(mu: Mu) -> Tuple[float, ...]:
    return (mu[0],) + tuple(mu[1])


def _leading_singular(matrices: List[np.ndarray]) -> Optional[Tuple[int, float]]:
    for i, a in enumerate(matrices):
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[-1] <= LEADING_TOL * max(sv[0], 1.0):
            return i, float(sv[-1])
    return None


@dataclass
class ModelOperator:
    order: int
    system_size: int
    base_dim: int
    fibre: FibreSpec
    coefficients: Dict[MultiIndex, Poly2]
    geometry_tag: str = "StripHyperbolic"
    weight_c: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if self.base_dim not in (0, 1):
            raise ValueError("base_dim must be 0 or 1")
        if self.geometry_tag not in GEOMETRIES:
            raise ValueError(f"unknown geometry {self.geometry_tag!r}")
        n = self.system_size
        cleaned: Dict[MultiIndex, Poly2] = {}
        for (k, alpha, beta), poly in self.coefficients.items():
            alpha, beta = tuple(int(a) for a in alpha), tuple(int(b) for b in beta)
            if len(alpha) != self.base_dim or len(beta) != self.fibre.dim:
                raise ValueError(f"multi-index {(k, alpha, beta)} does not match the geometry")
            if k < 0 or min(alpha + beta, default=0) < 0 or k + sum(alpha) + sum(beta) > self.order:
                raise ValueError(f"multi-index {(k, alpha, beta)} exceeds order {self.order}")
            terms: Poly2 = {}
            for (dx, dz), c in poly.items():
                c = complex(c) * np.eye(n) if np.ndim(c) == 0 else as_complex_matrix(c, f"a{(k, alpha, beta)}")
                if c.shape != (n, n):
                    raise ValueError(f"coefficient {(k, alpha, beta)} has shape {c.shape}")
                if self.fibre.dim == 0 and dz:
                    raise ValueError("point fibre coefficients cannot depend on z")
                terms[(int(dx), int(dz))] = terms.get((int(dx), int(dz)), 0) + c
            cleaned[(int(k), alpha, beta)] = terms
        self.coefficients = cleaned

        top = (self.order, (0,) * self.base_dim, (0,) * self.fibre.dim)
        zs = np.linspace(0.0, self.fibre.length, LEADING_SAMPLES) if self.fibre.dim else [0.0]
        bad = _leading_singular([self.coefficient_at(top, 0.0, z) for z in zs])
        if bad is not None:
            raise SingularMatrix(bad[0], bad[1])

    @property
    def fibre_length(self) -> float:
        return self.fibre.length if self.fibre.dim else 0.0

    def coefficient_at(self, key: MultiIndex, x: float, z: float) -> np.ndarray:
        out = np.zeros((self.system_size, self.system_size), dtype=complex)
        for (dx, dz), c in self.coefficients.get(key, {}).items():
            out += (x ** dx if dx else 1.0) * (z ** dz if dz else 1.0) * c
        return out

    def z_polynomial_at_x0(self, key: MultiIndex) -> np.ndarray:
        """Coefficients of z ↦ a_key(0, z), shape (deg+1, N, N), ascending."""
        terms = {dz: c for (dx, dz), c in self.coefficients.get(key, {}).items() if dx == 0}
        deg = max(terms, default=0)
        out = np.zeros((deg + 1, self.system_size, self.system_size), dtype=complex)
        for dz, c in terms.items():
            out[dz] += c
        return out

    def symbol_at(self, x: float, z: float) -> PolyMatrixSymbol:
        """Principal φ-symbol frozen at (x, z), in the covariables (τ, η, ζ)."""
        terms = {(k,) + alpha + beta: self.coefficient_at((k, alpha, beta), x, z)
                 for (k, alpha, beta) in self.coefficients if k + sum(alpha) + sum(beta) == self.order}
        return PolyMatrixSymbol(self.order, self.system_size, self.base_dim, self.fibre.dim, terms)

    def point_normal_matrix(self, mu: Union[float, Mu]) -> np.ndarray:
        """N(P)(μ) for a point fibre: Σ a_{kα}(0) τ^k η^α."""
        tau, eta = as_mu(mu, self.base_dim)
        out = np.zeros((self.system_size, self.system_size), dtype=complex)
        for (k, alpha, beta), _ in self.coefficients.items():
            if sum(beta):
                continue
            weight = tau ** k * np.prod([e ** a for e, a in zip(eta, alpha)])
            out += weight * self.coefficient_at((k, alpha, beta), 0.0, 0.0)
        return out


# ----------------------------
# Fibre ODE
# ----------------------------

@dataclass
class FibreODE:
    """
    Σ_j A_j(z) D_z^j v = 0 on `interval`, A_j polynomial in z with
    coefficients[j, d] the z^d coefficient. `potential` is added to A_0.
    """
    order: int
    system_size: int
    interval: Tuple[float, float]
    coefficients: np.ndarray
    mu: Mu = (0.0, ())
    potential: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        m, n = self.order, self.system_size
        if self.coefficients.ndim != 4 or self.coefficients.shape[0] != m + 1 or \
                self.coefficients.shape[2:] != (n, n):
            raise ValueError(f"coefficients must have shape ({m + 1}, deg+1, {n}, {n})")
        a, b = self.interval
        if not b > a:
            raise ValueError("interval must have positive length")
        zs = np.linspace(a, b, LEADING_SAMPLES)
        bad = _leading_singular([self.coefficient_matrices(z)[m] for z in zs])
        if bad is not None:
            raise SingularMatrix(bad[0], bad[1])

    @property
    def size(self) -> int:
        return self.order * self.system_size

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]

    def coefficient_matrices(self, z: float) -> List[np.ndarray]:
        powers = z ** np.arange(self.coefficients.shape[1])
        mats = [np.tensordot(powers, self.coefficients[j], axes=(0, 0)) for j in range(self.order + 1)]
        if self.potential is not None:
            mats[0] = mats[0] + self.potential(z)
        return mats

    def companion(self, z: float) -> np.ndarray:
        """M(z) with D_z V = M(z) V, V = (v, D_z v, …, D_z^{m−1} v)."""
        return block_companion(self.coefficient_matrices(z))


def normal_operator(op: ModelOperator, mu: Union[float, Mu]) -> FibreODE:
    """Freezes the coefficients at x = 0 and substitutes τ^k η^α."""
    if op.fibre.dim == 0:
        raise PointFibre()
    tau, eta = as_mu(mu, op.base_dim)
    if max((abs(tau),) + tuple(abs(e) for e in eta)) > MU_CAP:
        raise ValueError(f"|mu| components are capped at {MU_CAP}")
    polys = {}
    for key in op.coefficients:
        k, alpha, beta = key
        weight = tau ** k * np.prod([e ** a for e, a in zip(eta, alpha)])
        if weight != 0:
            polys.setdefault(beta[0], []).append(weight * op.z_polynomial_at_x0(key))
    deg = max((p.shape[0] for ps in polys.values() for p in ps), default=1)
    n = op.system_size
    coeffs = np.zeros((op.order + 1, deg, n, n), dtype=complex)
    for j, ps in polys.items():
        for p in ps:
            coeffs[j, : p.shape[0]] += p
    return FibreODE(op.order, n, (0.0, op.fibre.length), coeffs, (tau, eta))


def reflect_coefficients(coefficients: np.ndarray, center: float) -> np.ndarray:
    """A_j(c − z)(−1)^j: the operator pulled back by z ↦ c − z."""
    deg = coefficients.shape[1]
    out = np.zeros_like(coefficients)
    for d in range(deg):
        for e in range(d + 1):
            out[:, e] += comb(d, e) * center ** (d - e) * (-1) ** e * coefficients[:, d]
    signs = (-1.0) ** np.arange(coefficients.shape[0])
    return out * signs[:, None, None, None]


def adjoint_ode(ode: FibreODE) -> FibreODE:
    """
    Formal adjoint Σ_j D_z^j A_j^H = Σ_i (Σ_{j≥i} C(j,i) D_z^{j−i}A_j^H) D_z^i,
    with D_z p = −i p′ on the polynomial coefficients.
    """
    m = ode.order
    herm = np.conj(np.swapaxes(ode.coefficients, 2, 3))
    out = np.zeros_like(herm)
    for i in range(m + 1):
        for j in range(i, m + 1):
            r = j - i
            if r == 0:
                out[i] += comb(j, i) * herm[j]
                continue
            deriv = P.polyder(herm[j], m=r, axis=0) if herm.shape[1] > r else np.zeros((0,) + herm.shape[2:])
            out[i, : deriv.shape[0]] += comb(j, i) * (-1j) ** r * deriv
    potential = None
    if ode.potential is not None:
        source = ode.potential

        def potential(z: float) -> np.ndarray:
            return np.conj(source(z)).T
    return FibreODE(m, ode.system_size, ode.interval, out, ode.mu, potential)
