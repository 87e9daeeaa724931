"""
Matrix-valued polynomial symbols σ(τ, η, ζ′) = Σ a_{kαβ} τ^k η^α ζ′^β.

Internally a monomial is one exponent tuple (k, α_1..α_b, β_1..β_f) over
the covariables (τ, η, ζ′) in that order.
"""
from dataclasses import dataclass, field
from itertools import product
from math import factorial
from typing import Dict, Iterable, List, Tuple

import numpy as np

from linalg_core.errors import SingularMatrix
from linalg_core.types import as_complex_matrix

Exponent = Tuple[int, ...]
PolyDict = Dict[Exponent, np.ndarray]

# ===== CONFIG =====
LEADING_TOL = 1e-12


# ----------------------------
# Covectors
# ----------------------------

@dataclass(frozen=True)
class Covector:
    """(τ, η, ζ′). For tangential covectors τ is ignored."""
    tau: float = 0.0
    eta: Tuple[float, ...] = ()
    zeta_prime: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(float(v) for v in self.eta))
        object.__setattr__(self, "zeta_prime", tuple(float(v) for v in self.zeta_prime))
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError("covector has non-finite components")

    @classmethod
    def tangential(cls, eta: Iterable[float] = (), zeta_prime: Iterable[float] = ()) -> "Covector":
        return cls(0.0, tuple(eta), tuple(zeta_prime))

    @classmethod
    def from_array(cls, values: np.ndarray, b: int) -> "Covector":
        values = np.asarray(values, dtype=float)
        return cls(float(values[0]), tuple(values[1:1 + b]), tuple(values[1 + b:]))

    def as_array(self) -> np.ndarray:
        return np.array((self.tau,) + self.eta + self.zeta_prime, dtype=float)

    def tangential_array(self) -> np.ndarray:
        return np.array(self.eta + self.zeta_prime, dtype=float)

    def tangential_norm(self) -> float:
        return float(np.linalg.norm(self.tangential_array()))

    def scaled(self, lam: float) -> "Covector":
        return Covector(self.tau * lam, tuple(v * lam for v in self.eta),
                        tuple(v * lam for v in self.zeta_prime))


# ----------------------------
# Polynomial dictionaries
# ----------------------------

def poly_add(p: PolyDict, q: PolyDict) -> PolyDict:
    out = {e: c.copy() for e, c in p.items()}
    for e, c in q.items():
        out[e] = out[e] + c if e in out else c.copy()
    return out


def poly_mul(p: PolyDict, q: PolyDict) -> PolyDict:
    out: PolyDict = {}
    for (ep, cp), (eq, cq) in product(p.items(), q.items()):
        e = tuple(a + b for a, b in zip(ep, eq))
        term = cp @ cq
        out[e] = out[e] + term if e in out else term
    return out


def poly_conj_transpose(p: PolyDict) -> PolyDict:
    """Pointwise Hermitian adjoint for real covariables."""
    return {e: c.conj().T for e, c in p.items()}


def poly_scale(p: PolyDict, factor: complex) -> PolyDict:
    return {e: factor * c for e, c in p.items()}


def norm_power(dim: int, half_order: int, n: int) -> PolyDict:
    """|ξ|^(2·half_order) I_n in `dim` covariables, by the multinomial expansion."""
    out: PolyDict = {}
    for e in product(range(half_order + 1), repeat=dim):
        if sum(e) != half_order:
            continue
        coeff = factorial(half_order)
        for ei in e:
            coeff //= factorial(ei)
        out[tuple(2 * ei for ei in e)] = coeff * np.eye(n, dtype=complex)
    return out


def _monomial(values, exponent) -> complex:
    out = 1.0 + 0j
    for v, k in zip(values, exponent):
        if k:
            out *= complex(v) ** k
    return out


def monomials(dim: int, degree: int) -> List[Exponent]:
    return [e for e in product(range(degree + 1), repeat=dim) if sum(e) == degree]


# ----------------------------
# Symbol
# ----------------------------

@dataclass
class PolyMatrixSymbol:
    """
    Frozen coefficients of a φ-operator of order m on C^N with base
    dimension b and f_tan tangential fibre covariables.
    """
    order: int
    system_size: int
    base_dim: int
    fibre_tangent_dim: int
    terms: PolyDict = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if self.base_dim not in (0, 1):
            raise ValueError("base_dim must be 0 or 1")
        n = self.system_size
        d = self.dim
        cleaned: PolyDict = {}
        for e, c in self.terms.items():
            e = tuple(int(v) for v in e)
            if len(e) != d or min(e) < 0:
                raise ValueError(f"exponent {e} does not fit {d} covariables")
            if sum(e) > self.order:
                raise ValueError(f"exponent {e} exceeds order {self.order}")
            if np.ndim(c) == 0:
                c = complex(c) * np.eye(n)
            c = as_complex_matrix(c, f"a{e}")
            if c.shape != (n, n):
                raise ValueError(f"coefficient {e} has shape {c.shape}, expected {(n, n)}")
            cleaned[e] = cleaned[e] + c if e in cleaned else c
        self.terms = cleaned
        lead = self.leading_tau_coefficient()
        sv = np.linalg.svd(lead, compute_uv=False)
        if sv[-1] <= LEADING_TOL * max(sv[0], 1.0):
            raise SingularMatrix(self.system_size - 1, float(sv[-1]))

    @property
    def dim(self) -> int:
        return 1 + self.base_dim + self.fibre_tangent_dim

    @property
    def tangent_dim(self) -> int:
        return self.base_dim + self.fibre_tangent_dim

    @classmethod
    def from_multi_index(cls, order: int, system_size: int, base_dim: int, fibre_tangent_dim: int,
                         coefficients: Dict[Tuple[int, Tuple[int, ...], Tuple[int, ...]], np.ndarray]
                         ) -> "PolyMatrixSymbol":
        """Build from {(k, α, β): a_{kαβ}}."""
        terms = {(k,) + tuple(alpha) + tuple(beta): c for (k, alpha, beta), c in coefficients.items()}
        return cls(order, system_size, base_dim, fibre_tangent_dim, terms)

    def leading_tau_coefficient(self) -> np.ndarray:
        key = (self.order,) + (0,) * (self.dim - 1)
        return self.terms.get(key, np.zeros((self.system_size, self.system_size), dtype=complex))

    def principal_part(self) -> "PolyMatrixSymbol":
        return PolyMatrixSymbol(self.order, self.system_size, self.base_dim, self.fibre_tangent_dim,
                                {e: c for e, c in self.terms.items() if sum(e) == self.order})

    def evaluate(self, values: np.ndarray) -> np.ndarray:
        """σ at the covariable vector (τ, η, ζ′); complex values allowed."""
        values = np.asarray(values, dtype=complex)
        out = np.zeros((self.system_size, self.system_size), dtype=complex)
        for e, c in self.terms.items():
            out += _monomial(values, e) * c
        return out

    def at(self, cov: Covector) -> np.ndarray:
        return self.evaluate(cov.as_array())

    def tau_coefficients(self, xi_prime: Covector) -> List[np.ndarray]:
        """a_k(ξ′) for k = 0..m, so that σ(τ, ξ′) = Σ_k a_k(ξ′) τ^k."""
        tangential = xi_prime.tangential_array()
        n = self.system_size
        coeffs = [np.zeros((n, n), dtype=complex) for _ in range(self.order + 1)]
        for e, c in self.terms.items():
            coeffs[e[0]] += _monomial(tangential, e[1:]) * c
        return coeffs


def laplacian_symbol(base_dim: int = 0, fibre_tangent_dim: int = 1, weights: Tuple[float, ...] = ()) -> PolyMatrixSymbol:
    """τ² + Σ w_j ξ_j² (weights default to 1)."""
    d = 1 + base_dim + fibre_tangent_dim
    w = weights or (1.0,) * (d - 1)
    terms: PolyDict = {(2,) + (0,) * (d - 1): np.eye(1)}
    for j in range(d - 1):
        e = [0] * d
        e[j + 1] = 2
        terms[tuple(e)] = w[j] * np.eye(1)
    return PolyMatrixSymbol(2, 1, base_dim, fibre_tangent_dim, terms)
