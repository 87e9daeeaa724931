"""
Seeded random elliptic symbols for the property suites.

Even order: σ_m = Q(ξ)* Q(ξ) + ε|ξ|^m I, positive definite off the zero
section. Odd order (one tangential covariable only): (τ I + i ξ₁ H) times an
even-order factor, H Hermitian positive definite.
"""
import numpy as np

from symbol_calculus.symbols import (
    Covector,
    PolyDict,
    PolyMatrixSymbol,
    monomials,
    norm_power,
    poly_add,
    poly_conj_transpose,
    poly_mul,
    poly_scale,
)

# ===== CONFIG =====
ELLIPTIC_MARGIN = 0.1
LOWER_ORDER_SCALE = 0.1


def _gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)


def _homogeneous(rng: np.random.Generator, dim: int, degree: int, n: int) -> PolyDict:
    exps = monomials(dim, degree)
    scale = 1.0 / np.sqrt(len(exps))
    return {e: scale * _gaussian(rng, n) for e in exps}


def _positive_even(rng: np.random.Generator, dim: int, order: int, n: int) -> PolyDict:
    if order == 0:
        return {(0,) * dim: np.eye(n, dtype=complex)}
    q = _homogeneous(rng, dim, order // 2, n)
    return poly_add(poly_mul(poly_conj_transpose(q), q),
                    poly_scale(norm_power(dim, order // 2, n), ELLIPTIC_MARGIN))


def _hermitian_pd(rng: np.random.Generator, n: int) -> np.ndarray:
    g = _gaussian(rng, n)
    return g.conj().T @ g + 0.5 * np.eye(n)


def random_elliptic_symbol(rng: np.random.Generator, order: int, system_size: int,
                           base_dim: int, fibre_tangent_dim: int,
                           lower_order: bool = True) -> PolyMatrixSymbol:
    dim = 1 + base_dim + fibre_tangent_dim
    if dim < 2:
        raise ValueError("need at least one tangential covariable")
    n = system_size
    if order % 2 == 0:
        terms = _positive_even(rng, dim, order, n)
    else:
        if dim != 2:
            raise ValueError("odd order needs exactly one tangential covariable")
        first = {(1, 0): np.eye(n, dtype=complex), (0, 1): 1j * _hermitian_pd(rng, n)}
        terms = poly_mul(first, _positive_even(rng, dim, order - 1, n))
    if lower_order:
        for degree in range(order):
            terms = poly_add(terms, poly_scale(_homogeneous(rng, dim, degree, n), LOWER_ORDER_SCALE))
    return PolyMatrixSymbol(order, n, base_dim, fibre_tangent_dim, terms)


def random_symbol(rng: np.random.Generator, max_order: int = 4, max_size: int = 3) -> PolyMatrixSymbol:
    """Order, system size and covariable split drawn too; odd orders get one tangential covariable."""
    order = int(rng.integers(1, max_order + 1))
    n = int(rng.integers(1, max_size + 1))
    if order % 2:
        b, f = (1, 0) if rng.random() < 0.5 else (0, 1)
    else:
        b = int(rng.integers(0, 2))
        f = int(rng.integers(1 - b, 3 - b))
    return random_elliptic_symbol(rng, order, n, b, f)


def random_tangential(rng: np.random.Generator, sym: PolyMatrixSymbol) -> Covector:
    return Covector.tangential(rng.standard_normal(sym.base_dim), rng.standard_normal(sym.fibre_tangent_dim))
