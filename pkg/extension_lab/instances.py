"""
Seeded instance generators for the extension lab. Every generator takes a
numpy Generator; suites derive one per instance from (seed, index).
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg as sla

from extension_lab.bvp import AbstractBVP
from linalg_core.subspaces import direct_sum_check, orth_projector
from linalg_core.types import SubspaceBasis

# ===== CONFIG =====
EIGEN_RANGE = (0.5, 2.0)
MIN_SUM_GAP = 1e-2
MAX_RESAMPLES = 50
INVERSION_KINDS = ("direct", "overlap", "deficient", "identity")


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_gram(rng: np.random.Generator, n: int) -> np.ndarray:
    a = random_complex(rng, n, n)
    return a.conj().T @ a / n + np.eye(n)


def block_gram(rng: np.random.Generator, plus_mask: np.ndarray) -> np.ndarray:
    """Positive definite gram that does not couple the two sides."""
    p = np.asarray(plus_mask, dtype=bool)
    g = np.zeros((p.size, p.size), dtype=complex)
    g[np.ix_(p, p)] = random_gram(rng, int(p.sum()))
    g[np.ix_(~p, ~p)] = random_gram(rng, int((~p).sum()))
    return g


def hermitian_with_kernel(rng: np.random.Generator, n: int, kernel: np.ndarray) -> np.ndarray:
    """Hermitian H with ker H = span(kernel) and nonzero eigenvalues of random sign in EIGEN_RANGE."""
    k = kernel.shape[1]
    q, _ = np.linalg.qr(np.hstack([kernel, random_complex(rng, n, n - k)]))
    lam = np.zeros(n)
    lam[k:] = rng.uniform(*EIGEN_RANGE, n - k) * rng.choice([-1.0, 1.0], n - k)
    return (q * lam) @ q.conj().T


# ----------------------------
# Projection perturbations
# ----------------------------

@dataclass
class InversionInstance:
    kind: str
    T: np.ndarray
    Pi: np.ndarray
    gram: np.ndarray
    expect_real: Optional[bool]
    expect_imag: bool


def inversion_instance(rng: np.random.Generator, n: int, kind: str) -> InversionInstance:
    """
    Gram-self-adjoint T = G⁻¹H of rank r and a gram-orthogonal Π whose range
    makes rg T + rg Π direct ("direct"), full but not direct ("overlap"), or
    deficient ("deficient"). "identity" is T = Π = I.
    """
    if kind not in INVERSION_KINDS:
        raise ValueError(f"kind must be one of {INVERSION_KINDS}")
    if kind == "identity":
        eye = np.eye(n, dtype=complex)
        return InversionInstance(kind, eye, eye, eye, True, True)
    if n < 3:
        raise ValueError("inversion instances need n >= 3")

    gram = random_gram(rng, n)
    for _ in range(MAX_RESAMPLES):
        r = int(rng.integers(1, n - 1))
        h = hermitian_with_kernel(rng, n, random_complex(rng, n, n - r))
        t = np.linalg.solve(gram, h)
        pi_dim = {"direct": n - r, "overlap": n - r + 1, "deficient": n - r - 1}[kind]
        pi = orth_projector(SubspaceBasis.span(random_complex(rng, n, pi_dim)), gram).matrix
        range_t = SubspaceBasis.span(t)
        range_pi = SubspaceBasis.span(pi) if pi_dim else SubspaceBasis.zero(n)
        if kind == "direct" and direct_sum_check(range_t, range_pi).gap < MIN_SUM_GAP:
            continue
        if kind == "overlap":
            sv = np.linalg.svd(np.hstack([range_t.orthonormal(), range_pi.orthonormal()]), compute_uv=False)
            if sv[n - 1] < MIN_SUM_GAP:
                continue
        expect_real = {"direct": True, "overlap": None, "deficient": False}[kind]
        return InversionInstance(kind, t, pi, gram, expect_real, kind != "deficient")
    raise RuntimeError(f"no well-separated {kind} instance after {MAX_RESAMPLES} draws")


# ----------------------------
# Boundary problems
# ----------------------------

def designed_plus_problem(rng: np.random.Generator, n: int, shadow_dim: int, data_dim: int,
                          extra_kernel: int = 1) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Hermitian H and γ with ker H ∩ ker γ of dimension `shadow_dim` and
    `extra_kernel` further kernel directions seen by γ. Returns (H, γ, shadow basis).
    """
    if shadow_dim + data_dim > n or shadow_dim + extra_kernel > n:
        raise ValueError("shadow, data and kernel dimensions do not fit in C^n")
    shadow = np.linalg.qr(random_complex(rng, n, max(shadow_dim, 1)))[0][:, :shadow_dim]
    away_from_shadow = np.eye(n) - shadow @ shadow.conj().T
    gamma = random_complex(rng, data_dim, n) @ away_from_shadow
    extra = away_from_shadow @ random_complex(rng, n, extra_kernel)
    h = hermitian_with_kernel(rng, n, np.hstack([shadow, extra]))
    return h, gamma, shadow


def shadow_instance(rng: np.random.Generator, n: int = 6, shadow_dim: int = 2,
                    data_dim: int = 2) -> AbstractBVP:
    h, gamma, _ = designed_plus_problem(rng, n, shadow_dim, data_dim)
    return AbstractBVP(h, gamma)


def extension_instance(rng: np.random.Generator, n_plus: int = 6, n_minus: int = 6,
                       shadow_dim: int = 2, data_dim: int = 2, minus_kernel: int = 2) -> AbstractBVP:
    """
    Gram-self-adjoint T on C^{n_plus} ⊕ C^{n_minus} whose plus block carries a
    designed shadow, with γ reading the plus side only and a kernel of
    dimension `minus_kernel` living on the minus side.
    """
    n = n_plus + n_minus
    plus_mask = np.arange(n) < n_plus
    gram = block_gram(rng, plus_mask)
    h_pp, gamma_p, _ = designed_plus_problem(rng, n_plus, shadow_dim, data_dim)

    h = random_complex(rng, n, n)
    h = 0.5 * (h + h.conj().T)
    h[:n_plus, :n_plus] = h_pp
    v_minus = np.linalg.qr(random_complex(rng, n_minus, minus_kernel))[0]
    keep = np.eye(n, dtype=complex)
    keep[n_plus:, n_plus:] -= v_minus @ v_minus.conj().T
    h = keep @ h @ keep

    gamma = np.hstack([gamma_p, np.zeros((data_dim, n_minus), dtype=complex)])
    return AbstractBVP(np.linalg.solve(gram, h), gamma, gram, plus_mask)


def augment_instance(rng: np.random.Generator, rows: int = 3, cols: int = 2) -> np.ndarray:
    return random_complex(rng, rows, cols)


def kernel_bvp_instance(rng: np.random.Generator, n: int = 5, kernel_dim: int = 2,
                        data_dim: int = 3) -> AbstractBVP:
    """Non-Hermitian T with a kernel of the given dimension, γ generic."""
    kernel = random_complex(rng, n, kernel_dim)
    q = sla.null_space(kernel.conj().T)
    t = random_complex(rng, n, n - kernel_dim) @ q.conj().T
    return AbstractBVP(t, random_complex(rng, data_dim, n))


def complement_instance(rng: np.random.Generator, n_plus: int = 6, n_minus: int = 6, kernel_dim: int = 2,
                        data_dim: int = 2) -> Tuple[AbstractBVP, SubspaceBasis, np.ndarray]:
    """
    Gram-self-adjoint T with a generic kernel K straddling both sides, γ on
    the plus side only and a cutoff χ vanishing on plus. The minus block of
    the gram is diagonal so it commutes with χ². Returns (problem, K, χ).
    """
    n = n_plus + n_minus
    plus_mask = np.arange(n) < n_plus
    gram = np.zeros((n, n), dtype=complex)
    gram[:n_plus, :n_plus] = random_gram(rng, n_plus)
    gram[n_plus:, n_plus:] = np.diag(rng.uniform(*EIGEN_RANGE, n_minus))
    kernel = SubspaceBasis.span(random_complex(rng, n, kernel_dim))
    h = hermitian_with_kernel(rng, n, kernel.orthonormal())
    gamma = np.hstack([random_complex(rng, data_dim, n_plus), np.zeros((data_dim, n_minus), dtype=complex)])
    chi = np.zeros(n)
    chi[n_plus:] = rng.uniform(0.5, 1.5, n_minus)
    return AbstractBVP(np.linalg.solve(gram, h), gamma, gram, plus_mask), kernel, chi
