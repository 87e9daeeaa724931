"""
Ellipticity of the principal part on the unit covector sphere.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from symbol_calculus.symbols import Covector, PolyMatrixSymbol
from utils.logger import setup_logger
from utils.settings import DEFAULT_SEED

logger = setup_logger("Ellipticity")

# ===== CONFIG =====
ELLIPTIC_TOL = 1e-6
REFINE_MAX_ITER = 400


@dataclass
class EllipticityReport:
    elliptic: bool
    min_sv: float
    witness: Optional[Covector] = None


def sphere_samples(dim: int, samples: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """
    Quasi-uniform points of S^{dim−1}, one per row: ±1 on the line, equal
    angles on the circle, a Fibonacci lattice on S², seeded normalized
    Gaussians above that.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        theta = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if dim == 3:
        k = np.arange(samples) + 0.5
        z = 1.0 - 2.0 * k / samples
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        phi = np.pi * (1.0 + 5 ** 0.5) * k
        return np.column_stack([z, r * np.cos(phi), r * np.sin(phi)])
    g = np.random.default_rng(seed).standard_normal((samples, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _smallest_sv(principal: PolyMatrixSymbol, x: np.ndarray) -> float:
    n = np.linalg.norm(x)
    if n == 0.0:
        return np.inf
    return float(np.linalg.svd(principal.evaluate(x / n), compute_uv=False)[-1])


def ellipticity_check(sym: PolyMatrixSymbol, samples: int = 256, seed: int = DEFAULT_SEED,
                      tol: float = ELLIPTIC_TOL) -> EllipticityReport:
    """
    Samples the principal part on the unit sphere and refines the worst
    sample by a local search (Brent on the circle, Nelder–Mead above). Elliptic
    when the smallest singular value stays above `tol` relative to the
    largest one seen.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    principal = sym.principal_part()
    points = sphere_samples(sym.dim, samples, seed)
    smallest = np.array([_smallest_sv(principal, p) for p in points])
    largest = max(float(np.linalg.norm(principal.evaluate(p), 2)) for p in points)

    worst = points[int(np.argmin(smallest))]
    min_sv = float(np.min(smallest))
    if sym.dim == 2:
        # one angle: bounded Brent search around the worst sample
        theta0 = float(np.arctan2(worst[1], worst[0]))
        width = 2.0 * np.pi / len(points)
        result = minimize_scalar(lambda t: _smallest_sv(principal, np.array([np.cos(t), np.sin(t)])),
                                 bounds=(theta0 - width, theta0 + width), method="bounded",
                                 options={"xatol": 1e-13, "maxiter": REFINE_MAX_ITER})
        if result.fun < min_sv:
            worst = np.array([np.cos(result.x), np.sin(result.x)])
            min_sv = float(result.fun)
    elif sym.dim > 2:
        result = minimize(lambda x: _smallest_sv(principal, x), worst, method="Nelder-Mead",
                          options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": REFINE_MAX_ITER})
        if result.fun < min_sv:
            worst = result.x / np.linalg.norm(result.x)
            min_sv = float(result.fun)

    elliptic = min_sv > tol * max(largest, 1e-300)
    witness = None if elliptic else Covector.from_array(worst, sym.base_dim)
    if not elliptic:
        logger.info(f"Principal part degenerates: min sv {min_sv:.3e} at {worst}")
    return EllipticityReport(elliptic, min_sv, witness)
