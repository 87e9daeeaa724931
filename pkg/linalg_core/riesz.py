"""
Riesz spectral projectors (1/2πi)∮(λI − A)⁻¹ dλ by contour quadrature.

Circles use the trapezoid rule (spectrally accurate for periodic
integrands). Rectangles use Gauss–Legendre on each edge because the
integrand is not periodic along an edge. Node counts double from
`nodes` until the projector is idempotent and stable, up to `max_nodes`.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import special

from linalg_core.errors import ContourTooClose, SingularMatrix
from linalg_core.factorizations import lu_solve
from linalg_core.types import Projector, as_complex_matrix, fro, idempotence_defect
from utils.logger import setup_logger

logger = setup_logger("Riesz")

# ===== CONFIG =====
START_NODES = 32
MAX_NODES = 4096
PROJECTOR_TOL = 1e-11
GAP_SAMPLES = 65


@dataclass(frozen=True)
class ContourSpec:
    """
    kind = "circle": center, radius.
    kind = "rectangle": x_min, x_max, y_min, y_max (counter-clockwise).
    """
    kind: str
    center: complex = 0j
    radius: float = 1.0
    x_min: float = -1.0
    x_max: float = 1.0
    y_min: float = -1.0
    y_max: float = 1.0
    nodes: int = START_NODES
    max_nodes: int = MAX_NODES

    @classmethod
    def circle(cls, center: complex, radius: float, nodes: int = START_NODES,
               max_nodes: int = MAX_NODES) -> "ContourSpec":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return cls("circle", center=complex(center), radius=float(radius),
                   nodes=nodes, max_nodes=max_nodes)

    @classmethod
    def rectangle(cls, x_min: float, x_max: float, y_min: float, y_max: float,
                  nodes: int = START_NODES, max_nodes: int = MAX_NODES) -> "ContourSpec":
        if not (x_min < x_max and y_min < y_max):
            raise ValueError("rectangle corners out of order")
        return cls("rectangle", x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max,
                   nodes=nodes, max_nodes=max_nodes)

    def quadrature(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes λ_j and weights w_j with Σ w_j f(λ_j) ≈ ∮ f dλ."""
        if self.kind == "circle":
            theta = 2.0 * np.pi * np.arange(n) / n
            e = np.exp(1j * theta)
            lam = self.center + self.radius * e
            w = 1j * self.radius * e * (2.0 * np.pi / n)
            return lam, w
        if self.kind == "rectangle":
            per_edge = max(n // 4, 2)
            t, wt = special.roots_legendre(per_edge)
            corners = [complex(self.x_min, self.y_min), complex(self.x_max, self.y_min),
                       complex(self.x_max, self.y_max), complex(self.x_min, self.y_max)]
            lams: List[np.ndarray] = []
            ws: List[np.ndarray] = []
            for a, b in zip(corners, corners[1:] + corners[:1]):
                lams.append(a + (b - a) * (t + 1.0) / 2.0)
                ws.append(wt * (b - a) / 2.0)
            return np.concatenate(lams), np.concatenate(ws)
        raise ValueError(f"unknown contour kind {self.kind!r}")


def _riesz_sum(a: np.ndarray, contour: ContourSpec, n: int) -> np.ndarray:
    size = a.shape[0]
    eye = np.eye(size, dtype=complex)
    lam, w = contour.quadrature(n)
    acc = np.zeros((size, size), dtype=complex)
    for lj, wj in zip(lam, w):
        acc += wj * lu_solve(lj * eye - a, eye)
    return acc / (2j * np.pi)


def riesz_projector(a, contour: ContourSpec, tol: float = PROJECTOR_TOL) -> Projector:
    """
    Spectral projector for the eigenvalues enclosed by `contour`.

    Raises ContourTooClose when node doubling does not reach an idempotent,
    stable projector (an eigenvalue sits on or near the contour).
    """
    a = as_complex_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"A must be square, got {a.shape}")

    n = contour.nodes
    previous: Optional[np.ndarray] = None
    defect = np.inf
    while n <= contour.max_nodes:
        try:
            c = _riesz_sum(a, contour, n)
        except SingularMatrix:
            raise ContourTooClose(np.inf, n)
        defect = idempotence_defect(c)
        scale = max(fro(c), 1.0)
        settled = previous is not None and fro(c - previous) <= tol * scale
        if defect <= tol and settled:
            return Projector.certify(c, label=f"riesz[{contour.kind},{n}]")
        previous = c
        n *= 2
    raise ContourTooClose(defect, n // 2)


def cauchy_radius(a: np.ndarray) -> float:
    """1 + min(‖A‖_∞, ‖A‖_1, ‖A‖_F): every eigenvalue lies strictly inside."""
    return 1.0 + min(np.linalg.norm(a, np.inf), np.linalg.norm(a, 1), fro(a))


def real_axis_gap(a: np.ndarray, radius: float, samples: int = GAP_SAMPLES) -> float:
    """
    Lower estimate of the distance from spec(A) to the real axis: half the
    smallest σ_min(xI − A) over `samples` points x ∈ [−R, R].
    """
    size = a.shape[0]
    xs = np.linspace(-radius, radius, samples)
    smallest = min(np.linalg.svd(x * np.eye(size) - a, compute_uv=False)[-1] for x in xs)
    return 0.5 * float(smallest)


def half_plane_contour(a: np.ndarray, upper: bool, gap: float,
                       nodes: int = START_NODES, max_nodes: int = MAX_NODES) -> ContourSpec:
    """Rectangle [−R, R] × [δ, R] (upper) or [−R, R] × [−R, −δ] (lower)."""
    r = cauchy_radius(a)
    delta = min(gap, 0.5 * r)
    if upper:
        return ContourSpec.rectangle(-r, r, delta, r, nodes, max_nodes)
    return ContourSpec.rectangle(-r, r, -r, -delta, nodes, max_nodes)


def half_plane_projectors(a, gap: Optional[float] = None, tol: float = PROJECTOR_TOL,
                          retries: int = 4) -> Tuple[Projector, Projector]:
    """
    Upper and lower half-plane projectors of A. The gap estimate is halved
    and the contours recomputed until C⁺ + C⁻ = I within tolerance.
    """
    a = as_complex_matrix(a, "A")
    if gap is None:
        gap = real_axis_gap(a, cauchy_radius(a))
    if gap <= 0:
        raise ContourTooClose(np.inf, 0)
    eye = np.eye(a.shape[0])
    last_error = np.inf
    for attempt in range(retries + 1):
        c_up = riesz_projector(a, half_plane_contour(a, True, gap), tol)
        c_lo = riesz_projector(a, half_plane_contour(a, False, gap), tol)
        last_error = fro(c_up.matrix + c_lo.matrix - eye) / max(fro(eye), 1.0)
        if last_error <= 10 * tol:
            return c_up, c_lo
        logger.warning(f"Half-plane split incomplete (defect {last_error:.2e}); halving gap {gap:.3e}")
        gap *= 0.5
    raise ContourTooClose(last_error, MAX_NODES)
