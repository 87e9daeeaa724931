"""
Probes of a discrete Calderón projector on a strip-type grid against the
model objects it should reproduce: the normal-family projector N(C)(τ)
deep in the cusp, and the principal-symbol projector at high frequency.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from discrete_calderon.grids import PhiGrid, double_geometry
from discrete_calderon.paths import JET_ORDER, calderon_path_spaces
from linalg_core.errors import GeometryMismatch, SolveFailure
from linalg_core.types import Projector
from normal_family.extension import FibreExtension
from normal_family.model import MU_CAP, ModelOperator
from normal_family.projectors import normal_calderon_sweep
from symbol_calculus.calderon import calderon_symbol
from symbol_calculus.symbols import Covector, PolyMatrixSymbol
from utils.logger import setup_logger

logger = setup_logger("DiscreteProbes")

# ===== CONFIG =====
PROBE_TOL = 5e-2
PROBE_BUMP_HEIGHT = 20.0
FFT_PAD = 4
SPECTRUM_CUTOFF = 1e-10
PROBE_SIZES = (64, 128, 256)
PROBE_S = 12.0
SYMBOL_STUDY = ((4.0, 64), (8.0, 128), (16.0, 256))
SYMBOL_S = 4.0
TRUNCATION_WARN = 1e-3


@dataclass
class ProbeResult:
    error: float
    frequency: float
    n_s: int
    n_z: int
    S: float
    h_s: float


def envelope(s: np.ndarray, support: Tuple[float, float]) -> np.ndarray:
    """exp(−1/(1−w²)) with w the affine coordinate of `support`, zero outside."""
    lo, hi = support
    w = (np.asarray(s, dtype=float) - 0.5 * (lo + hi)) / (0.5 * (hi - lo))
    out = np.zeros_like(w)
    inside = np.abs(w) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - w[inside] ** 2))
    return out


def default_support(grid: PhiGrid) -> Tuple[float, float]:
    return grid.S / 3.0, grid.S - 2.0


def to_layout(per_node: np.ndarray, n: int) -> np.ndarray:
    """(n_s, 2mN) per-node data to the ((line·m + l)·n_s + i)·N + c layout."""
    n_s = per_node.shape[0]
    return per_node.reshape(n_s, -1, n).transpose(1, 0, 2).ravel()


def from_layout(data: np.ndarray, n_s: int, n: int) -> np.ndarray:
    return data.reshape(-1, n_s, n).transpose(1, 0, 2).reshape(n_s, -1)


def _check_strip(op: ModelOperator, grid: PhiGrid):
    if not op.fibre.dim or not grid.fibre_dim:
        raise GeometryMismatch("probes need an interval fibre")


def discrete_projector(op: ModelOperator, grid: PhiGrid, bump_height: float = PROBE_BUMP_HEIGHT) -> Projector:
    return calderon_path_spaces(double_geometry(op, grid, bump_height))


def normal_probe(op: ModelOperator, c_discrete: Projector, grid: PhiGrid, tau: float = 1.0,
                 support: Optional[Tuple[float, float]] = None, bump_height: float = PROBE_BUMP_HEIGHT,
                 pattern: Optional[np.ndarray] = None) -> ProbeResult:
    """
    Applies the discrete projector to e^{−iτs}·envelope(s)·pattern and
    compares with N(C) applied mode by mode to the same samples. Error is the
    largest deviation inside the envelope support over the largest reference
    value.
    """
    _check_strip(op, grid)
    n = op.system_size
    width = 2 * JET_ORDER * n
    pattern = np.eye(width)[0] if pattern is None else np.asarray(pattern, dtype=complex)
    support = support or default_support(grid)
    s = grid.s_nodes()
    env = envelope(s, support)
    g = np.exp(-1j * tau * s) * env

    disc = from_layout(c_discrete.matrix @ to_layout(np.outer(g, pattern), n), s.size, n)

    n_fft = FFT_PAD * s.size
    padded = np.zeros(n_fft, dtype=complex)
    padded[: s.size] = g
    g_hat = np.fft.fft(padded) / n_fft
    sigma = 2 * np.pi * np.fft.fftfreq(n_fft, grid.h_s)
    keep = (np.abs(sigma) <= MU_CAP) & (np.abs(g_hat) > SPECTRUM_CUTOFF * np.abs(g_hat).max())
    taus = [float(-v) for v in sigma[keep]]
    sweep = normal_calderon_sweep(op, taus, FibreExtension("circle", bump_height))
    if sweep.failures:
        raise SolveFailure(f"normal family has no projector at {len(sweep.failures)} frequencies")
    responses = np.array([sweep.projectors[(t,)].matrix @ pattern for t in taus])
    phases = np.exp(1j * np.outer(s - s[0], sigma[keep])) * g_hat[keep]
    reference = phases @ responses

    inside = env > 0
    scale = float(np.abs(reference).max())
    error = float(np.abs(disc - reference)[inside].max()) / scale if scale > 0 else 0.0
    logger.info(f"Normal probe tau={tau}: error {error:.3e} ({len(taus)} modes)")
    return ProbeResult(error, tau, grid.n_s, grid.n_z, grid.S, grid.h_s)


def boundary_symbol(op: ModelOperator, x: float) -> PolyMatrixSymbol:
    """
    Principal symbol at (x, z = 0) with the boundary normal ζ first and the
    s-covariable σ as the tangential one: a(i∂_s)^k D_z^β ↦ (−σ)^k ζ^β a.
    """
    sym = op.symbol_at(x, 0.0)
    terms = {(e[1], e[0]): (-1) ** e[0] * c for e, c in sym.terms.items()}
    return PolyMatrixSymbol(op.order, op.system_size, 0, 1, terms)


def symbol_probe(op: ModelOperator, c_discrete: Projector, grid: PhiGrid, xi: float,
                 support: Optional[Tuple[float, float]] = None,
                 pattern: Optional[np.ndarray] = None) -> ProbeResult:
    """
    Data e^{iξs}·envelope(s)·pattern on the start line only; relative ℓ²
    error of the start-line output against the symbol projector at the
    envelope centre.
    """
    _check_strip(op, grid)
    n = op.system_size
    jets = JET_ORDER * n
    pattern = np.eye(jets)[0] if pattern is None else np.asarray(pattern, dtype=complex)
    support = support or (1.5, grid.S - 0.5)
    s = grid.s_nodes()
    g = np.exp(1j * xi * s) * envelope(s, support)

    full = np.concatenate([pattern, np.zeros(jets, dtype=complex)])
    disc = from_layout(c_discrete.matrix @ to_layout(np.outer(g, full), n), s.size, n)[:, :jets]

    centre = 0.5 * sum(support)
    c_sym = calderon_symbol(boundary_symbol(op, 1.0 / centre), Covector.tangential(zeta_prime=(xi,)))
    reference = np.outer(g, c_sym.matrix @ pattern)
    scale = float(np.linalg.norm(reference))
    diff = float(np.linalg.norm(disc - reference))
    error = diff / scale if scale > 0 else diff
    logger.info(f"Symbol probe xi={xi}: error {error:.3e} at h_s*xi={grid.h_s * xi:.3f}")
    return ProbeResult(error, xi, grid.n_s, grid.n_z, grid.S, grid.h_s)


# ----------------------------
# Refinement studies
# ----------------------------

def normal_probe_study(op: ModelOperator, sizes: Sequence[int] = PROBE_SIZES, S: float = PROBE_S,
                       tau: float = 1.0, bump_height: float = PROBE_BUMP_HEIGHT) -> List[ProbeResult]:
    results = []
    for n in sizes:
        grid = PhiGrid(op.geometry_tag, n, S, n, op.fibre.length)
        c = discrete_projector(op, grid, bump_height)
        results.append(normal_probe(op, c, grid, tau, bump_height=bump_height))
    return results


def symbol_probe_study(op: ModelOperator, study: Sequence[Tuple[float, int]] = SYMBOL_STUDY,
                       S: float = SYMBOL_S, bump_height: float = PROBE_BUMP_HEIGHT) -> List[ProbeResult]:
    """Joint refinement: ξ grows with the node count."""
    results = []
    for xi, n in study:
        grid = PhiGrid(op.geometry_tag, n, S, n, op.fibre.length)
        c = discrete_projector(op, grid, bump_height)
        results.append(symbol_probe(op, c, grid, xi))
    return results


def decreasing(results: Sequence[ProbeResult]) -> bool:
    errors = [r.error for r in results]
    return all(b < a for a, b in zip(errors, errors[1:]))


@dataclass
class TruncationReport:
    S: float
    value: float
    value_extended: float

    @property
    def difference(self) -> float:
        return abs(self.value_extended - self.value)


def truncation_sensitivity(quantity: Callable[[PhiGrid], float], grid: PhiGrid,
                           factor: float = 2.0, warn: float = TRUNCATION_WARN) -> TruncationReport:
    """Reruns `quantity` with the singular end moved from S to factor·S at the same spacing."""
    extended = grid.with_truncation(factor * grid.S)
    report = TruncationReport(grid.S, quantity(grid), quantity(extended))
    if report.difference > warn * max(abs(report.value), 1.0):
        logger.warning(f"Truncation at S={grid.S} moves the result by {report.difference:.3e}")
    return report
