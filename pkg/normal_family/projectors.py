"""
Boundary-data spaces of the normal family, unique continuation, the
normal-family Calderón projector and the full-ellipticity scan.

Data vectors at both fibre endpoints use the same collar derivative D_z:
γu = (u, D_z u, …, D_z^{m−1} u)(start) ⊕ (same)(end).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from linalg_core.errors import CalderonError, GraphConditionFailed, RankDeficient, SolveFailure
from linalg_core.subspaces import direct_sum_check, projector_from_pair
from linalg_core.types import Projector, SubspaceBasis, fro, numerical_rank
from normal_family.extension import FibreExtension
from normal_family.fundamental import SolutionBasis, fundamental_matrix
from normal_family.model import FibreODE, ModelOperator, Mu, adjoint_ode, as_mu, mu_key, normal_operator
from symbol_calculus.calderon import orthogonalize
from utils.logger import setup_logger
from utils.settings import MAX_WORKERS, RANK_TOL

logger = setup_logger("NormalFamily")

# ===== CONFIG =====
NU_CONVENTIONS = ("collar",)
SCAN_NODES = 128
SCAN_TOL = 1e-10
RANGE_RESIDUAL_TOL = 1e-7


# ----------------------------
# Boundary data spaces
# ----------------------------

def _plus_space(basis: SolutionBasis) -> SubspaceBasis:
    data = basis.data_matrix()
    rank = numerical_rank(data)
    if rank < basis.ode.size:
        raise RankDeficient(rank, basis.ode.size)
    return SubspaceBasis.span(data)


def boundary_data_space(ode: FibreODE, nu_convention: str = "collar") -> SubspaceBasis:
    """B⁺(μ) = {γu : N(P)(μ)u = 0} ⊂ C^{2mN}."""
    if nu_convention not in NU_CONVENTIONS:
        raise ValueError(f"unsupported nu convention {nu_convention!r}")
    return _plus_space(fundamental_matrix(ode))


def minus_boundary_data_space(ode: FibreODE, ext: FibreExtension) -> SubspaceBasis:
    """B⁻(μ): data at the original endpoints of solutions on the minus side."""
    basis = fundamental_matrix(ext.minus_ode(ode))
    data = ext.minus_data(basis.start_jets, basis.end_jets)
    rank = numerical_rank(data)
    if rank < ode.size:
        raise RankDeficient(rank, ode.size)
    return SubspaceBasis.span(data)


@dataclass
class UCPReport:
    dim_shadow: int
    min_sv: float


def ucp_check(ode: FibreODE) -> UCPReport:
    """
    dim_shadow = mN − rank of the two-endpoint jet map. min_sv is the
    smallest singular value of the end jets of the canonical basis (start
    jets = I), i.e. how well the far endpoint still sees every solution.
    """
    basis = fundamental_matrix(ode)
    shadow = ode.size - numerical_rank(basis.data_matrix())
    min_sv = float(np.linalg.svd(basis.end_jets, compute_uv=False)[-1])
    return UCPReport(shadow, min_sv)


def ucp_check_adjoint(ode: FibreODE) -> UCPReport:
    return ucp_check(adjoint_ode(ode))


# ----------------------------
# Projectors
# ----------------------------

def _spaces(op: ModelOperator, mu, ext: FibreExtension) -> Tuple[Mu, SubspaceBasis, SubspaceBasis]:
    ode = normal_operator(op, mu)
    return ode.mu, boundary_data_space(ode), minus_boundary_data_space(ode, ext)


def range_residual(c: Projector, basis: SolutionBasis) -> float:
    """
    How far rg C is from data of integrated solutions: the relative
    least-squares residual of every range column against γ(basis), and the
    substitution residual of the basis itself, whichever is larger.
    """
    data = basis.data_matrix()
    columns = SubspaceBasis.span(c.matrix, ambient_dim=c.size).orthonormal()
    if not columns.shape[1]:
        return basis.residual
    coeffs, *_ = np.linalg.lstsq(data, columns, rcond=None)
    misfit = fro(data @ coeffs - columns) / max(fro(columns), 1.0)
    return max(float(misfit), basis.residual)


def ode_calderon(ode: FibreODE, ext: Optional[FibreExtension] = None,
                 range_tol: float = RANGE_RESIDUAL_TOL) -> Projector:
    """
    projector_from_pair(B⁺, B⁻) for one fibre ODE, its range checked against
    the solution data. Raises NotComplementary carrying μ when the extension
    is not invertible, SolveFailure when the range residual exceeds range_tol.
    """
    ext = ext or FibreExtension()
    basis = fundamental_matrix(ode)
    c = projector_from_pair(_plus_space(basis), minus_boundary_data_space(ode, ext), mu=mu_key(ode.mu))
    residual = range_residual(c, basis)
    if residual > range_tol:
        raise SolveFailure(f"range of the normal projector at mu={mu_key(ode.mu)} is not solution data "
                           f"(residual {residual:.3e})")
    c.label = f"normal_calderon[{ext.kind}]"
    return c


def normal_calderon(op: ModelOperator, mu: Union[float, Mu],
                    ext: Optional[FibreExtension] = None) -> Projector:
    """ode_calderon of N(P)(μ)."""
    return ode_calderon(normal_operator(op, mu), ext)


def normal_gap(op: ModelOperator, mu: Union[float, Mu], ext: Optional[FibreExtension] = None) -> float:
    """Smallest singular value of [orth B⁺ | orth B⁻]; zero when they are not complementary."""
    _, plus, minus = _spaces(op, mu, ext or FibreExtension())
    return direct_sum_check(plus, minus).gap


def normal_complementary(op: ModelOperator, mu: Union[float, Mu],
                         ext: Optional[FibreExtension] = None) -> Projector:
    ext = ext or FibreExtension()
    mu, plus, minus = _spaces(op, mu, ext)
    c = projector_from_pair(minus, plus, mu=mu_key(mu))
    c.label = f"normal_complementary[{ext.kind}]"
    return c


def orthogonal_normal_calderon(op: ModelOperator, mu: Union[float, Mu],
                               ext: Optional[FibreExtension] = None) -> Projector:
    return orthogonalize(normal_calderon(op, mu, ext))


def normal_dn_map(op: ModelOperator, mu: Union[float, Mu],
                  ext: Optional[FibreExtension] = None) -> np.ndarray:
    """
    Fibre Dirichlet-to-Neumann matrix for m = 2: outward normal derivatives
    (−∂_z at the start, +∂_z at the end) as a function of the Dirichlet values.
    """
    if op.order != 2:
        raise ValueError("normal_dn_map needs a second-order operator")
    n = op.system_size
    basis = normal_calderon(op, mu, ext).range_space().basis
    dirichlet = np.vstack([basis[:n], basis[2 * n: 3 * n]])
    neumann = np.vstack([basis[n: 2 * n], basis[3 * n:]])
    sv = np.linalg.svd(dirichlet, compute_uv=False)
    if sv[-1] <= RANK_TOL * max(sv[0], 1.0):
        raise GraphConditionFailed(float(sv[-1]))
    d_z = neumann @ np.linalg.inv(dirichlet)
    orientation = np.kron(np.diag([-1.0, 1.0]), np.eye(n))
    return orientation @ (1j * d_z)


@dataclass
class SweepResult:
    projectors: Dict[Tuple[float, ...], Projector] = field(default_factory=dict)
    failures: Dict[Tuple[float, ...], str] = field(default_factory=dict)


def normal_calderon_sweep(op: ModelOperator, mu_grid: Sequence, ext: Optional[FibreExtension] = None,
                          max_workers: int = MAX_WORKERS) -> SweepResult:
    """Per-μ projectors computed concurrently, assembled by μ."""
    mus = [as_mu(mu, op.base_dim) for mu in mu_grid]

    def worker(mu: Mu):
        try:
            return mu, normal_calderon(op, mu, ext), None
        except CalderonError as e:
            return mu, None, str(e)

    result = SweepResult()
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as ex:
        for mu, c, err in ex.map(worker, mus):
            if c is None:
                result.failures[mu_key(mu)] = err
            else:
                result.projectors[mu_key(mu)] = c
    if result.failures:
        logger.warning(f"{len(result.failures)} of {len(mus)} mu values have no projector")
    return result


# ----------------------------
# Full ellipticity
# ----------------------------

@dataclass
class ScanRow:
    mu: Tuple[float, ...]
    min_sv: float
    invertible: bool


@dataclass
class ScanReport:
    rows: List[ScanRow]

    @property
    def failures(self) -> List[Tuple[float, ...]]:
        return [r.mu for r in self.rows if not r.invertible]

    @property
    def invertible(self) -> bool:
        return not self.failures


def periodic_derivatives(n: int, h: float) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    ones = np.ones(n)
    d1 = sp.diags([-ones[:-1], ones[:-1], [1.0], [-1.0]], [-1, 1, -(n - 1), n - 1], format="csr")
    d2 = sp.diags([ones[:-1], -2 * ones, ones[:-1], [1.0], [1.0]], [-1, 0, 1, -(n - 1), n - 1], format="csr")
    return d1 / (2 * h), d2 / (h * h)


def doubled_fibre_matrix(ode: FibreODE, ext: FibreExtension, nodes: int = SCAN_NODES) -> np.ndarray:
    """Periodic finite differences for the operator on the doubled fibre (circle realization)."""
    circle = FibreExtension("circle", ext.bump_height)
    minus = circle.minus_ode(ode)
    a, b = ode.interval
    h = 2 * (b - a) / nodes
    zs = a + h * np.arange(nodes)
    d1, d2 = periodic_derivatives(nodes, h)
    n = ode.system_size
    total = sp.csr_matrix((nodes * n, nodes * n), dtype=complex)
    coeffs = [ode.coefficient_matrices(z) if z <= b else minus.coefficient_matrices(z) for z in zs]
    for j in range(ode.order + 1):
        deriv = sp.identity(nodes, format="csr")
        for _ in range(j // 2):
            deriv = deriv @ d2
        if j % 2:
            deriv = deriv @ d1
        block = sp.block_diag([c[j] for c in coeffs], format="csr")
        total = total + (-1j) ** j * (block @ sp.kron(deriv, sp.identity(n), format="csr"))
    return total.toarray()


def full_ellipticity_scan(op: ModelOperator, mu_grid: Sequence, ext: Optional[FibreExtension] = None,
                          tol: float = SCAN_TOL, nodes: int = SCAN_NODES,
                          max_workers: int = MAX_WORKERS) -> ScanReport:
    """
    Smallest singular value of N(P)(μ) per μ: the matrix itself for a point
    fibre, a periodic discretization of the doubled fibre otherwise. `ext`
    defaults to the doubling without bump.
    """
    ext = ext or FibreExtension(bump_height=0.0)
    mus = [as_mu(mu, op.base_dim) for mu in mu_grid]

    def worker(mu: Mu) -> ScanRow:
        if op.fibre.dim == 0:
            mat = op.point_normal_matrix(mu)
        else:
            mat = doubled_fibre_matrix(normal_operator(op, mu), ext, nodes)
        sv = np.linalg.svd(mat, compute_uv=False)
        return ScanRow(mu_key(mu), float(sv[-1]), bool(sv[-1] > tol * max(sv[0], 1.0)))

    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as ex:
        rows = list(ex.map(worker, mus))
    report = ScanReport(rows)
    if report.failures:
        logger.info(f"Not invertible at {len(report.failures)} of {len(rows)} mu values")
    return report
