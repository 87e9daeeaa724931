"""
Finite-difference realization of model φ-operators in the coordinate
s = 1/x, where x²∂_x = −∂_s and the cusp end sits at s = ∞ (truncated at S).

Node layout
-----------
* point fibre: nodes along s only; the boundary is the node s = 1. The
  doubled line mirrors s ↦ 2 − s and carries the minus side s < 1.
* interval fibre: interior s-nodes times z-nodes, s-major. The undoubled
  z-grid holds 0..L including both boundary lines; the doubled one is a
  circle of length 2L whose plus half is z ∈ [0, L].

Only order-2 operators are discretized (second-order centered stencils).
"""
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from linalg_core.errors import GeometryMismatch
from normal_family.extension import DEFAULT_BUMP_HEIGHT, FibreExtension
from normal_family.model import ModelOperator
from normal_family.projectors import periodic_derivatives
from utils.logger import setup_logger

logger = setup_logger("DiscreteGrid")

# ===== CONFIG =====
MIN_NODES = 16
MIN_S = 4.0
STENCIL_ORDER = 2
FIXES = ("bump", "lab", "none")
LAB_FIX_MAX_UNKNOWNS = 4000


@dataclass(frozen=True)
class PhiGrid:
    geometry_tag: str
    n_s: int
    S: float
    n_z: int = 0
    length: float = 0.0
    doubled: bool = False

    def __post_init__(self):
        if self.S < MIN_S:
            raise ValueError(f"S must be at least {MIN_S}")
        if self.n_s < MIN_NODES:
            raise ValueError(f"n_s must be at least {MIN_NODES}")
        if self.n_z and (self.n_z < MIN_NODES or not self.length > 0):
            raise ValueError(f"interval fibres need n_z >= {MIN_NODES} and a positive length")

    @property
    def fibre_dim(self) -> int:
        return 1 if self.n_z else 0

    @property
    def h_s(self) -> float:
        if self.fibre_dim:
            return (self.S - 1.0) / (self.n_s + 1)
        return (self.S - 1.0) / self.n_s

    @property
    def h_z(self) -> float:
        return self.length / self.n_z if self.n_z else 0.0

    def s_nodes(self) -> np.ndarray:
        if self.fibre_dim:
            return 1.0 + self.h_s * np.arange(1, self.n_s + 1)
        first = -(self.n_s - 1) if self.doubled else 0
        return 1.0 + self.h_s * np.arange(first, self.n_s)

    def z_nodes(self) -> np.ndarray:
        if not self.fibre_dim:
            return np.zeros(1)
        count = 2 * self.n_z if self.doubled else self.n_z + 1
        return self.h_z * np.arange(count)

    def as_doubled(self) -> "PhiGrid":
        return replace(self, doubled=True)

    def with_truncation(self, S: float) -> "PhiGrid":
        """Same spacing, singular end moved to S."""
        n_s = int(round((S - 1.0) / self.h_s)) - (1 if self.fibre_dim else 0)
        return replace(self, S=S, n_s=n_s)

    def node_coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """(s, z) per node in storage order."""
        s, z = self.s_nodes(), self.z_nodes()
        return np.repeat(s, z.size), np.tile(z, s.size)

    def plus_nodes(self) -> np.ndarray:
        s, z = self.node_coordinates()
        if not self.doubled:
            return np.ones(s.size, dtype=bool)
        if self.fibre_dim:
            return z <= self.length + 0.5 * self.h_z
        return s >= 1.0 - 0.5 * self.h_s

    def gram_weights(self) -> np.ndarray:
        """φ-density dx/x² dz = ds dz per node (b = 0)."""
        cell = self.h_s * (self.h_z if self.fibre_dim else 1.0)
        return np.full(self.s_nodes().size * self.z_nodes().size, cell)


@dataclass
class InterfaceLine:
    """One boundary line: its nodes and, per side, node rows at growing distance along the normal."""
    nodes: np.ndarray
    plus_rows: List[np.ndarray]
    plus_sign: float
    minus_rows: List[np.ndarray]
    minus_sign: float


def interface_lines(grid: PhiGrid, depth: int) -> List[InterfaceLine]:
    """
    Boundary lines of a doubled grid with `depth` node rows on either side.
    Signs convert the derivative along each row into the global D_s / D_z.
    """
    if not grid.doubled:
        raise ValueError("interface lines need a doubled grid")
    if not grid.fibre_dim:
        centre = grid.n_s - 1
        rows_plus = [np.array([centre + k]) for k in range(1, depth + 1)]
        rows_minus = [np.array([centre - k]) for k in range(1, depth + 1)]
        return [InterfaceLine(np.array([centre]), rows_plus, 1.0, rows_minus, -1.0)]

    n_z, n_zn = grid.n_z, 2 * grid.n_z
    base = np.arange(grid.n_s) * n_zn

    def row(j: int) -> np.ndarray:
        return base + (j % n_zn)

    ks = range(1, depth + 1)
    start = InterfaceLine(row(0), [row(k) for k in ks], 1.0, [row(-k) for k in ks], -1.0)
    end = InterfaceLine(row(n_z), [row(n_z - k) for k in ks], -1.0, [row(n_z + k) for k in ks], 1.0)
    return [start, end]


@dataclass
class GridOperator:
    matrix: sp.csr_matrix
    grid: PhiGrid
    gram: np.ndarray
    system_size: int = 1
    stencil_order: int = STENCIL_ORDER
    boundary: str = "dirichlet"
    plus_mask: Optional[np.ndarray] = None
    fix: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def total(self) -> sp.csc_matrix:
        """P̂ + Π."""
        if self.fix is None:
            return self.matrix.tocsc()
        return sp.csc_matrix(self.matrix + sp.csr_matrix(self.fix))

    def unknown_mask(self, node_mask: np.ndarray) -> np.ndarray:
        return np.repeat(node_mask, self.system_size)

    def plus_restriction(self) -> sp.csr_matrix:
        p = self.unknown_mask(self.plus_mask)
        return self.matrix[p][:, p]


# ----------------------------
# Stencils
# ----------------------------

def dirichlet_derivatives(n: int, h: float) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    """Centered ∂ and ∂² with zero values beyond both ends."""
    ones = np.ones(n)
    d1 = sp.diags([-ones[:-1], ones[:-1]], [-1, 1], format="csr") / (2 * h)
    d2 = sp.diags([ones[:-1], -2 * ones, ones[:-1]], [-1, 0, 1], format="csr") / (h * h)
    return d1, d2


def _power(d1: sp.csr_matrix, d2: sp.csr_matrix, j: int) -> sp.csr_matrix:
    out = sp.identity(d1.shape[0], format="csr")
    for _ in range(j // 2):
        out = out @ d2
    if j % 2:
        out = out @ d1
    return out


def _coefficient_values(op: ModelOperator, key, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    n = op.system_size
    out = np.zeros((x.size, n, n), dtype=complex)
    for (dx, dz), c in op.coefficients.get(key, {}).items():
        out += ((x ** dx) * (z ** dz))[:, None, None] * c
    return out


def _node_operator(values: np.ndarray) -> sp.csr_matrix:
    if values.shape[1] == 1:
        return sp.diags(values[:, 0, 0], format="csr")
    return sp.block_diag(list(values), format="csr")


def _check_geometry(op: ModelOperator, grid: PhiGrid):
    if op.geometry_tag != grid.geometry_tag:
        raise GeometryMismatch(f"operator geometry {op.geometry_tag} on a {grid.geometry_tag} grid")
    if op.base_dim != 0:
        raise GeometryMismatch("the grid carries no base directions (base_dim must be 0)")
    if op.fibre.dim != grid.fibre_dim:
        raise GeometryMismatch("fibre type of the operator and the grid differ")
    if op.fibre.dim and abs(op.fibre.length - grid.length) > 1e-12:
        raise GeometryMismatch(f"fibre length {op.fibre.length} vs grid length {grid.length}")
    if op.order != 2:
        raise GeometryMismatch("only second-order operators are discretized")


def _assemble(op: ModelOperator, grid: PhiGrid, bump_height: float) -> sp.csr_matrix:
    """
    Σ a(1/s, z) (i∂_s)^k (−i∂_z)^β over the grid. On the minus side the
    coefficients are read at the mirrored point with the normal derivative
    sign flipped, and the bump enters the zeroth-order term.
    """
    s, z = grid.node_coordinates()
    plus = grid.plus_nodes()
    n = op.system_size
    if grid.fibre_dim:
        d1_s, d2_s = dirichlet_derivatives(grid.n_s, grid.h_s)
        if grid.doubled:
            d1_z, d2_z = periodic_derivatives(2 * grid.n_z, grid.h_z)
        else:
            d1_z, d2_z = dirichlet_derivatives(grid.n_z + 1, grid.h_z)
        s_ref, z_ref = s, np.where(plus, z, 2 * grid.length - z)
        ext = FibreExtension("circle", bump_height)
        interval = (0.0, grid.length)
        bump = np.array([0.0 if p else ext.bump(zz, interval) for p, zz in zip(plus, z)])
    else:
        d1_s, d2_s = dirichlet_derivatives(s.size, grid.h_s)
        d1_z = d2_z = sp.identity(1, format="csr")
        s_ref, z_ref = np.where(plus, s, 2.0 - s), z
        ext = FibreExtension("mirror", bump_height)
        bump = np.array([0.0 if p else ext.bump(ss, (1.0, grid.S)) for p, ss in zip(plus, s)])

    x_ref = 1.0 / s_ref
    total = sp.csr_matrix((s.size * n, s.size * n), dtype=complex)
    eye_n = sp.identity(n, format="csr")
    for key in op.coefficients:
        k, _, beta = key
        b = beta[0] if beta else 0
        normal_power = b if grid.fibre_dim else k
        sign = np.where(plus, 1.0, (-1.0) ** normal_power)
        values = _coefficient_values(op, key, x_ref, z_ref) * sign[:, None, None]
        stencil = sp.kron(
            (1j) ** k * _power(d1_s, d2_s, k), (-1j) ** b * _power(d1_z, d2_z, b), format="csr"
        )
        total = total + _node_operator(values) @ sp.kron(stencil, eye_n, format="csr")
    if grid.doubled and bump_height:
        total = total + sp.kron(sp.diags(bump), eye_n, format="csr")
    return total.tocsr()


def discretize(op: ModelOperator, grid: PhiGrid) -> GridOperator:
    """
    Operator on the undoubled grid. Stencils read zero beyond every grid end,
    so the result equals the plus block of the doubled operator.
    """
    _check_geometry(op, grid)
    if grid.doubled:
        raise ValueError("discretize takes an undoubled grid; use double_geometry")
    matrix = _assemble(op, grid, 0.0)
    return GridOperator(matrix, grid, np.repeat(grid.gram_weights(), op.system_size), op.system_size,
                        boundary="dirichlet-s/zero-extension", plus_mask=grid.plus_nodes())


def double_geometry(op: ModelOperator, grid: PhiGrid, bump_height: float = DEFAULT_BUMP_HEIGHT,
                    fix: str = "bump") -> GridOperator:
    """
    Operator on the doubled grid with its plus-node mask. `fix` selects what
    makes the minus side invertible: the bump potential, the extension-lab
    projections Π_sh + Π_comp (dense, small grids, no bump), or nothing.
    """
    if fix not in FIXES:
        raise ValueError(f"fix must be one of {FIXES}")
    _check_geometry(op, grid)
    doubled_grid = grid.as_doubled()
    height = bump_height if fix == "bump" else 0.0
    matrix = _assemble(op, doubled_grid, height)
    plus = doubled_grid.plus_nodes()
    gram = np.repeat(doubled_grid.gram_weights(), op.system_size)
    result = GridOperator(matrix, doubled_grid, gram, op.system_size,
                          boundary="dirichlet-s/periodic-z" if grid.fibre_dim else "dirichlet-s",
                          plus_mask=plus)
    if fix == "lab":
        result.fix = lab_fix(result)
    return result


def lab_fix(doubled: GridOperator) -> np.ndarray:
    """Π_sh + Π_comp from make_invertible, with γ reading the boundary-line values."""
    from extension_lab.bvp import AbstractBVP
    from extension_lab.invertibility import make_invertible

    if doubled.size > LAB_FIX_MAX_UNKNOWNS:
        raise ValueError(f"lab fix is dense; at most {LAB_FIX_MAX_UNKNOWNS} unknowns")
    n = doubled.system_size
    lines = interface_lines(doubled.grid, 1)
    nodes = np.concatenate([line.nodes for line in lines])
    unknowns = (nodes[:, None] * n + np.arange(n)).ravel()
    gamma = np.zeros((unknowns.size, doubled.size), dtype=complex)
    gamma[np.arange(unknowns.size), unknowns] = 1.0
    bvp = AbstractBVP(doubled.matrix.toarray(), gamma, np.diag(doubled.gram),
                      doubled.unknown_mask(doubled.plus_mask))
    ext = make_invertible(bvp)
    logger.info(f"Lab fix on {doubled.size} unknowns: min sv {ext.min_sv:.3e}")
    return ext.Pi_sh + ext.Pi_comp
