"""
Two routes to the discrete Calderón projector on a doubled grid.

spaces: B⁺ and B⁻ are the boundary jets of the discrete Dirichlet problems
on either side, spanned over unit interface data; the projector is the one
with range B⁺ along B⁻.

jump (point fibres): Ĉ = γ₊(P̂ + Π)⁻¹γ*J, with γ* realized by discrete
deltas and γ₊ by one-sided extrapolation from the plus side.
"""
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from discrete_calderon.grids import GridOperator, PhiGrid, double_geometry, interface_lines
from discrete_calderon.jump import JumpOperator, collar_operator, jump_operator
from discrete_calderon.traces import one_sided_trace
from linalg_core.errors import GeometryMismatch, SolveFailure
from linalg_core.subspaces import projector_from_pair
from linalg_core.types import Projector, SubspaceBasis, fro
from normal_family.extension import DEFAULT_BUMP_HEIGHT
from normal_family.model import ModelOperator
from utils.logger import setup_logger

logger = setup_logger("DiscretePaths")

# ===== CONFIG =====
JET_ORDER = 2
TRACE_DEGREE = 3
SOLVE_BATCH = 64
PATH_SIZES = (256, 512, 1024)
PATH_S = 8.0


def _factorize(a: sp.spmatrix):
    try:
        return splu(sp.csc_matrix(a))
    except RuntimeError as e:
        raise SolveFailure(f"sparse LU failed: {e}") from e


def node_unknowns(nodes: np.ndarray, system_size: int) -> np.ndarray:
    return (np.asarray(nodes)[:, None] * system_size + np.arange(system_size)).ravel()


def data_dim(doubled: GridOperator) -> int:
    lines = interface_lines(doubled.grid, 1)
    return len(lines) * JET_ORDER * lines[0].nodes.size * doubled.system_size


def normal_spacing(grid: PhiGrid) -> float:
    return grid.h_z if grid.fibre_dim else grid.h_s


# ----------------------------
# Path A: side spaces
# ----------------------------

def side_space(doubled: GridOperator, side: str) -> SubspaceBasis:
    """Jets on every boundary line of the side's discrete Dirichlet solutions."""
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    grid, n = doubled.grid, doubled.system_size
    depth = TRACE_DEGREE + 1
    lines = interface_lines(grid, depth)
    on_line = np.zeros(doubled.size // n, dtype=bool)
    for line in lines:
        on_line[line.nodes] = True
    side_nodes = doubled.plus_mask if side == "plus" else ~doubled.plus_mask

    interior = np.flatnonzero(doubled.unknown_mask(side_nodes & ~on_line))
    boundary = np.concatenate([node_unknowns(line.nodes, n) for line in lines])
    a = doubled.total().tocsr()[interior]
    lu = _factorize(a[:, interior])
    a_ib = a[:, boundary].tocsc()

    where = np.full(doubled.size, -1)
    where[interior] = np.arange(interior.size)
    line_pos = np.full(doubled.size, -1)
    line_pos[boundary] = np.arange(boundary.size)

    h = normal_spacing(grid)
    per_line = lines[0].nodes.size * n
    data = np.zeros((len(lines) * JET_ORDER * per_line, boundary.size), dtype=complex)
    for start in range(0, boundary.size, SOLVE_BATCH):
        cols = np.arange(start, min(start + SOLVE_BATCH, boundary.size))
        sol = lu.solve(-a_ib[:, cols].toarray())

        def values_at(unknowns: np.ndarray) -> np.ndarray:
            out = np.zeros((unknowns.size, cols.size), dtype=complex)
            pos, lp = where[unknowns], line_pos[unknowns]
            out[pos >= 0] = sol[pos[pos >= 0]]
            out[lp >= 0] = (lp[lp >= 0][:, None] == cols[None, :]).astype(complex)
            return out

        for li, line in enumerate(lines):
            rows = line.plus_rows if side == "plus" else line.minus_rows
            sign = line.plus_sign if side == "plus" else line.minus_sign
            samples = np.stack([values_at(node_unknowns(r, n)) for r in [line.nodes] + rows])
            jets = one_sided_trace(samples, h, JET_ORDER, TRACE_DEGREE, skip=0, sign=sign, tol=None).jets
            offset = li * JET_ORDER * per_line
            data[offset: offset + JET_ORDER * per_line, cols] = jets.reshape(JET_ORDER * per_line, cols.size)
    return SubspaceBasis.span(data)


def calderon_path_spaces(doubled: GridOperator) -> Projector:
    """Projector onto discrete B⁺ along discrete B⁻."""
    if doubled.plus_mask is None or not doubled.grid.doubled:
        raise ValueError("calderon_path_spaces needs a doubled grid operator")
    plus = side_space(doubled, "plus")
    minus = side_space(doubled, "minus")
    c = projector_from_pair(plus, minus)
    c.label = "path_spaces"
    logger.info(f"Path spaces: data dim {c.size}, rank {plus.dim}, idempotence {c.idem_defect:.2e}")
    return c


# ----------------------------
# Path B: jump formula
# ----------------------------

def delta_loads(doubled: GridOperator, data: np.ndarray) -> np.ndarray:
    """
    γ*V on the grid for columns V = (V₀, V₁): V₀ e₀/w₀ plus D applied to the
    centred delta, −i·(e₋₁ − e₊₁)/(2h w) ⊗ V₁, so that the gram pairing with
    a grid function φ reproduces V₀φ(0) − V₁(Dφ)(0) to O(h²).
    """
    grid, n = doubled.grid, doubled.system_size
    line = interface_lines(grid, 1)[0]
    centre, right, left = line.nodes[0], line.plus_rows[0][0], line.minus_rows[0][0]
    h = grid.h_s
    w = doubled.gram
    loads = np.zeros((doubled.size, data.shape[1]), dtype=complex)
    for c in range(n):
        loads[centre * n + c] += data[c] / w[centre * n + c]
        loads[right * n + c] += 1j / (2 * h * w[right * n + c]) * data[n + c]
        loads[left * n + c] += -1j / (2 * h * w[left * n + c]) * data[n + c]
    return loads


def calderon_path_jump(doubled: GridOperator, jump: JumpOperator) -> Projector:
    """
    Columns Ĉe_q = γ₊(P̂ + Π)⁻¹γ*(J e_q); the plus trace skips the interface
    node, where the solution jumps. Point fibres only.
    """
    grid, n = doubled.grid, doubled.system_size
    if grid.fibre_dim or not grid.doubled:
        raise GeometryMismatch("the jump path runs on doubled point-fibre grids")
    if jump.order != JET_ORDER or jump.system_size != n:
        raise ValueError(f"jump operator of order {jump.order} and size {jump.system_size} does not fit")
    lu = _factorize(doubled.total())
    u = lu.solve(delta_loads(doubled, jump.matrix()))
    if not np.all(np.isfinite(u)):
        raise SolveFailure("non-finite solution of the doubled problem")

    line = interface_lines(grid, TRACE_DEGREE + 2)[0]
    samples = np.stack([u[node_unknowns(r, n)] for r in line.plus_rows])
    jets = one_sided_trace(samples, grid.h_s, JET_ORDER, TRACE_DEGREE, skip=1, sign=line.plus_sign).jets
    c = Projector.certify(jets.reshape(JET_ORDER * n, JET_ORDER * n), label="path_jump")
    logger.info(f"Path jump: n_s={grid.n_s}, idempotence {c.idem_defect:.2e}")
    return c


# ----------------------------
# Path agreement
# ----------------------------

@dataclass
class PathRow:
    n_s: int
    h: float
    gap: float
    idem_jump: float
    idem_spaces: float


@dataclass
class PathConvergence:
    rows: List[PathRow]

    @property
    def slope(self) -> float:
        """Least-squares slope of log gap against log h."""
        h = np.log([r.h for r in self.rows])
        gap = np.log([max(r.gap, 1e-300) for r in self.rows])
        return float(np.polyfit(h, gap, 1)[0])

    @property
    def finest_gap(self) -> float:
        return min(self.rows, key=lambda r: r.h).gap


def path_convergence(op: ModelOperator, sizes: Sequence[int] = PATH_SIZES, S: float = PATH_S,
                     bump_height: float = DEFAULT_BUMP_HEIGHT) -> PathConvergence:
    """‖C_jump − C_spaces‖_F over refinements of a point-fibre operator."""
    jump = jump_operator(collar_operator(op))
    rows = []
    for n_s in sizes:
        doubled = double_geometry(op, PhiGrid(op.geometry_tag, n_s, S), bump_height)
        c_spaces = calderon_path_spaces(doubled)
        c_jump = calderon_path_jump(doubled, jump)
        rows.append(PathRow(n_s, doubled.grid.h_s, fro(c_jump.matrix - c_spaces.matrix),
                            c_jump.idem_defect, c_spaces.idem_defect))
    result = PathConvergence(rows)
    logger.info(f"Path agreement: finest gap {result.finest_gap:.3e}, slope {result.slope:.2f}")
    return result
