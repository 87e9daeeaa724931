"""
Extremal eigenvalues of discrete operators and fibre slices, and the
discrete shadow count on the plus side.
"""
from typing import Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigs, eigsh

from discrete_calderon.grids import LAB_FIX_MAX_UNKNOWNS, GridOperator, PhiGrid, discretize
from linalg_core.errors import PointFibre
from linalg_core.subspaces import null_space
from normal_family.extension import DEFAULT_BUMP_HEIGHT, FibreExtension
from normal_family.model import ModelOperator, normal_operator
from normal_family.projectors import doubled_fibre_matrix

# ===== CONFIG =====
EIG_SHIFT = 1e-2
EIG_TOL = 1e-12


def smallest_eigenvalue(a: Union[GridOperator, sp.spmatrix, np.ndarray], hermitian: bool = True,
                        shift: float = -EIG_SHIFT) -> float:
    """
    Eigenvalue closest to `shift` by shift-invert Lanczos (Arnoldi when not
    Hermitian). With the default negative shift this is the smallest
    eigenvalue of a nonnegative operator, including a zero one.
    """
    matrix = a.total() if isinstance(a, GridOperator) else a
    if hermitian:
        vals = eigsh(matrix, k=1, sigma=shift, which="LM", tol=EIG_TOL, return_eigenvectors=False)
    else:
        vals = eigs(matrix, k=1, sigma=shift, which="LM", tol=EIG_TOL, return_eigenvectors=False)
    return float(np.real(vals[0]))


def fibre_slice(op: ModelOperator, grid: PhiGrid, tau: float,
                bump_height: float = DEFAULT_BUMP_HEIGHT) -> np.ndarray:
    """N(P)(τ) on the doubled fibre with the grid's z-resolution."""
    if not grid.fibre_dim:
        raise PointFibre()
    ode = normal_operator(op, tau)
    return doubled_fibre_matrix(ode, FibreExtension("circle", bump_height), 2 * grid.n_z)


def plus_shadow_dim(op: ModelOperator, grid: PhiGrid) -> int:
    """
    Dimension of {u : P̂u = 0 off the boundary lines, u = 0 on each line and
    on the node row next to it}, by a dense rank check.
    """
    plus = discretize(op, grid)
    if plus.size > LAB_FIX_MAX_UNKNOWNS:
        raise ValueError(f"dense shadow count; at most {LAB_FIX_MAX_UNKNOWNS} unknowns")
    s, z = grid.node_coordinates()
    if grid.fibre_dim:
        distance, h = np.minimum(z, grid.length - z), grid.h_z
    else:
        distance, h = s - 1.0, grid.h_s
    on_line = plus.unknown_mask(distance <= 0.5 * h)
    jets = np.flatnonzero(plus.unknown_mask(distance <= 1.5 * h))
    gamma = np.zeros((jets.size, plus.size), dtype=complex)
    gamma[np.arange(jets.size), jets] = 1.0
    equations = plus.matrix.toarray()[~on_line]
    return null_space(np.vstack([equations, gamma])).dim
