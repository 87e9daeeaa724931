from linalg_core.errors import (
    CalderonError,
    ContourTooClose,
    GramNotPD,
    NotComplementary,
    NotIdempotent,
    NotInvertible,
    RankDeficient,
    SingularMatrix,
)
from linalg_core.factorizations import inverse, lu_solve
from linalg_core.matrix_sign import matrix_sign, upper_half_plane_projector
from linalg_core.riesz import ContourSpec, half_plane_projectors, riesz_projector
from linalg_core.subspaces import (
    direct_sum_check,
    gram_adjoint,
    intersection,
    null_space,
    orth_projector,
    projector_from_pair,
    subspace_distance,
)
from linalg_core.types import Projector, SubspaceBasis, as_complex_matrix, fro, idempotence_defect
