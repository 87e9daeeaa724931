from normal_family.extension import FibreExtension
from normal_family.fundamental import SolutionBasis, fundamental_matrix
from normal_family.geometries import CATALOGUE, cusp_domain, exterior_toy, half_line_toy, strip_laplacian
from normal_family.instances import random_fibre_ode
from normal_family.model import FibreODE, FibreSpec, ModelOperator, adjoint_ode, normal_operator
from normal_family.projectors import (
    ScanReport,
    UCPReport,
    boundary_data_space,
    full_ellipticity_scan,
    minus_boundary_data_space,
    normal_calderon,
    normal_calderon_sweep,
    normal_complementary,
    normal_dn_map,
    normal_gap,
    ode_calderon,
    orthogonal_normal_calderon,
    range_residual,
    ucp_check,
    ucp_check_adjoint,
)
