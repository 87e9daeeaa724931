from discrete_calderon.grids import GridOperator, PhiGrid, discretize, double_geometry, interface_lines
from discrete_calderon.jump import JumpOperator, collar_operator, green_identity_defect, jump_operator
from discrete_calderon.paths import calderon_path_jump, calderon_path_spaces, path_convergence
from discrete_calderon.probes import normal_probe, symbol_probe, truncation_sensitivity
from discrete_calderon.spectra import fibre_slice, plus_shadow_dim, smallest_eigenvalue
from discrete_calderon.suites import run_discrete
from discrete_calderon.traces import TraceResult, one_sided_trace
