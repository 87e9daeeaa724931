import numpy as np
import pytest

from discrete_calderon import (
    PhiGrid,
    calderon_path_jump,
    calderon_path_spaces,
    collar_operator,
    discretize,
    double_geometry,
    fibre_slice,
    green_identity_defect,
    interface_lines,
    jump_operator,
    normal_probe,
    one_sided_trace,
    path_convergence,
    plus_shadow_dim,
    smallest_eigenvalue,
    symbol_probe,
    truncation_sensitivity,
)
from discrete_calderon.grids import dirichlet_derivatives
from discrete_calderon.jump import random_collar, random_test_pair
from discrete_calderon.paths import side_space
from discrete_calderon.probes import decreasing, discrete_projector, normal_probe_study, symbol_probe_study
from discrete_calderon.suites import green_suite, trace_suite
from linalg_core.errors import GeometryMismatch, TraceUnstable
from normal_family import FibreODE, exterior_toy, half_line_toy, strip_laplacian
from normal_family.model import FibreSpec, ModelOperator


def _strip_grid(n=16, S=4.0):
    return PhiGrid("StripHyperbolic", n, S, n, 1.0)


def _toy_grid(n=64, S=8.0):
    return PhiGrid("HalfLineToy", n, S)


# ----------------------------
# PhiGrid / discretize
# ----------------------------

def test_grid_validation():
    with pytest.raises(ValueError):
        PhiGrid("HalfLineToy", 64, 3.0)
    with pytest.raises(ValueError):
        PhiGrid("HalfLineToy", 8, 8.0)
    with pytest.raises(ValueError):
        PhiGrid("StripHyperbolic", 32, 4.0, 8, 1.0)


def test_truncation_keeps_spacing():
    grid = PhiGrid("HalfLineToy", 30, 4.0)
    longer = grid.with_truncation(8.0)
    assert longer.n_s == 70
    assert longer.h_s == pytest.approx(grid.h_s)


def test_strip_laplacian_is_five_point():
    grid = _strip_grid()
    op = discretize(strip_laplacian(), grid)
    _, d2_s = dirichlet_derivatives(grid.n_s, grid.h_s)
    _, d2_z = dirichlet_derivatives(grid.n_z + 1, grid.h_z)
    expected = -np.kron(d2_s.toarray(), np.eye(grid.n_z + 1)) - np.kron(np.eye(grid.n_s), d2_z.toarray())
    np.testing.assert_allclose(op.matrix.toarray(), expected, atol=1e-10)
    assert np.all(op.gram > 0)


def test_half_line_toy_is_tridiagonal():
    grid = PhiGrid("HalfLineToy", 16, 4.0)
    a = discretize(half_line_toy(2.0), grid).matrix.toarray()
    h = grid.h_s
    np.testing.assert_allclose(np.diag(a), 2 / h ** 2 + 2.0)
    np.testing.assert_allclose(np.diag(a, 1), -1 / h ** 2)
    np.testing.assert_allclose(np.triu(a, 2), 0.0)


def test_geometry_mismatch():
    with pytest.raises(GeometryMismatch):
        discretize(exterior_toy(), PhiGrid("ExteriorToy", 16, 4.0))
    with pytest.raises(GeometryMismatch):
        discretize(strip_laplacian(), PhiGrid("StripHyperbolic", 16, 4.0))
    with pytest.raises(GeometryMismatch):
        discretize(half_line_toy(), _strip_grid())


# ----------------------------
# double_geometry
# ----------------------------

@pytest.mark.parametrize("op,grid", [
    (strip_laplacian(), _strip_grid()),
    (half_line_toy(1.0), _toy_grid(32)),
])
def test_plus_block_of_doubled_operator_is_the_operator(op, grid):
    doubled = double_geometry(op, grid)
    np.testing.assert_allclose(doubled.plus_restriction().toarray(), discretize(op, grid).matrix.toarray())


def test_doubled_strip_is_positive_and_hermitian():
    doubled = double_geometry(strip_laplacian(), _strip_grid(32))
    a = doubled.total().toarray()
    np.testing.assert_allclose(a, a.conj().T, atol=1e-10)
    assert smallest_eigenvalue(doubled) > 0


def test_fibre_slice_needs_the_bump_at_zero_tau():
    op, grid = strip_laplacian(), _strip_grid(32)
    assert smallest_eigenvalue(fibre_slice(op, grid, 0.0)) > 1e-3
    assert abs(smallest_eigenvalue(fibre_slice(op, grid, 0.0, bump_height=0.0))) <= 1e-8


def test_lab_fix_on_invertible_toy():
    doubled = double_geometry(half_line_toy(1.0), PhiGrid("HalfLineToy", 16, 4.0), fix="lab")
    np.testing.assert_allclose(doubled.fix, 0.0, atol=1e-12)
    assert np.linalg.svd(doubled.total().toarray(), compute_uv=False)[-1] > 1e-6


def test_unknown_fix_rejected():
    with pytest.raises(ValueError):
        double_geometry(half_line_toy(), _toy_grid(), fix="other")


def test_no_discrete_shadows():
    assert plus_shadow_dim(half_line_toy(1.0), PhiGrid("HalfLineToy", 32, 4.0)) == 0
    assert plus_shadow_dim(strip_laplacian(), _strip_grid()) == 0


def test_interface_lines_need_doubled_grid():
    with pytest.raises(ValueError):
        interface_lines(_toy_grid(), 2)


# ----------------------------
# jump_operator
# ----------------------------

def _ode(coeffs):
    c = np.asarray(coeffs, dtype=complex)
    return FibreODE(c.shape[0] - 1, 1, (0.0, 1.0), c.reshape(c.shape[0], -1, 1, 1))


def test_jump_of_constant_second_order():
    j = jump_operator(_ode([[0.25], [0.0], [1.0]]))
    np.testing.assert_allclose(j.matrix(), -1j * np.array([[0, 1], [1, 0]]))
    assert j.entry_order(0, 0) == 1
    assert j.entry_order(1, 1) < 0


def test_jump_of_first_order():
    np.testing.assert_allclose(jump_operator(_ode([[0.0], [1.0]])).matrix(), [[-1j]])


def test_jump_picks_up_leading_slope():
    j = jump_operator(_ode([[1.0, 0.0], [0.0, 0.0], [1.0, 0.5]]))
    assert j.matrix()[0, 0] == pytest.approx(0.5)
    assert j.matrix()[0, 1] == pytest.approx(-1j)


def test_collar_of_half_line_toy():
    j = jump_operator(collar_operator(half_line_toy(3.0)))
    np.testing.assert_allclose(j.matrix(), -1j * np.array([[0, 1], [1, 0]]), atol=1e-14)


def test_collar_at_the_far_end_is_reflected():
    start = collar_operator(strip_laplacian(2.0), 1.0, "start")
    end = collar_operator(strip_laplacian(2.0), 1.0, "end")
    np.testing.assert_allclose(end.coefficients, start.coefficients, atol=1e-14)
    with pytest.raises(GeometryMismatch):
        collar_operator(half_line_toy(), 0.0, "end")


@pytest.mark.parametrize("order,size", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)])
def test_green_identity(rng, order, size):
    for _ in range(4):
        collar = random_collar(rng, order, size)
        u, phi = random_test_pair(rng, size)
        assert green_identity_defect(collar, u, phi) <= 1e-10


def test_green_suite_passes():
    assert all(r.passed for r in green_suite(11, 6))


# ----------------------------
# one_sided_trace
# ----------------------------

def test_trace_of_cubic_is_exact():
    h = 0.1
    rho = h * np.arange(1, 6)
    v = 1.0 + 2.0 * rho - rho ** 2 + 0.5 * rho ** 3
    result = one_sided_trace(v, h)
    np.testing.assert_allclose(result.jets, [1.0, -2j], atol=1e-10)
    assert result.report <= 1e-10
    np.testing.assert_allclose(one_sided_trace(v, h, sign=-1.0).jets, [1.0, 2j], atol=1e-10)


def test_trace_carries_trailing_axes():
    rho = 0.05 * np.arange(1, 6)
    values = np.stack([np.exp(-rho), np.exp(-2 * rho), np.cos(rho)], axis=1)
    assert one_sided_trace(values, 0.05).jets.shape == (2, 3)


def test_trace_flags_a_jump():
    h = 0.05
    rho = h * np.arange(5)
    with pytest.raises(TraceUnstable):
        one_sided_trace(np.where(rho == 0.0, 1.0, 0.25 * np.exp(-rho)), h, skip=0)


def test_trace_needs_enough_samples():
    with pytest.raises(ValueError):
        one_sided_trace(np.ones(4), 0.1)


def test_trace_suite_passes():
    assert all(r.passed for r in trace_suite())


# ----------------------------
# Calderón paths
# ----------------------------

def test_path_spaces_on_half_line_toy():
    c = calderon_path_spaces(double_geometry(half_line_toy(1.0), _toy_grid(128)))
    assert c.size == 2
    assert c.rank == 1
    assert c.idem_defect <= 1e-10
    r = c.range_space().basis[:, 0]
    # decaying solution e^{-(s-1)}: D_s u = i u
    assert r[1] / r[0] == pytest.approx(1j, abs=2e-2)


def test_path_spaces_on_strip_has_half_rank():
    c = calderon_path_spaces(double_geometry(strip_laplacian(), _strip_grid()))
    assert c.size == 2 * 2 * 16
    assert c.rank == 32
    assert c.idem_defect <= 1e-8


def test_decoupled_system_gives_block_diagonal_projector():
    op = ModelOperator(2, 2, 0, FibreSpec("point", 0.0),
                       {(2, (), ()): {(0, 0): np.eye(2)}, (0, (), ()): {(0, 0): np.diag([1.0, 4.0])}},
                       "HalfLineToy")
    c = calderon_path_spaces(double_geometry(op, _toy_grid()))
    np.testing.assert_allclose(c.matrix[np.ix_([0, 2], [1, 3])], 0.0, atol=1e-10)
    np.testing.assert_allclose(c.matrix[np.ix_([1, 3], [0, 2])], 0.0, atol=1e-10)


def test_paths_agree_on_half_line_toy():
    op = half_line_toy(1.0)
    doubled = double_geometry(op, _toy_grid(256))
    c_spaces = calderon_path_spaces(doubled)
    c_jump = calderon_path_jump(doubled, jump_operator(collar_operator(op)))
    assert np.linalg.norm(c_jump.matrix - c_spaces.matrix) <= 1e-3


def test_plus_solution_data_is_reproduced():
    op = half_line_toy(1.0)
    doubled = double_geometry(op, _toy_grid(256))
    data = side_space(doubled, "plus").basis[:, 0]
    c_spaces = calderon_path_spaces(doubled)
    c_jump = calderon_path_jump(doubled, jump_operator(collar_operator(op)))
    np.testing.assert_allclose(c_spaces.apply(data), data, atol=1e-10)
    np.testing.assert_allclose(c_jump.apply(data), data, atol=1e-3)


def test_path_gap_converges_at_second_order():
    study = path_convergence(half_line_toy(1.0), sizes=(128, 256, 512))
    assert study.slope >= 1.7
    assert all(r.idem_spaces <= 1e-10 for r in study.rows)


def test_jump_path_rejects_interval_fibres():
    op = strip_laplacian()
    doubled = double_geometry(op, _strip_grid())
    with pytest.raises(GeometryMismatch):
        calderon_path_jump(doubled, jump_operator(collar_operator(op, 0.0)))


@pytest.mark.slow
def test_path_agreement_at_acceptance_grids():
    study = path_convergence(half_line_toy(1.0))
    assert study.slope >= 1.7
    assert study.finest_gap <= 1e-5


# ----------------------------
# Probes
# ----------------------------

def test_zero_data_gives_zero_output():
    op, grid = strip_laplacian(), _strip_grid(32)
    c = discrete_projector(op, grid)
    result = symbol_probe(op, c, grid, 4.0, pattern=np.zeros(2))
    assert result.error == 0.0


@pytest.mark.slow
def test_normal_probe_reports_finite_error():
    op, grid = strip_laplacian(), PhiGrid("StripHyperbolic", 32, 12.0, 32, 1.0)
    result = normal_probe(op, discrete_projector(op, grid), grid, 1.0)
    assert np.isfinite(result.error)
    assert result.n_s == 32


def test_truncation_sensitivity_report():
    grid = PhiGrid("HalfLineToy", 30, 4.0)
    report = truncation_sensitivity(lambda g: float(np.exp(-g.S)), grid)
    assert report.value_extended == pytest.approx(np.exp(-8.0))
    assert report.difference == pytest.approx(np.exp(-4.0) - np.exp(-8.0))


@pytest.mark.slow
def test_normal_probe_converges_on_strip():
    results = normal_probe_study(strip_laplacian())
    assert decreasing(results)
    assert results[-1].error <= 5e-2


@pytest.mark.slow
def test_symbol_probe_improves_under_joint_refinement():
    assert decreasing(symbol_probe_study(strip_laplacian()))
