import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from linalg_core import (
    ContourSpec,
    GramNotPD,
    NotComplementary,
    NotIdempotent,
    Projector,
    SingularMatrix,
    SubspaceBasis,
    direct_sum_check,
    half_plane_projectors,
    intersection,
    lu_solve,
    orth_projector,
    projector_from_pair,
    riesz_projector,
    subspace_distance,
    upper_half_plane_projector,
)
from linalg_core.errors import ContourTooClose


def _random_with_spectrum(rng, eigenvalues):
    n = len(eigenvalues)
    s = np.eye(n) + 0.3 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return s @ np.diag(eigenvalues) @ np.linalg.inv(s)


# ----------------------------
# lu_solve
# ----------------------------

def test_lu_solve_identity_returns_rhs(rng):
    b = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    np.testing.assert_allclose(lu_solve(np.eye(3), b), b)


def test_lu_solve_diagonal_inverse():
    x = lu_solve(np.diag([2.0, 4.0]), np.eye(2))
    np.testing.assert_allclose(x, np.diag([0.5, 0.25]))


def test_lu_solve_residual_on_well_conditioned_system(rng):
    a = np.eye(8) * 4 + rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    x0 = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    x = lu_solve(a, a @ x0)
    assert np.linalg.norm(x - x0) <= 1e-12 * np.linalg.norm(x0)


def test_lu_solve_vector_rhs_keeps_shape():
    x = lu_solve(np.diag([1.0, 2.0]), np.array([1.0, 1.0]))
    assert x.shape == (2,)
    np.testing.assert_allclose(x, [1.0, 0.5])


def test_lu_solve_reports_singular_pivot():
    with pytest.raises(SingularMatrix) as info:
        lu_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.eye(2))
    assert info.value.pivot_index == 1


# ----------------------------
# riesz_projector
# ----------------------------

def test_riesz_diagonal_split():
    c = riesz_projector(np.diag([1j, -1j]), ContourSpec.circle(1j, 0.5))
    np.testing.assert_allclose(c.matrix, np.diag([1.0, 0.0]), atol=1e-10)


def test_riesz_companion_upper_half_plane():
    a = np.array([[0.0, 1.0], [-1.0, 0.0]])
    c_up, c_lo = half_plane_projectors(a)
    np.testing.assert_allclose(c_up.matrix, 0.5 * np.array([[1, -1j], [1j, 1]]), atol=1e-10)
    np.testing.assert_allclose(c_lo.matrix, 0.5 * np.array([[1, 1j], [-1j, 1]]), atol=1e-10)


def test_riesz_full_spectrum_is_identity(rng):
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    radius = 1.0 + np.linalg.norm(a, "fro")
    c = riesz_projector(a, ContourSpec.circle(0.0, radius))
    np.testing.assert_allclose(c.matrix, np.eye(5), atol=1e-10)


def test_riesz_upper_plus_lower_is_identity(rng):
    for _ in range(5):
        re = rng.uniform(-2, 2, 6)
        im = rng.choice([-1, 1], 6) * rng.uniform(0.3, 2.0, 6)
        a = _random_with_spectrum(rng, re + 1j * im)
        c_up, c_lo = half_plane_projectors(a)
        np.testing.assert_allclose(c_up.matrix + c_lo.matrix, np.eye(6), atol=1e-10)
        scale = np.linalg.norm(a, "fro")
        assert np.linalg.norm(c_up.matrix @ a - a @ c_up.matrix, "fro") <= 1e-9 * scale
        assert c_up.rank == int(np.sum(im > 0))


def test_riesz_contour_through_eigenvalue_raises():
    with pytest.raises(ContourTooClose):
        riesz_projector(np.diag([1.0 + 0j, 3.0]), ContourSpec.circle(0.0, 1.0))


def test_sign_iteration_matches_riesz(rng):
    re = rng.uniform(-2, 2, 4)
    im = np.array([0.5, -0.7, 1.2, -0.4])
    a = _random_with_spectrum(rng, re + 1j * im)
    c_up, _ = half_plane_projectors(a)
    np.testing.assert_allclose(upper_half_plane_projector(a).matrix, c_up.matrix, atol=1e-9)


# ----------------------------
# projector_from_pair / direct_sum_check
# ----------------------------

def test_projector_from_coordinate_pair():
    c = projector_from_pair(SubspaceBasis([[1.0], [0.0]]), SubspaceBasis([[0.0], [1.0]]))
    np.testing.assert_allclose(c.matrix, np.diag([1.0, 0.0]))


@pytest.mark.parametrize("s", [0.25, 1.0, 4.0])
def test_projector_from_decaying_pair(s):
    c = projector_from_pair(SubspaceBasis([[1.0], [1j * s]]), SubspaceBasis([[1.0], [-1j * s]]))
    expected = 0.5 * np.array([[1, -1j / s], [1j * s, 1]])
    np.testing.assert_allclose(c.matrix, expected, atol=1e-12)
    assert c.rank == 1


def test_projector_from_degenerate_pair_raises():
    e1 = SubspaceBasis([[1.0], [0.0]])
    with pytest.raises(NotComplementary):
        projector_from_pair(e1, e1)


def test_projector_from_pair_is_identity_on_range(rng):
    r = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    k = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    c = projector_from_pair(SubspaceBasis(r), SubspaceBasis(k))
    np.testing.assert_allclose(c.matrix @ r, r, atol=1e-10)
    np.testing.assert_allclose(c.matrix @ k, 0, atol=1e-10)
    assert c.rank == 2


def test_direct_sum_examples():
    e1 = SubspaceBasis([[1.0], [0.0]])
    e2 = SubspaceBasis([[0.0], [1.0]])
    report = direct_sum_check(e1, e2)
    assert report.is_direct_sum and report.gap == pytest.approx(1.0)
    assert not direct_sum_check(e1, e1).is_direct_sum
    plus = SubspaceBasis([[1.0], [1j]])
    minus = SubspaceBasis([[1.0], [-1j]])
    report = direct_sum_check(plus, minus)
    assert report.is_direct_sum and report.gap > 0


def test_direct_sum_wrong_dimension_count():
    e1 = SubspaceBasis([[1.0], [0.0], [0.0]])
    e2 = SubspaceBasis([[0.0], [1.0], [0.0]])
    assert not direct_sum_check(e1, e2).is_direct_sum


# ----------------------------
# orth_projector
# ----------------------------

def test_orth_projector_examples():
    c = orth_projector(SubspaceBasis([[1.0], [0.0], [0.0]]))
    np.testing.assert_allclose(c.matrix, np.diag([1.0, 0.0, 0.0]))
    c = orth_projector(SubspaceBasis([[1.0], [1.0]]))
    np.testing.assert_allclose(c.matrix, 0.5 * np.ones((2, 2)))


def test_orth_projector_weighted_gram():
    g = np.diag([1.0, 4.0])
    c = orth_projector(SubspaceBasis([[1.0], [1.0]]), g).matrix
    np.testing.assert_allclose(c, np.array([[0.2, 0.8], [0.2, 0.8]]), atol=1e-14)
    np.testing.assert_allclose(c @ c, c, atol=1e-14)
    np.testing.assert_allclose((g @ c).conj().T, g @ c, atol=1e-14)


def test_orth_projector_rejects_indefinite_gram():
    with pytest.raises(GramNotPD):
        orth_projector(SubspaceBasis([[1.0], [0.0]]), np.diag([1.0, -1.0]))


@seed(7)
@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(
    u=arrays(np.float64, (5, 2), elements=st.floats(min_value=-1.0, max_value=1.0)),
    weights=arrays(np.float64, (5,), elements=st.floats(min_value=0.1, max_value=10.0)),
)
def test_orth_projector_properties(u, weights):
    sv = np.linalg.svd(u, compute_uv=False)
    assume(sv[0] > 1e-2 and sv[-1] > 0.05 * sv[0])
    g = np.diag(weights)
    c = orth_projector(SubspaceBasis(u), g).matrix
    np.testing.assert_allclose(c @ c, c, atol=1e-10)
    np.testing.assert_allclose((g @ c).conj().T, g @ c, atol=1e-10)
    np.testing.assert_allclose(c @ u, u, atol=1e-10)


def test_subspace_distance_zero_for_same_span(rng):
    b = rng.standard_normal((4, 2))
    mix = np.array([[2.0, 1.0], [0.5, -1.0]])
    assert subspace_distance(SubspaceBasis(b), SubspaceBasis(b @ mix)) < 1e-12


# ----------------------------
# intersection
# ----------------------------

def test_intersection_of_coordinate_planes():
    xy = SubspaceBasis(np.eye(3)[:, :2])
    yz = SubspaceBasis(np.eye(3)[:, 1:])
    shared = intersection(xy, yz)
    assert shared.dim == 1
    assert subspace_distance(shared, SubspaceBasis(np.eye(3)[:, [1]])) < 1e-12


def test_intersection_of_generic_subspaces_is_zero(rng):
    u = SubspaceBasis(rng.standard_normal((5, 2)))
    v = SubspaceBasis(rng.standard_normal((5, 3)))
    assert intersection(u, v).dim == 0
    assert intersection(u, SubspaceBasis.zero(5)).dim == 0


def test_intersection_recovers_planted_direction(rng):
    shared = rng.standard_normal((6, 1)) + 1j * rng.standard_normal((6, 1))
    u = SubspaceBasis(np.hstack([shared, rng.standard_normal((6, 1))]))
    v = SubspaceBasis(np.hstack([rng.standard_normal((6, 2)), 3.0 * shared]))
    assert subspace_distance(intersection(u, v), SubspaceBasis(shared)) < 1e-10


# ----------------------------
# Projector.certify
# ----------------------------

def test_certify_records_defect_without_tolerance():
    c = Projector.certify([[1.0, 0.0], [0.0, 0.5]])
    assert c.idem_defect == pytest.approx(0.25 / np.sqrt(1.25))


def test_certify_raises_above_tolerance():
    with pytest.raises(NotIdempotent) as info:
        Projector.certify([[1.0, 0.0], [0.0, 0.5]], tol=1e-8)
    assert info.value.idem_defect == pytest.approx(0.25 / np.sqrt(1.25))
    assert info.value.tol == 1e-8


def test_certify_accepts_projector_within_tolerance():
    c = Projector.certify([[1.0, 1.0], [0.0, 0.0]], tol=1e-12)
    assert c.idem_defect == 0.0
