import numpy as np
import pytest

import extension_lab.suites as lab_suites
from extension_lab import (
    AbstractBVP,
    augment,
    boundary_space,
    calderon_from_augmented,
    complement_in_minus,
    make_invertible,
    modify_shadow,
    perturb_imag,
    perturb_real,
    restrict_check,
)
from extension_lab.instances import complement_instance, extension_instance, kernel_bvp_instance, shadow_instance
from extension_lab.suites import (
    SUITES,
    augment_suite,
    complement_suite,
    extension_suite,
    proj_inversion_suite,
    shadow_suite,
)
from linalg_core import SubspaceBasis, direct_sum_check, orth_projector, subspace_distance
from linalg_core.errors import GramNotPD, RankDeficient, SideConditionViolated, UCPViolated


# ----------------------------
# AbstractBVP / boundary_space
# ----------------------------

def test_boundary_space_full_and_zero():
    assert boundary_space(AbstractBVP(np.zeros((2, 2)), np.eye(2))).dim == 2
    assert boundary_space(AbstractBVP(np.diag([1.0, 2.0]), np.eye(2))).dim == 0


def test_boundary_space_from_kernel():
    space = boundary_space(AbstractBVP(np.diag([0.0, 1.0, 1.0]), [[1.0, 0.0, 0.0]]))
    assert space.ambient_dim == 1
    assert space.dim == 1


def test_bvp_without_boundary_data():
    b = AbstractBVP(np.zeros((2, 2)), np.zeros((0, 2)))
    assert b.data_dim == 0
    assert boundary_space(b).dim == 0


def test_bvp_rejects_bad_inputs():
    with pytest.raises(RankDeficient):
        AbstractBVP(np.eye(2), [[1.0, 1.0], [2.0, 2.0]])
    with pytest.raises(GramNotPD):
        AbstractBVP(np.eye(2), [[1.0, 0.0]], gram=np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        AbstractBVP(np.eye(2), [[1.0, 0.0]], plus_mask=[True])


# ----------------------------
# augment
# ----------------------------

def test_augment_small_cases():
    np.testing.assert_allclose(augment(np.zeros((1, 1))), np.zeros((2, 2)))
    bar = augment(np.array([[1.0]]))
    np.testing.assert_allclose(bar, [[0, 1], [1, 0]])
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(bar)), [-1.0, 1.0])


def test_augment_intertwines_rectangular(rng):
    t = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    bar = augment(t)
    pi, pi_prime = np.eye(5)[:2], np.eye(5)[2:]
    np.testing.assert_allclose(pi_prime @ bar, t @ pi, atol=1e-14)
    np.testing.assert_allclose(bar @ pi.T, pi_prime.T @ t, atol=1e-14)


def test_augment_self_adjoint_for_gram(rng):
    t = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a = rng.standard_normal((3, 3))
    g = a @ a.T + np.eye(3)
    bar = augment(t, g, g)
    g_bar = np.kron(np.eye(2), g)
    np.testing.assert_allclose(g_bar @ bar, (g_bar @ bar).conj().T, atol=1e-12)


def test_calderon_from_augmented_projects_onto_boundary_space(rng):
    for _ in range(5):
        b = kernel_bvp_instance(rng)
        c = calderon_from_augmented(b)
        assert c.idem_defect <= 1e-10
        assert subspace_distance(SubspaceBasis.span(c.matrix), boundary_space(b)) <= 1e-10


def test_calderon_from_augmented_along_complement(rng):
    b = kernel_bvp_instance(rng, n=5, kernel_dim=2, data_dim=3)
    along = rng.standard_normal((3, 1)) + 0j
    other = rng.standard_normal((3, 1)) + 0j
    complement = SubspaceBasis(np.block([[along, np.zeros((3, 1))], [np.zeros((3, 1)), other]]))
    c = calderon_from_augmented(b, complement)
    np.testing.assert_allclose(c.matrix @ along, 0.0, atol=1e-10)
    assert c.idem_defect <= 1e-10
    assert c.rank == 2


# ----------------------------
# modify_shadow
# ----------------------------

def test_no_shadow_leaves_operator_alone():
    t = np.diag([1.0, 2.0, 0.0])
    mod = modify_shadow(AbstractBVP(t, [[0.0, 0.0, 1.0]]))
    assert mod.shadow_dim == 0
    np.testing.assert_allclose(mod.Pi_sh, 0.0)
    np.testing.assert_allclose(mod.T_mod, t)


def test_two_by_two_shadow():
    mod = modify_shadow(AbstractBVP(np.diag([0.0, 1.0]), [[0.0, 1.0]]))
    np.testing.assert_allclose(mod.T_mod, np.eye(2), atol=1e-14)
    assert mod.boundary_distance == 0.0
    assert mod.shadow_after == 0


def test_designed_shadow_preserves_boundary_space(rng):
    mod = modify_shadow(shadow_instance(rng, n=6, shadow_dim=2))
    assert mod.shadow_dim == 2
    assert mod.shadow_after == 0
    assert mod.boundary_distance <= 1e-10


def test_shadow_meeting_range_is_reported():
    nilpotent = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(SideConditionViolated):
        modify_shadow(AbstractBVP(nilpotent, [[0.0, 1.0]]))


# ----------------------------
# perturb_real / perturb_imag
# ----------------------------

def test_perturbations_direct_sum():
    t, pi = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert perturb_real(t, pi).min_sv == pytest.approx(1.0)
    assert perturb_imag(t, pi).min_sv == pytest.approx(1.0)


def test_imaginary_perturbation_needs_no_direct_sum():
    eye = np.eye(3)
    result = perturb_imag(eye, eye)
    np.testing.assert_allclose(result.matrix, (1 + 1j) * eye)
    assert result.min_sv == pytest.approx(np.sqrt(2.0))


def test_imaginary_perturbation_fails_on_deficient_sum():
    result = perturb_imag(np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 0.0]), alpha=2.0)
    assert result.min_sv <= 1e-14


def test_perturbation_alpha_must_be_positive():
    with pytest.raises(ValueError):
        perturb_real(np.eye(2), np.eye(2), 0.0)
    with pytest.raises(ValueError):
        perturb_imag(np.eye(2), np.eye(2), -1.0)


# ----------------------------
# complement_in_minus
# ----------------------------

SPLIT = AbstractBVP(np.eye(2), [[1.0, 0.0]], plus_mask=[True, False])


def test_complement_of_minus_supported_kernel():
    k = SubspaceBasis(np.array([[0.0], [1.0]]))
    assert subspace_distance(complement_in_minus(k, SPLIT), k) <= 1e-14


def test_complement_of_straddling_kernel():
    w = complement_in_minus(SubspaceBasis(np.array([[1.0], [1.0]])), SPLIT, chi=np.array([0.0, 1.0]))
    assert subspace_distance(w, SubspaceBasis(np.array([[0.0], [1.0]]))) <= 1e-14


def test_plus_supported_kernel_violates_ucp():
    with pytest.raises(UCPViolated):
        complement_in_minus(SubspaceBasis(np.array([[1.0], [0.0]])), SPLIT)


def test_cutoff_must_vanish_on_plus_side():
    with pytest.raises(ValueError):
        complement_in_minus(SubspaceBasis(np.array([[0.0], [1.0]])), SPLIT, chi=np.array([0.5, 1.0]))


def test_random_straddling_kernel_complement(rng):
    b, kernel, chi = complement_instance(rng)
    assert np.abs(kernel.basis[b.plus_mask]).max() > 0.1
    assert np.abs(kernel.basis[b.minus_mask]).max() > 0.1
    w = complement_in_minus(kernel, b, chi)
    assert w.dim == kernel.dim
    assert np.abs(w.basis[b.plus_mask]).max() <= 1e-12
    assert direct_sum_check(w, kernel.complement(b.gram)).gap > 1e-6
    target = SubspaceBasis.span((chi ** 2)[:, None] * kernel.basis)
    assert subspace_distance(w, target) <= 1e-10


# ----------------------------
# make_invertible / restrict_check
# ----------------------------

def test_invertible_operator_needs_nothing():
    ext = make_invertible(AbstractBVP(np.eye(2), [[1.0, 0.0]], plus_mask=[True, False]))
    np.testing.assert_allclose(ext.Pi_sh, 0.0)
    np.testing.assert_allclose(ext.Pi_comp, 0.0)
    assert ext.min_sv == pytest.approx(1.0)


def test_plus_supported_kernel_cannot_be_repaired():
    # the kernel vector e1 carries nonzero data, so it is no shadow, and it never reaches the minus side
    with pytest.raises(UCPViolated):
        make_invertible(AbstractBVP(np.zeros((2, 2)), [[1.0, 0.0]], plus_mask=[True, False]))


def test_designed_extension(rng):
    b = extension_instance(rng)
    ext = make_invertible(b)
    assert ext.min_sv > 1e-8
    assert ext.boundary_distance <= 1e-10
    assert ext.comp_restricts_to_zero
    assert restrict_check(ext.Pi_comp, b.plus_mask)


def test_make_invertible_needs_self_adjoint():
    with pytest.raises(ValueError):
        make_invertible(AbstractBVP(np.array([[0.0, 1.0], [0.0, 0.0]]), [[1.0, 0.0]], plus_mask=[True, False]))


def test_restrict_check():
    mask = np.array([True, True, False])
    assert restrict_check(np.diag([1.0, 2.0, 3.0]), mask)
    assert not restrict_check(np.ones((3, 3)), mask)
    minus_vectors = SubspaceBasis(np.array([[0.0], [0.0], [1.0]]))
    assert restrict_check(orth_projector(minus_vectors).matrix, mask)


# ----------------------------
# seeded suites
# ----------------------------

def test_suites_pass_on_small_seeds():
    suites = (proj_inversion_suite(7, 40), augment_suite(7, 10), shadow_suite(7, 10),
              extension_suite(7, 10), complement_suite(7, 10))
    for rows in suites:
        failed = [r for r in rows if not r.passed]
        assert not failed, failed


def test_suites_are_reproducible():
    first = [r.defect for r in proj_inversion_suite(3, 8)]
    second = [r.defect for r in proj_inversion_suite(3, 8)]
    assert first == second


def test_lab_registers_every_suite_at_full_size():
    assert list(SUITES) == ["proj_inversion", "augment", "modify_shadow", "make_invertible",
                            "complement_in_minus"]
    assert min(lab_suites.AUGMENT_COUNT, lab_suites.SHADOW_COUNT, lab_suites.COMPLEMENT_COUNT,
               lab_suites.EXTENSION_COUNT) >= 100


@pytest.mark.slow
def test_full_lab_suites():
    rows = proj_inversion_suite() + extension_suite() + complement_suite()
    assert all(r.passed for r in rows)
