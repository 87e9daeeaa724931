import numpy as np
import pytest

from linalg_core import SubspaceBasis, orth_projector, projector_from_pair, subspace_distance
from linalg_core.errors import GraphConditionFailed, SingularMatrix, ZeroCovector
from symbol_calculus import (
    Covector,
    PolyMatrixSymbol,
    calderon_symbol,
    companion_matrix,
    complementary_symbol,
    dn_symbol,
    ellipticity_check,
    homogeneity_scaling,
    laplacian_symbol,
    orthogonalize,
    polynomial_roots,
    projector_from_roots,
    random_elliptic_symbol,
    random_symbol,
    random_tangential,
    sign_projector,
    single_root_eigenvalue,
)


def _xi(s):
    return Covector.tangential(zeta_prime=(s,))


def _first_order(c):
    """σ = τ + c·ξ (N = 1, one fibre covariable)."""
    return PolyMatrixSymbol(1, 1, 0, 1, {(1, 0): 1.0, (0, 1): c})


# ----------------------------
# PolyMatrixSymbol / companion
# ----------------------------

def test_singular_leading_coefficient_rejected():
    with pytest.raises(SingularMatrix):
        PolyMatrixSymbol(2, 1, 0, 1, {(0, 2): 1.0})


def test_exponent_above_order_rejected():
    with pytest.raises(ValueError):
        PolyMatrixSymbol(1, 1, 0, 1, {(1, 0): 1.0, (0, 2): 1.0})


def test_laplacian_companion():
    a = companion_matrix(laplacian_symbol(), _xi(3.0))
    np.testing.assert_allclose(a, [[0, 1], [-9, 0]])


def test_first_order_companion():
    sym = PolyMatrixSymbol(1, 1, 0, 1, {(1, 0): 1.0, (0, 0): 2.5})
    np.testing.assert_allclose(companion_matrix(sym, _xi(1.0)), [[-2.5]])


def test_block_first_order_companion(rng):
    m = rng.standard_normal((2, 2))
    sym = PolyMatrixSymbol(1, 2, 0, 1, {(1, 0): np.eye(2), (0, 0): m})
    np.testing.assert_allclose(companion_matrix(sym, _xi(1.0)), -m)


def test_companion_rejects_zero_covector():
    with pytest.raises(ZeroCovector):
        companion_matrix(laplacian_symbol(), _xi(0.0))


# ----------------------------
# calderon_symbol / complementary_symbol
# ----------------------------

@pytest.mark.parametrize("s", [0.25, 1.0, 4.0])
def test_laplacian_calderon_closed_form(s):
    sym = laplacian_symbol()
    c_up = calderon_symbol(sym, _xi(s))
    c_lo = complementary_symbol(sym, _xi(s))
    np.testing.assert_allclose(c_up.matrix, 0.5 * np.array([[1, -1j / s], [1j * s, 1]]), atol=1e-10)
    np.testing.assert_allclose(c_lo.matrix, 0.5 * np.array([[1, 1j / s], [-1j * s, 1]]), atol=1e-10)
    np.testing.assert_allclose(c_up.matrix + c_lo.matrix, np.eye(2), atol=1e-10)


def test_first_order_calderon_is_one_or_zero():
    s = 1.5
    np.testing.assert_allclose(calderon_symbol(_first_order(-1j), _xi(s)).matrix, [[1.0]], atol=1e-10)
    np.testing.assert_allclose(complementary_symbol(_first_order(-1j), _xi(s)).matrix, [[0.0]], atol=1e-10)
    np.testing.assert_allclose(calderon_symbol(_first_order(1j), _xi(s)).matrix, [[0.0]], atol=1e-10)


def test_random_symbols_split_identity(rng):
    for _ in range(20):
        sym = random_symbol(rng)
        xi = random_tangential(rng, sym)
        c_up = calderon_symbol(sym, xi)
        c_lo = complementary_symbol(sym, xi)
        assert c_up.idem_defect <= 1e-9
        size = sym.order * sym.system_size
        np.testing.assert_allclose(c_up.matrix + c_lo.matrix, np.eye(size), atol=1e-9)
        assert c_up.rank + c_lo.rank == size


def test_odd_order_random_symbol_rank(rng):
    # the first-order factor τ + iξH only decays for ξ < 0
    sym = random_elliptic_symbol(rng, 3, 2, 0, 1)
    assert calderon_symbol(sym, _xi(0.8)).rank == 2
    assert calderon_symbol(sym, _xi(-0.8)).rank == 4


def test_sign_projector_matches_riesz(rng):
    for _ in range(5):
        sym = random_symbol(rng)
        xi = random_tangential(rng, sym)
        np.testing.assert_allclose(sign_projector(sym, xi).matrix, calderon_symbol(sym, xi).matrix, atol=1e-8)


# ----------------------------
# Root oracle
# ----------------------------

def test_polynomial_roots_known():
    roots = np.sort_complex(polynomial_roots([2.0, -3.0, 1.0]))
    np.testing.assert_allclose(roots, [1.0, 2.0], atol=1e-12)


def test_root_oracle_agrees_with_riesz(rng):
    for order in (2, 3, 4):
        sym = random_elliptic_symbol(rng, order, 1, 0, 1)
        xi = _xi(float(rng.uniform(0.5, 2.0)))
        oracle, roots = projector_from_roots(sym, xi)
        np.testing.assert_allclose(calderon_symbol(sym, xi).matrix, oracle.matrix, atol=1e-8)

        a = companion_matrix(sym, xi, principal=True)
        gaps = np.abs(roots[:, None] - roots[None, :]) + np.diag(np.full(order, np.inf))
        radius = float(np.min(gaps)) / 3.0
        for root in roots:
            assert abs(single_root_eigenvalue(a, root, radius) - root) <= 1e-8 * max(abs(root), 1.0)


# ----------------------------
# Homogeneity
# ----------------------------

@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_range_transported_by_homogeneity(rng, lam):
    for _ in range(5):
        sym = random_symbol(rng)
        xi = random_tangential(rng, sym)
        base = calderon_symbol(sym, xi).range_space()
        scaled = calderon_symbol(sym, xi.scaled(lam)).range_space()
        transported = SubspaceBasis.span(homogeneity_scaling(sym.order, sym.system_size, lam) @ base.basis)
        assert subspace_distance(scaled, transported) <= 1e-8


# ----------------------------
# dn_symbol
# ----------------------------

@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_dn_symbol_laplacian(s):
    sym = laplacian_symbol()
    assert dn_symbol(sym, _xi(s)) == pytest.approx(s, abs=1e-9)
    assert dn_symbol(sym, _xi(s), "inward") == pytest.approx(-s, abs=1e-9)


def test_dn_symbol_weighted_laplacian():
    sym = laplacian_symbol(weights=(2.0,))
    assert dn_symbol(sym, _xi(1.5)) == pytest.approx(np.sqrt(2) * 1.5, abs=1e-9)


def test_dn_symbol_needs_dirichlet_graph():
    # (τ + iξ)² has no decaying solution, so the range carries no Dirichlet data
    sym = PolyMatrixSymbol(2, 1, 0, 1, {(2, 0): 1.0, (1, 1): 2j, (0, 2): -1.0})
    with pytest.raises(GraphConditionFailed):
        dn_symbol(sym, _xi(1.0))


def test_dn_symbol_rejects_systems():
    with pytest.raises(ValueError):
        dn_symbol(PolyMatrixSymbol(2, 2, 0, 1, {(2, 0): np.eye(2)}), _xi(1.0))


# ----------------------------
# orthogonalize
# ----------------------------

def test_orthogonalize_examples():
    from linalg_core.types import Projector

    c = Projector.certify([[1.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(orthogonalize(c).matrix, np.diag([1.0, 0.0]), atol=1e-14)
    zero = Projector.certify(np.zeros((2, 2)))
    np.testing.assert_allclose(orthogonalize(zero).matrix, 0.0)
    sa = Projector.certify(0.5 * np.ones((2, 2)))
    np.testing.assert_allclose(orthogonalize(sa).matrix, sa.matrix, atol=1e-14)


def test_laplacian_projector_not_orthogonal_off_unit_scale():
    c = calderon_symbol(laplacian_symbol(), _xi(4.0))
    co = orthogonalize(c)
    assert np.linalg.norm(c.matrix - co.matrix) > 0.1
    np.testing.assert_allclose(co.matrix, orth_projector(c.range_space()).matrix, atol=1e-9)
    c_unit = calderon_symbol(laplacian_symbol(), _xi(1.0))
    np.testing.assert_allclose(orthogonalize(c_unit).matrix, c_unit.matrix, atol=1e-9)


def test_orthogonalize_random_projectors(rng):
    for _ in range(30):
        n = int(rng.integers(2, 6))
        r = int(rng.integers(1, n))
        u = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        c = projector_from_pair(SubspaceBasis(u[:, :r]), SubspaceBasis(u[:, r:]))
        h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g = h.conj().T @ h + n * np.eye(n)
        co = orthogonalize(c, g).matrix
        scale = max(np.linalg.norm(c.matrix), 1.0)
        assert np.linalg.norm(co @ co - co) <= 1e-8 * scale
        assert np.linalg.norm((g @ co).conj().T - g @ co) <= 1e-8 * scale * np.linalg.norm(g)
        assert np.linalg.norm(co @ c.matrix - c.matrix) <= 1e-8 * scale
        assert np.linalg.norm(c.matrix @ co - co) <= 1e-8 * scale


# ----------------------------
# ellipticity_check
# ----------------------------

def test_laplacian_is_elliptic():
    report = ellipticity_check(laplacian_symbol(base_dim=1), samples=128)
    assert report.elliptic
    assert report.min_sv == pytest.approx(1.0, abs=1e-9)
    assert report.witness is None


def test_wave_symbol_fails_on_light_cone():
    wave = PolyMatrixSymbol(2, 1, 0, 1, {(2, 0): 1.0, (0, 2): -1.0})
    report = ellipticity_check(wave, samples=30)
    assert not report.elliptic
    w = report.witness
    assert abs(abs(w.tau) - abs(w.zeta_prime[0])) <= 1e-5


def test_cauchy_riemann_is_elliptic():
    report = ellipticity_check(_first_order(1j), samples=64)
    assert report.elliptic
    assert report.min_sv == pytest.approx(1.0, abs=1e-9)


def test_ellipticity_needs_samples():
    with pytest.raises(ValueError):
        ellipticity_check(laplacian_symbol(), samples=0)


# ----------------------------
# seeded suites
# ----------------------------

def test_symbol_suites_pass_on_small_seeds():
    from symbol_calculus.suites import closed_form_suite, dn_suite, orthogonalize_suite, split_suite

    for rows in (dn_suite(5, 10), closed_form_suite(5, 6), split_suite(5, 15), orthogonalize_suite(5, 15)):
        failed = [r for r in rows if not r.passed]
        assert not failed, failed


def test_closed_form_suite_covers_the_three_scales():
    from symbol_calculus.suites import CLOSED_FORM_SCALES, closed_form_suite

    rows = closed_form_suite(1, 2)
    assert len(rows) == len(CLOSED_FORM_SCALES) + 2
    assert all(r.defect <= 1e-10 for r in rows[: len(CLOSED_FORM_SCALES)])
