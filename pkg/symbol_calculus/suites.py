"""
Seeded suites at the principal-symbol level: closed forms of the Laplacian,
the root oracle, complementarity of random elliptic symbols and
orthogonalization.
"""
from typing import List

import numpy as np

from linalg_core.subspaces import projector_from_pair, subspace_distance
from linalg_core.types import SubspaceBasis, fro
from symbol_calculus.calderon import calderon_symbol, complementary_symbol, dn_symbol, orthogonalize, sign_projector
from symbol_calculus.companion import homogeneity_scaling
from symbol_calculus.random_symbols import random_elliptic_symbol, random_symbol, random_tangential
from symbol_calculus.root_finder import projector_from_roots
from symbol_calculus.symbols import Covector, laplacian_symbol
from utils.logger import setup_logger
from utils.records import SuiteRow, instance_rng
from utils.settings import DEFAULT_SEED

logger = setup_logger("SymbolSuites")

# ===== CONFIG =====
DN_COUNT = 50
CLOSED_FORM_SCALES = (0.25, 1.0, 4.0)
CLOSED_FORM_TOL = 1e-10
ORACLE_COUNT = 12
ORACLE_TOL = 1e-8
SPLIT_COUNT = 200
SPLIT_TOL = 1e-9
SIGN_TOL = 1e-8
HOMOGENEITY_SCALES = (0.5, 3.0)
ORTHO_COUNT = 100
ORTHO_TOL = 1e-9


def dn_suite(seed: int = DEFAULT_SEED, count: int = DN_COUNT) -> List[SuiteRow]:
    """dn_symbol(τ² + |ξ′|², outward) = |ξ′| for ξ′ ∈ R²."""
    sym = laplacian_symbol(0, 2)
    rows = []
    for i in range(count):
        rng = instance_rng(seed, i)
        xi = Covector.tangential(zeta_prime=rng.uniform(-4.0, 4.0, 2))
        norm = xi.tangential_norm()
        defect = abs(dn_symbol(sym, xi) - norm) / max(norm, 1.0)
        rows.append(SuiteRow("dn_symbol", i, defect <= CLOSED_FORM_TOL, defect, f"|xi'|={norm:.4f}"))
    return rows


def closed_form_suite(seed: int = DEFAULT_SEED, count: int = ORACLE_COUNT) -> List[SuiteRow]:
    """Laplacian projector against ½[[1, −i/s], [is, 1]], then scalar symbols against the root oracle."""
    rows = []
    for i, s in enumerate(CLOSED_FORM_SCALES):
        c = calderon_symbol(laplacian_symbol(), Covector.tangential(zeta_prime=(s,)))
        expected = 0.5 * np.array([[1.0, -1j / s], [1j * s, 1.0]])
        defect = float(np.abs(c.matrix - expected).max())
        rows.append(SuiteRow("calderon_closed_form", i, defect <= CLOSED_FORM_TOL, defect, f"laplacian s={s}"))

    offset = len(rows)
    for i in range(count):
        rng = instance_rng(seed, i)
        order = 2 + i % 3
        sym = random_elliptic_symbol(rng, order, 1, 0, 1)
        xi = Covector.tangential(zeta_prime=(float(rng.uniform(0.5, 2.0)),))
        oracle, _ = projector_from_roots(sym, xi)
        defect = fro(calderon_symbol(sym, xi).matrix - oracle.matrix)
        rows.append(SuiteRow("calderon_closed_form", offset + i, defect <= ORACLE_TOL, defect,
                             f"root oracle m={order}"))
    return rows


def split_suite(seed: int = DEFAULT_SEED, count: int = SPLIT_COUNT) -> List[SuiteRow]:
    """
    C⁺ + C⁻ = I and idempotence for random elliptic symbols, the sign-function
    cross-check, and transport of the range under ξ′ ↦ λξ′.
    """
    rows = []
    for i in range(count):
        rng = instance_rng(seed, i)
        sym = random_symbol(rng)
        xi = random_tangential(rng, sym)
        c_up = calderon_symbol(sym, xi)
        c_lo = complementary_symbol(sym, xi)
        size = sym.order * sym.system_size
        split = fro(c_up.matrix + c_lo.matrix - np.eye(size))
        sign = fro(sign_projector(sym, xi).matrix - c_up.matrix)

        lam = HOMOGENEITY_SCALES[i % len(HOMOGENEITY_SCALES)]
        scaled = calderon_symbol(sym, xi.scaled(lam)).range_space()
        transported = homogeneity_scaling(sym.order, sym.system_size, lam) @ c_up.range_space().basis
        moved = subspace_distance(scaled, SubspaceBasis.span(transported))

        passed = max(split, c_up.idem_defect) <= SPLIT_TOL and max(sign, moved) <= SIGN_TOL
        note = f"m={sym.order} N={sym.system_size} b={sym.base_dim} sign={sign:.1e} homogeneity={moved:.1e}"
        rows.append(SuiteRow("complementarity", i, passed, max(split, c_up.idem_defect), note))
    return rows


def orthogonalize_suite(seed: int = DEFAULT_SEED, count: int = ORTHO_COUNT) -> List[SuiteRow]:
    """C_o idempotent, gram-self-adjoint and with the range of C, for random oblique projectors and grams."""
    rows = []
    for i in range(count):
        rng = instance_rng(seed, i)
        n = int(rng.integers(2, 6))
        r = int(rng.integers(1, n))
        u = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        c = projector_from_pair(SubspaceBasis(u[:, :r]), SubspaceBasis(u[:, r:]))
        h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g = h.conj().T @ h + n * np.eye(n)
        co = orthogonalize(c, g).matrix
        scale = max(fro(c.matrix), 1.0)
        gco = g @ co
        defects = (
            fro(co @ co - co) / scale,
            fro(gco.conj().T - gco) / (scale * fro(g)),
            fro(co @ c.matrix - c.matrix) / scale,
            fro(c.matrix @ co - co) / scale,
        )
        rows.append(SuiteRow("orthogonalize", i, max(defects) <= ORTHO_TOL, max(defects), f"n={n} rank={r}"))
    return rows


SUITES = {
    "dn_symbol": dn_suite,
    "calderon_closed_form": closed_form_suite,
    "complementarity": split_suite,
    "orthogonalize": orthogonalize_suite,
}


def run_symbol(seed: int = DEFAULT_SEED) -> List[SuiteRow]:
    rows = []
    for name, suite in SUITES.items():
        suite_rows = suite(seed)
        failed = sum(not r.passed for r in suite_rows)
        log = logger.warning if failed else logger.info
        log(f"{name}: {len(suite_rows) - failed}/{len(suite_rows)} passed")
        rows.extend(suite_rows)
    return rows
