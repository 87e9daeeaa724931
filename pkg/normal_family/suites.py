"""
Seeded suites on the normal family: closed-form strip data spaces, the
bump-on / bump-off behaviour of the doubled fibre at τ = 0, and the
unique-continuation check on random fibre ODEs and their adjoints, and
the range of the normal projector against integrated solution data.
"""
from typing import List

import numpy as np

from linalg_core.errors import CalderonError, NotComplementary
from linalg_core.subspaces import direct_sum_check, subspace_distance
from linalg_core.types import SubspaceBasis
from normal_family.extension import FibreExtension
from normal_family.fundamental import fundamental_matrix
from normal_family.geometries import strip_laplacian
from normal_family.instances import random_fibre_ode
from normal_family.model import normal_operator
from normal_family.projectors import (
    boundary_data_space,
    minus_boundary_data_space,
    normal_calderon,
    ode_calderon,
    range_residual,
    ucp_check,
    ucp_check_adjoint,
)
from utils.logger import setup_logger
from utils.records import SuiteRow, instance_rng
from utils.settings import DEFAULT_SEED

logger = setup_logger("NormalSuites")

# ===== CONFIG =====
STRIP_TAUS = (0.5, 1.0, 2.0)
SPACE_TOL = 1e-8
IDEM_TOL = 1e-8
STRIP_BUMP_HEIGHT = 4.0
BUMP_GAP = 5e-2
UCP_COUNT = 50
RANGE_COUNT = 50
RANGE_TOL = 1e-7
RANGE_DRAWS = 4


def strip_plus_data(tau: float, length: float = 1.0) -> np.ndarray:
    """γ cosh(τz) and γ sinh(τz) on [0, L] as columns, data (u, D_z u) at both ends."""
    c, s = np.cosh(tau * length), np.sinh(tau * length)
    return np.array([
        [1.0, 0.0, c, -1j * tau * s],
        [0.0, -1j * tau, s, -1j * tau * c],
    ]).T


def strip_suite(bump_height: float = STRIP_BUMP_HEIGHT) -> List[SuiteRow]:
    op = strip_laplacian()
    rows = []
    for i, tau in enumerate(STRIP_TAUS):
        plus = boundary_data_space(normal_operator(op, tau))
        distance = subspace_distance(plus, SubspaceBasis(strip_plus_data(tau)))
        idem = normal_calderon(op, tau, FibreExtension(bump_height=bump_height)).idem_defect
        passed = distance <= SPACE_TOL and idem <= IDEM_TOL
        rows.append(SuiteRow("strip_normal", i, passed, distance, f"tau={tau} idem={idem:.1e}"))

    try:
        normal_calderon(op, 0.0, FibreExtension(bump_height=0.0))
        rows.append(SuiteRow("strip_normal", len(rows), False, 0.0, "bump off at tau=0: no failure"))
    except NotComplementary as e:
        rows.append(SuiteRow("strip_normal", len(rows), True, e.gap, "bump off at tau=0: not complementary"))

    ode = normal_operator(op, 0.0)
    report = direct_sum_check(boundary_data_space(ode),
                              minus_boundary_data_space(ode, FibreExtension(bump_height=bump_height)))
    passed = report.is_direct_sum and report.gap > BUMP_GAP
    rows.append(SuiteRow("strip_normal", len(rows), passed, report.gap, f"bump {bump_height} at tau=0"))
    return rows


def ucp_suite(seed: int = DEFAULT_SEED, count: int = UCP_COUNT) -> List[SuiteRow]:
    rows = []
    for i in range(count):
        ode = random_fibre_ode(instance_rng(seed, i))
        shadows = ucp_check(ode).dim_shadow + ucp_check_adjoint(ode).dim_shadow
        rows.append(SuiteRow("ucnf", i, shadows == 0, float(shadows), f"N={ode.system_size} tau={ode.mu[0]:.3f}"))
    return rows


def range_suite(seed: int = DEFAULT_SEED, count: int = RANGE_COUNT) -> List[SuiteRow]:
    """Range of the normal projector against integrated solution data on random fibre ODEs."""
    return [_range_row(seed, i) for i in range(count)]


def _range_row(seed: int, i: int) -> SuiteRow:
    rng = instance_rng(seed, i)
    for _ in range(RANGE_DRAWS):
        ode = random_fibre_ode(rng)
        try:
            c = ode_calderon(ode, range_tol=np.inf)
        except NotComplementary:
            continue
        except CalderonError as e:
            return SuiteRow("normal_range", i, False, np.inf, type(e).__name__)
        residual = range_residual(c, fundamental_matrix(ode))
        return SuiteRow("normal_range", i, residual <= RANGE_TOL, residual,
                        f"N={ode.system_size} tau={ode.mu[0]:.3f}")
    return SuiteRow("normal_range", i, False, np.inf, "no complementary draw")


def run_normal(seed: int = DEFAULT_SEED) -> List[SuiteRow]:
    rows = []
    for suite in (strip_suite, lambda: ucp_suite(seed), lambda: range_suite(seed)):
        suite_rows = suite()
        failed = sum(not r.passed for r in suite_rows)
        log = logger.warning if failed else logger.info
        log(f"{suite_rows[0].suite}: {len(suite_rows) - failed}/{len(suite_rows)} passed")
        rows.extend(suite_rows)
    return rows
