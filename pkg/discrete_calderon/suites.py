"""
Verification suites of the discrete layer: Green identity of the jump
operator, agreement of the two projector paths, trace stability, discrete
positivity and shadows, and the probe refinement studies.
"""
from typing import List

import numpy as np

from discrete_calderon.grids import PhiGrid, double_geometry
from discrete_calderon.jump import green_identity_defect, random_collar, random_test_pair
from discrete_calderon.paths import path_convergence
from discrete_calderon.probes import PROBE_TOL, decreasing, normal_probe_study, symbol_probe_study
from discrete_calderon.spectra import fibre_slice, plus_shadow_dim, smallest_eigenvalue
from discrete_calderon.traces import one_sided_trace
from linalg_core.errors import TraceUnstable
from normal_family.geometries import half_line_toy, strip_laplacian
from utils.logger import setup_logger
from utils.records import SuiteRow, instance_rng
from utils.settings import DEFAULT_SEED

logger = setup_logger("DiscreteSuites")

# ===== CONFIG =====
GREEN_COUNT = 20
GREEN_TOL = 1e-6
PATH_SLOPE = 1.7
PATH_GAP = 1e-5
TRACE_SPACINGS = (0.1, 0.05, 0.025)
POSITIVITY_NODES = 32
ZERO_EIG_TOL = 1e-8


def green_suite(seed: int = DEFAULT_SEED, count: int = GREEN_COUNT) -> List[SuiteRow]:
    """Random collars of order 1..3 with ρ-dependent leading coefficients."""
    rows = []
    for i in range(count):
        rng = instance_rng(seed, i)
        order, size = 1 + i % 3, 1 + (i // 3) % 2
        collar = random_collar(rng, order, size)
        u, phi = random_test_pair(rng, size)
        defect = green_identity_defect(collar, u, phi)
        rows.append(SuiteRow("green_identity", i, defect <= GREEN_TOL, defect, f"m={order} N={size}"))
    return rows


def path_suite() -> List[SuiteRow]:
    study = path_convergence(half_line_toy(1.0))
    passed = study.slope >= PATH_SLOPE and study.finest_gap <= PATH_GAP
    return [SuiteRow("path_agreement", i, passed, r.gap, f"n_s={r.n_s} slope={study.slope:.2f}")
            for i, r in enumerate(study.rows)]


def trace_suite() -> List[SuiteRow]:
    """Report decay on e^{−ρ}cos ρ at rate ≥ h^m, and a jump seen from the wrong side."""
    reports = []
    for h in TRACE_SPACINGS:
        rho = h * np.arange(1, 6)
        reports.append(one_sided_trace(np.exp(-rho) * np.cos(rho), h).report)
    rate = float(np.polyfit(np.log(TRACE_SPACINGS), np.log(reports), 1)[0])
    rows = [SuiteRow("trace_stability", i, rate >= 2.0, rep, f"h={h} rate={rate:.2f}")
            for i, (h, rep) in enumerate(zip(TRACE_SPACINGS, reports))]

    h = TRACE_SPACINGS[-1]
    rho = h * np.arange(5)
    jumped = np.where(rho == 0.0, 1.0, 0.25 * np.exp(-rho))
    try:
        one_sided_trace(jumped, h, skip=0)
        rows.append(SuiteRow("trace_stability", len(rows), False, 0.0, "jump not detected"))
    except TraceUnstable as e:
        rows.append(SuiteRow("trace_stability", len(rows), True, e.report, "jump detected"))
    return rows


def positivity_suite() -> List[SuiteRow]:
    """Doubled strip with bump is positive; the bump-free τ = 0 slice has constants; no discrete shadows."""
    op = strip_laplacian()
    grid = PhiGrid(op.geometry_tag, POSITIVITY_NODES, 4.0, POSITIVITY_NODES, op.fibre.length)
    rows = []
    lam = smallest_eigenvalue(double_geometry(op, grid))
    rows.append(SuiteRow("positivity", 0, lam > 0, lam, "doubled strip + bump"))
    on = smallest_eigenvalue(fibre_slice(op, grid, 0.0))
    rows.append(SuiteRow("positivity", 1, on > 0, on, "tau=0 slice, bump on"))
    off = smallest_eigenvalue(fibre_slice(op, grid, 0.0, bump_height=0.0))
    rows.append(SuiteRow("positivity", 2, abs(off) <= ZERO_EIG_TOL, off, "tau=0 slice, bump off"))

    small_strip = PhiGrid(op.geometry_tag, 16, 4.0, 16, op.fibre.length)
    toy = half_line_toy(1.0)
    for i, (model, g) in enumerate([(op, small_strip), (toy, PhiGrid(toy.geometry_tag, 32, 4.0))]):
        dim = plus_shadow_dim(model, g)
        rows.append(SuiteRow("positivity", 3 + i, dim == 0, float(dim), f"shadow dim {model.geometry_tag}"))
    return rows


def probe_suite() -> List[SuiteRow]:
    """Normal probe: two successive decreases and the finest error under PROBE_TOL. Symbol probe: trend."""
    op = strip_laplacian()
    normal = normal_probe_study(op)
    ok = decreasing(normal) and normal[-1].error <= PROBE_TOL
    rows = [SuiteRow("normal_probe", i, ok, r.error, f"n={r.n_s} tau={r.frequency}") for i, r in enumerate(normal)]
    symbol = symbol_probe_study(op)
    ok = decreasing(symbol)
    rows += [SuiteRow("symbol_probe", i, ok, r.error, f"n={r.n_s} xi={r.frequency}") for i, r in enumerate(symbol)]
    return rows


def run_discrete(seed: int = DEFAULT_SEED, probes: bool = True) -> List[SuiteRow]:
    suites = [lambda: green_suite(seed), path_suite, trace_suite, positivity_suite]
    if probes:
        suites.append(probe_suite)
    rows = []
    for suite in suites:
        suite_rows = suite()
        failed = sum(not r.passed for r in suite_rows)
        log = logger.warning if failed else logger.info
        log(f"{suite_rows[0].suite}: {len(suite_rows) - failed}/{len(suite_rows)} passed")
        rows.extend(suite_rows)
    return rows
