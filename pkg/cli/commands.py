"""
Runners behind the symbol, normal, lab and discrete subcommands. Each takes
the model operator (where one is needed) and the merged RunConfig, writes
its tables under run.out and returns the process exit status.
"""
import os
from typing import Dict, List

import numpy as np

from cli.config import RunConfig
from cli.reports import matrix_entries, write_matrix, write_suite_rows, write_table
from discrete_calderon.grids import PhiGrid, double_geometry
from discrete_calderon.jump import collar_operator, jump_operator
from discrete_calderon.paths import PATH_S, PATH_SIZES, calderon_path_jump, path_convergence
from discrete_calderon.probes import PROBE_BUMP_HEIGHT, PROBE_S, PROBE_SIZES, discrete_projector, normal_probe
from extension_lab.suites import run_lab
from linalg_core.errors import CalderonError, GraphConditionFailed, PointFibre, SchemaError
from normal_family.extension import FibreExtension
from normal_family.model import ModelOperator
from normal_family.projectors import normal_calderon_sweep, normal_gap
from symbol_calculus.calderon import calderon_symbol, dn_symbol
from symbol_calculus.symbols import Covector
from utils.logger import log_section, setup_logger

logger = setup_logger("Commands")

# ===== CONFIG =====
INTERIOR_X = 0.5
MATRIX_MAX_DIM = 512


# ----------------------------
# symbol
# ----------------------------

def _covectors(run: RunConfig, base_dim: int, tangent_dim: int) -> List[Covector]:
    if not tangent_dim:
        raise SchemaError("run.xi", "operator has no tangential covariable")
    grid = run.xi or [[1.0] * tangent_dim]
    out = []
    for i, xi in enumerate(grid):
        if len(xi) != tangent_dim:
            raise SchemaError(f"run.xi.{i}", f"expected {tangent_dim} components, got {len(xi)}")
        out.append(Covector.tangential(eta=xi[:base_dim], zeta_prime=xi[base_dim:]))
    return out


def symbol_command(op: ModelOperator, run: RunConfig) -> int:
    """
    Calderón projector of the principal symbol frozen at an interior point
    (x = INTERIOR_X, mid-fibre), with τ as the transversal covariable, for
    each ξ′ of the run. DN symbol added for scalar second-order operators.
    """
    log_section(logger, "Symbol")
    sym = op.symbol_at(INTERIOR_X, 0.5 * op.fibre_length)
    scalar = sym.order == 2 and sym.system_size == 1
    records = []
    for xi in _covectors(run, sym.base_dim, sym.tangent_dim):
        row: Dict = {f"xi_{j}": v for j, v in enumerate(xi.tangential_array())}
        try:
            c = calderon_symbol(sym, xi)
        except CalderonError as e:
            logger.warning(f"No symbol projector at xi'={tuple(xi.tangential_array())}: {e}")
            records.append({**row, "status": type(e).__name__})
            continue
        row.update({"status": "ok", "rank": c.rank, "idem_defect": c.idem_defect})
        if scalar:
            try:
                dn = dn_symbol(sym, xi)
                row.update({"dn_re": dn.real, "dn_im": dn.imag})
            except GraphConditionFailed:
                row.update({"dn_re": np.nan, "dn_im": np.nan})
        row.update(matrix_entries(c.matrix))
        records.append(row)
    write_table(records, os.path.join(run.out, "symbol.csv"))
    return 0


# ----------------------------
# normal
# ----------------------------

def normal_command(op: ModelOperator, run: RunConfig) -> int:
    """Per-τ normal-family projectors (η = 0) and the list of τ where B⁺ ⊕ B⁻ fails."""
    log_section(logger, "Normal family")
    if not op.fibre.dim:
        raise PointFibre()
    ext = FibreExtension(bump_height=run.bump_height)
    eta = (0.0,) * op.base_dim
    mus = [(tau, eta) for tau in run.tau_grid()]
    sweep = normal_calderon_sweep(op, mus, ext)

    records = []
    for mu in mus:
        key = (mu[0],) + eta
        c = sweep.projectors.get(key)
        if c is None:
            continue
        row = {"tau": mu[0], **{f"eta_{j}": v for j, v in enumerate(eta)}}
        row.update({"idem_defect": c.idem_defect, "gap": normal_gap(op, mu, ext), "rank": c.rank})
        row.update(matrix_entries(c.matrix))
        records.append(row)
    write_table(records, os.path.join(run.out, "normal.csv"))
    eta_columns = [f"eta_{j}" for j in range(op.base_dim)]
    failures = [{"tau": key[0], **dict(zip(eta_columns, key[1:])), "reason": reason}
                for key, reason in sorted(sweep.failures.items())]
    write_table(failures, os.path.join(run.out, "normal_failures.csv"), ["tau", *eta_columns, "reason"])
    return 0


# ----------------------------
# lab
# ----------------------------

def lab_command(run: RunConfig) -> int:
    log_section(logger, "Extension lab")
    rows = run_lab(run.seed)
    write_suite_rows(rows, os.path.join(run.out, "lab.csv"))
    failed = sum(not r.passed for r in rows)
    if failed:
        logger.error(f"{failed} lab checks failed")
    return 1 if failed else 0


# ----------------------------
# discrete
# ----------------------------

def _discrete_paths(op: ModelOperator, run: RunConfig):
    sizes = run.ns or list(PATH_SIZES)
    S = run.S or PATH_S
    study = path_convergence(op, sizes, S, run.bump_height)
    write_table([vars(r) for r in study.rows], os.path.join(run.out, "discrete_paths.csv"))

    doubled = double_geometry(op, PhiGrid(op.geometry_tag, max(sizes), S), run.bump_height)
    c = calderon_path_jump(doubled, jump_operator(collar_operator(op)))
    write_matrix(c.matrix, os.path.join(run.out, "discrete_projector.txt"))
    logger.info(f"Path agreement slope {study.slope:.2f}, finest gap {study.finest_gap:.3e}")


def _discrete_probes(op: ModelOperator, run: RunConfig):
    sizes = run.ns or list(PROBE_SIZES)
    nz = run.nz or sizes
    if len(nz) != len(sizes):
        raise SchemaError("run.nz", f"expected {len(sizes)} sizes to pair with ns, got {len(nz)}")
    S = run.S or PROBE_S
    records, written = [], None
    for n_s, n_z in zip(sizes, nz):
        grid = PhiGrid(op.geometry_tag, n_s, S, n_z, op.fibre.length)
        c = discrete_projector(op, grid, PROBE_BUMP_HEIGHT)
        probe = normal_probe(op, c, grid, run.probe_tau)
        records.append({**vars(probe), "h_z": grid.h_z, "idem_defect": c.idem_defect, "data_dim": c.size})
        if c.size <= MATRIX_MAX_DIM:
            written = c
    write_table(records, os.path.join(run.out, "discrete_probes.csv"))
    if written is not None:
        write_matrix(written.matrix, os.path.join(run.out, "discrete_projector.txt"))
    else:
        logger.info(f"Projector matrices above {MATRIX_MAX_DIM} rows are not written")


def discrete_command(op: ModelOperator, run: RunConfig) -> int:
    """Point fibres: agreement of the two projector paths. Interval fibres: the normal probe over refinements."""
    log_section(logger, "Discrete")
    if op.fibre.dim:
        _discrete_probes(op, run)
    else:
        _discrete_paths(op, run)
    return 0
