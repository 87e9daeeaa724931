"""
Report emission: CSV tables stamped with the build identifier, and complex
matrices in a plain text format.

Matrix text format: a header line "# rows cols", then rows·cols lines
"re im" in row-major order.
"""
import os
from functools import lru_cache
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

os.environ.setdefault("GIT_PYTHON_REFRESH", "quiet")
from git import Repo  # noqa: E402
from git.exc import GitError  # noqa: E402

from utils.logger import setup_logger
from utils.records import SuiteRow

logger = setup_logger("Reports")

# ===== CONFIG =====
FLOAT_FORMAT = "%.12e"
MATRIX_FORMAT = "%.17e"
UNVERSIONED = "unversioned"


@lru_cache(maxsize=1)
def build_id() -> str:
    """`git describe --always --dirty` of the source tree, or "unversioned" outside git."""
    try:
        repo = Repo(os.path.dirname(os.path.abspath(__file__)), search_parent_directories=True)
        return repo.git.describe("--always", "--dirty")
    except (GitError, ValueError):
        return UNVERSIONED


def ensure_dir(path: str):
    os.makedirs(path, exist_ok=True)


def write_table(records: Sequence[Dict], path: str, columns: Sequence[str] = ()) -> pd.DataFrame:
    """One row per record, plus the build_id column; fixed float format so reruns are byte-identical."""
    df = pd.DataFrame(list(records), columns=list(columns) or None)
    df["build_id"] = build_id()
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {len(df)} rows to {path}")
    return df


def write_suite_rows(rows: Sequence[SuiteRow], path: str) -> pd.DataFrame:
    return write_table([r.to_dict() for r in rows], path, ["suite", "instance", "passed", "defect", "note"])


def summarize(rows_by_suite: Dict[str, List[SuiteRow]]) -> List[Dict]:
    summary = []
    for name, rows in rows_by_suite.items():
        failed = sum(not r.passed for r in rows)
        summary.append({
            "suite": name,
            "checks": len(rows),
            "passed": len(rows) - failed,
            "failed": failed,
            "max_defect": max((float(r.defect) for r in rows), default=0.0),
        })
    return summary


def matrix_entries(matrix: np.ndarray, prefix: str = "c") -> Dict[str, float]:
    """Flattened re/im columns c_<row>_<col>_re, c_<row>_<col>_im for a CSV row."""
    out = {}
    for (r, c), v in np.ndenumerate(np.asarray(matrix, dtype=complex)):
        out[f"{prefix}_{r}_{c}_re"] = float(v.real)
        out[f"{prefix}_{r}_{c}_im"] = float(v.imag)
    return out


def write_matrix(matrix: np.ndarray, path: str):
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2:
        raise ValueError("write_matrix needs a 2-D array")
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    pairs = np.column_stack([a.real.ravel(), a.imag.ravel()])
    np.savetxt(path, pairs, fmt=MATRIX_FORMAT, header=f"{a.shape[0]} {a.shape[1]}", comments="# ")
    logger.info(f"Wrote {a.shape[0]}x{a.shape[1]} matrix to {path}")


def read_matrix(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline()
    if not header.startswith("#"):
        raise ValueError(f"{path}: missing '# rows cols' header")
    rows, cols = (int(v) for v in header[1:].split())
    pairs = np.loadtxt(path, comments="#", ndmin=2)
    if pairs.shape != (rows * cols, 2):
        raise ValueError(f"{path}: expected {rows * cols} entries, found {pairs.shape[0]}")
    return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(rows, cols)
