"""
verify: every acceptance suite in a fixed order with fixed seeds, one CSV
per suite and a summary. Exit status 1 iff some check failed.
"""
import os
from contextlib import contextmanager
from types import ModuleType
from typing import Callable, Dict, List, Tuple

import discrete_calderon.suites as discrete_suites
import extension_lab.suites as lab_suites
import normal_family.suites as normal_suites
import symbol_calculus.suites as symbol_suites
from cli.config import SUITE_NAMES, RunConfig
from cli.reports import summarize, write_suite_rows, write_table
from linalg_core.errors import CalderonError, SchemaError
from utils.logger import log_section, setup_logger, update_context
from utils.records import SuiteRow

logger = setup_logger("Verify")

# ===== CONFIG =====
TOLERANCE_SUFFIXES = ("_TOL", "_GAP", "_SLOPE")
SUITE_MODULES: Dict[str, ModuleType] = {
    "symbol": symbol_suites,
    "normal": normal_suites,
    "lab": lab_suites,
    "discrete": discrete_suites,
}


def _runners(run: RunConfig) -> Dict[str, Callable[[], List[SuiteRow]]]:
    return {
        "symbol": lambda: symbol_suites.run_symbol(run.seed),
        "normal": lambda: normal_suites.run_normal(run.seed),
        "lab": lambda: lab_suites.run_lab(run.seed),
        "discrete": lambda: discrete_suites.run_discrete(run.seed, probes=run.probes),
    }


def tolerance_names() -> Dict[str, List[str]]:
    """Overridable thresholds per suite: float CONFIG constants named *_TOL, *_GAP or *_SLOPE."""
    return {
        suite: sorted(name for name, value in vars(module).items()
                      if name.isupper() and name.endswith(TOLERANCE_SUFFIXES) and isinstance(value, float))
        for suite, module in SUITE_MODULES.items()
    }


def _targets(overrides: Dict[str, float]) -> List[Tuple[ModuleType, str, float]]:
    known = tolerance_names()
    targets = []
    for raw, value in overrides.items():
        name = raw.upper()
        modules = [SUITE_MODULES[s] for s, names in known.items() if name in names]
        if not modules:
            raise SchemaError(f"run.tolerances.{raw}", "unknown tolerance")
        targets.extend((m, name, float(value)) for m in modules)
    return targets


@contextmanager
def tolerance_overrides(overrides: Dict[str, float]):
    """Temporarily replaces suite thresholds; restored on exit."""
    targets = _targets(overrides)
    saved = [(m, name, getattr(m, name)) for m, name, _ in targets]
    try:
        for m, name, value in targets:
            setattr(m, name, value)
            logger.info(f"Tolerance override {m.__name__}.{name} = {value:g}")
        yield
    finally:
        for m, name, value in saved:
            setattr(m, name, value)


def _run_suite(name: str, runner: Callable[[], List[SuiteRow]]) -> List[SuiteRow]:
    try:
        return runner()
    except CalderonError as e:
        logger.error(f"Suite {name} aborted: {e}")
        return [SuiteRow(name, -1, False, float("nan"), f"{type(e).__name__}: {e}")]


def verify_all(run: RunConfig) -> Tuple[int, Dict[str, List[SuiteRow]]]:
    runners = _runners(run)
    selected = [name for name in SUITE_NAMES if name in run.suites]
    results: Dict[str, List[SuiteRow]] = {}
    with tolerance_overrides(run.tolerances):
        for name in selected:
            log_section(logger, f"Verify: {name}")
            update_context(step=f"verify:{name}")
            results[name] = _run_suite(name, runners[name])
            write_suite_rows(results[name], os.path.join(run.out, f"verify_{name}.csv"))
    update_context(step="General")

    summary = summarize(results)
    write_table(summary, os.path.join(run.out, "verify_summary.csv"))
    failed = sum(s["failed"] for s in summary)
    if failed:
        for s in summary:
            if s["failed"]:
                logger.error(f"{s['suite']}: {s['failed']} of {s['checks']} checks failed")
        return 1, results
    logger.info(f"All {sum(s['checks'] for s in summary)} checks passed in {len(summary)} suites")
    return 0, results
