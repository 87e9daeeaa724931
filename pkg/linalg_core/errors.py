"""
Error hierarchy shared by every module.

Numeric failures are LinAlgError subclasses so callers that already catch
numpy's errors keep working; bad input is a ValueError; failures of an
iterative or discrete process are RuntimeErrors.
"""
from typing import Optional, Sequence, Tuple

from numpy.linalg import LinAlgError


class CalderonError(Exception):
    """Root of every error raised by this library."""


# ----------------------------
# Numeric (LinAlgError)
# ----------------------------

class SingularMatrix(CalderonError, LinAlgError):
    def __init__(self, pivot_index: int, pivot: float = 0.0):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(f"singular matrix: pivot {pivot_index} has magnitude {pivot:.3e}")


class ContourTooClose(CalderonError, LinAlgError):
    def __init__(self, idem_defect: float, nodes: int):
        self.idem_defect = idem_defect
        self.nodes = nodes
        super().__init__(
            f"contour passes too close to the spectrum: idempotence defect "
            f"{idem_defect:.3e} after {nodes} nodes"
        )


class NotComplementary(CalderonError, LinAlgError):
    def __init__(self, gap: float, mu: Optional[Sequence[float]] = None):
        self.gap = gap
        self.mu = tuple(mu) if mu is not None else None
        where = f" at mu={self.mu}" if self.mu is not None else ""
        super().__init__(f"subspaces are not complementary{where}: gap {gap:.3e}")


class GramNotPD(CalderonError, LinAlgError):
    def __init__(self, reason: str = "gram matrix is not Hermitian positive definite"):
        super().__init__(reason)


class NotInvertible(CalderonError, LinAlgError):
    def __init__(self, min_sv: float):
        self.min_sv = min_sv
        super().__init__(f"I + C - C* is numerically singular (min singular value {min_sv:.3e})")


class RankDeficient(CalderonError, LinAlgError):
    def __init__(self, rank: int, expected: int):
        self.rank = rank
        self.expected = expected
        super().__init__(f"rank {rank} below expected {expected}")


class NotIdempotent(CalderonError, LinAlgError):
    def __init__(self, idem_defect: float, tol: float):
        self.idem_defect = idem_defect
        self.tol = tol
        super().__init__(f"not a projector: idempotence defect {idem_defect:.3e} exceeds {tol:.3e}")


# ----------------------------
# Input (ValueError)
# ----------------------------

class ZeroCovector(CalderonError, ValueError):
    def __init__(self):
        super().__init__("tangential covector must be nonzero")


class PointFibre(CalderonError, ValueError):
    def __init__(self):
        super().__init__("operation needs an interval fibre; this operator has a point fibre")


class GeometryMismatch(CalderonError, ValueError):
    pass


class GraphConditionFailed(CalderonError, ValueError):
    def __init__(self, first_component: float):
        self.first_component = first_component
        super().__init__(
            f"range is not a graph over Dirichlet data (|first component| = {first_component:.3e})"
        )


class SchemaError(CalderonError, ValueError):
    """First violation in `path` and `reason`; every violation in `violations`."""

    def __init__(self, path: str, reason: str, violations: Optional[Sequence[Tuple[str, str]]] = None):
        self.path = path
        self.reason = reason
        self.violations = list(violations) if violations else [(path, reason)]
        more = f" (+{len(self.violations) - 1} more)" if len(self.violations) > 1 else ""
        super().__init__(f"{path}: {reason}{more}")


# ----------------------------
# Process (RuntimeError)
# ----------------------------

class IntegrationFailure(CalderonError, RuntimeError):
    def __init__(self, z: float, stepsize: float, message: str = ""):
        self.z = z
        self.stepsize = stepsize
        super().__init__(f"integration failed at z={z:.6g} (step {stepsize:.3e}) {message}".strip())


class SolveFailure(CalderonError, RuntimeError):
    pass


class TraceUnstable(CalderonError, RuntimeError):
    def __init__(self, report: float, tol: float):
        self.report = report
        self.tol = tol
        super().__init__(f"one-sided trace unstable: report {report:.3e} exceeds {tol:.3e}")


class SideConditionViolated(CalderonError, RuntimeError):
    def __init__(self, overlap: float):
        self.overlap = overlap
        super().__init__(f"rg Pi meets rg T nontrivially (overlap {overlap:.3e})")


class UCPViolated(CalderonError, RuntimeError):
    def __init__(self, min_sv: float):
        self.min_sv = min_sv
        super().__init__(f"a kernel vector is supported in the plus side (min sv {min_sv:.3e})")
