"""
Seeded brute-force suites over the extension lab. Each row records one
instance: whether the checked identity held and the defect it was judged on.
"""
from typing import List

import numpy as np

from extension_lab.bvp import augment, boundary_space, calderon_from_augmented, restrict_check
from extension_lab.instances import (
    INVERSION_KINDS,
    augment_instance,
    complement_instance,
    extension_instance,
    inversion_instance,
    kernel_bvp_instance,
    shadow_instance,
)
from extension_lab.invertibility import (
    complement_in_minus,
    make_invertible,
    modify_shadow,
    perturb_imag,
    perturb_real,
)
from linalg_core.errors import UCPViolated
from linalg_core.subspaces import direct_sum_check, subspace_distance
from linalg_core.types import SubspaceBasis, fro
from utils.logger import setup_logger
from utils.records import SuiteRow, instance_rng
from utils.settings import DEFAULT_SEED

logger = setup_logger("LabSuites")

# ===== CONFIG =====
INVERSION_COUNT = 500
EXTENSION_COUNT = 100
AUGMENT_COUNT = 100
SHADOW_COUNT = 100
COMPLEMENT_COUNT = 100
INVERTIBLE_TOL = 1e-10
PRESERVE_TOL = 1e-10
INVERSION_SIZE = 6
COMPLEMENT_GAP = 1e-6


def _invertible(min_sv: float, matrix: np.ndarray) -> bool:
    return min_sv > INVERTIBLE_TOL * max(fro(matrix), 1.0)


def proj_inversion_suite(seed: int = DEFAULT_SEED, count: int = INVERSION_COUNT) -> List[SuiteRow]:
    """T + αΠ and T + iαΠ against what the lemma predicts, cycling through instance kinds."""
    rows = []
    for i in range(count):
        rng = instance_rng(seed, i)
        kind = INVERSION_KINDS[i % len(INVERSION_KINDS)]
        inst = inversion_instance(rng, INVERSION_SIZE, kind)
        alpha = float(rng.uniform(0.25, 4.0))
        real = perturb_real(inst.T, inst.Pi, alpha)
        imag = perturb_imag(inst.T, inst.Pi, alpha)
        ok_imag = _invertible(imag.min_sv, imag.matrix) == inst.expect_imag
        ok_real = inst.expect_real is None or _invertible(real.min_sv, real.matrix) == inst.expect_real
        rows.append(SuiteRow("proj_inversion", i, ok_imag and ok_real, min(real.min_sv, imag.min_sv), kind))
    return rows


def augment_suite(seed: int = DEFAULT_SEED, count: int = AUGMENT_COUNT) -> List[SuiteRow]:
    """π′T̄ = Tπ, T̄ι = ι′T for rectangular T, and πC̄ι a projector onto γ(ker T)."""
    rows = []
    for i in range(count):
        rng = instance_rng(seed, i)
        t = augment_instance(rng, 3, 2)
        k, n = t.shape
        bar = augment(t)
        pi, pi_prime = np.eye(n + k)[:n], np.eye(n + k)[n:]
        iota, iota_prime = pi.T, pi_prime.T
        defect = max(fro(pi_prime @ bar - t @ pi), fro(bar @ iota - iota_prime @ t), fro(bar - bar.conj().T))

        b = kernel_bvp_instance(rng)
        c = calderon_from_augmented(b)
        target = boundary_space(b)
        distance = subspace_distance(SubspaceBasis.span(c.matrix), target) if target.dim else fro(c.matrix)
        defect = max(defect, c.idem_defect, distance)
        rows.append(SuiteRow("augment", i, defect <= 1e-10, defect))
    return rows


def shadow_suite(seed: int = DEFAULT_SEED, count: int = SHADOW_COUNT) -> List[SuiteRow]:
    rows = []
    for i in range(count):
        mod = modify_shadow(shadow_instance(instance_rng(seed, i)))
        passed = mod.shadow_after == 0 and mod.boundary_distance <= PRESERVE_TOL
        rows.append(SuiteRow("modify_shadow", i, passed, mod.boundary_distance, f"shadow {mod.shadow_dim}"))
    return rows


def extension_suite(seed: int = DEFAULT_SEED, count: int = EXTENSION_COUNT) -> List[SuiteRow]:
    """make_invertible on designed instances: invertible, plus side untouched, Π_comp off the plus side."""
    rows = []
    for i in range(count):
        b = extension_instance(instance_rng(seed, i))
        ext = make_invertible(b)
        passed = (
            _invertible(ext.min_sv, ext.T_final)
            and ext.boundary_distance <= PRESERVE_TOL
            and ext.comp_restricts_to_zero
            and restrict_check(ext.Pi_sh, b.plus_mask)
        )
        rows.append(SuiteRow("make_invertible", i, passed, ext.boundary_distance, f"min_sv {ext.min_sv:.3e}"))
    return rows


def complement_suite(seed: int = DEFAULT_SEED, count: int = COMPLEMENT_COUNT) -> List[SuiteRow]:
    """
    W = complement_in_minus(K) for kernels straddling both sides: W ⊕ K^⊥ = C^n
    with a gap, W = span χ²K and W off the plus side. Odd instances use the
    default cutoff (indicator of the minus side).
    """
    rows = []
    for i in range(count):
        b, kernel, chi = complement_instance(instance_rng(seed, i))
        default_cutoff = bool(i % 2)
        if default_cutoff:
            chi = b.minus_mask.astype(float)
        try:
            w = complement_in_minus(kernel, b, None if default_cutoff else chi)
        except UCPViolated as e:
            rows.append(SuiteRow("complement_in_minus", i, False, e.min_sv, "UCPViolated"))
            continue
        gap = direct_sum_check(w, kernel.complement(b.gram)).gap
        target = SubspaceBasis.span((chi ** 2)[:, None] * kernel.basis, ambient_dim=b.n)
        defect = max(subspace_distance(w, target), fro(w.basis[b.plus_mask]))
        passed = gap > COMPLEMENT_GAP and defect <= PRESERVE_TOL
        rows.append(SuiteRow("complement_in_minus", i, passed, defect, f"gap {gap:.3e}"))
    return rows


SUITES = {
    "proj_inversion": proj_inversion_suite,
    "augment": augment_suite,
    "modify_shadow": shadow_suite,
    "make_invertible": extension_suite,
    "complement_in_minus": complement_suite,
}


def run_lab(seed: int = DEFAULT_SEED) -> List[SuiteRow]:
    rows = []
    for name, suite in SUITES.items():
        suite_rows = suite(seed)
        failed = sum(not r.passed for r in suite_rows)
        log = logger.warning if failed else logger.info
        log(f"{name}: {len(suite_rows) - failed}/{len(suite_rows)} passed")
        rows.extend(suite_rows)
    return rows
