"""
JSON operator configs and run parameters.

An operator config looks like

    {
      "order": 2, "system_size": 1, "base_dim": 0,
      "fibre": {"type": "interval", "length": 1.0},
      "coefficients": [
        {"k": 2, "alpha": [], "beta": [0], "poly": [[0, 0, 1.0, 0.0]]},
        {"k": 0, "alpha": [], "beta": [2], "poly": [[0, 0, 1.0, 0.0]]}
      ],
      "geometry": "StripHyperbolic",
      "weight_c": 0,
      "run": {"ns": [64, 128], "S": 12.0}
    }

Each poly term is [x_deg, z_deg, re, im]: the coefficient of x^x_deg z^z_deg.
re and im are numbers (times the identity) or N×N nested lists.
"""
import json
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from linalg_core.errors import SchemaError, SingularMatrix
from normal_family.extension import DEFAULT_BUMP_HEIGHT
from normal_family.model import GEOMETRIES, FibreSpec, ModelOperator
from utils.settings import DEFAULT_SEED, OUTPUT_DIR

# ===== CONFIG =====
SUBCOMMANDS = ("symbol", "normal", "lab", "discrete", "verify")
SUITE_NAMES = ("symbol", "normal", "lab", "discrete")
MAX_SEED = 2 ** 64

Entry = Union[float, List[List[float]]]


# ----------------------------
# Schema
# ----------------------------

class FibreConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["point", "interval"]
    length: float = Field(0.0, ge=0.0)

    @model_validator(mode="after")
    def interval_has_length(self):
        if self.type == "interval" and not self.length > 0:
            raise ValueError("an interval fibre needs a positive length")
        return self


class CoefficientConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: int = Field(..., ge=0)
    alpha: List[int] = Field(default_factory=list)
    beta: List[int] = Field(default_factory=list)
    poly: List[Tuple[int, int, Entry, Entry]] = Field(..., min_length=1)

    @field_validator("poly")
    def degrees_nonnegative(cls, v):
        for x_deg, z_deg, _, _ in v:
            if x_deg < 0 or z_deg < 0:
                raise ValueError("polynomial degrees must be nonnegative")
        return v


class RunConfig(BaseModel):
    """Numeric run parameters; the optional "run" block of a config, overridden by CLI flags."""
    model_config = ConfigDict(extra="forbid")

    subcommand: Literal["symbol", "normal", "lab", "discrete", "verify"] = "verify"
    config_path: Optional[str] = None
    out: str = OUTPUT_DIR
    seed: int = Field(DEFAULT_SEED, ge=0, lt=MAX_SEED)
    suites: List[Literal["symbol", "normal", "lab", "discrete"]] = Field(default_factory=lambda: list(SUITE_NAMES))
    ns: List[int] = Field(default_factory=list)
    nz: List[int] = Field(default_factory=list)
    S: Optional[float] = Field(None, gt=0.0)
    tau_min: float = -4.0
    tau_max: float = 4.0
    tau_steps: int = Field(17, ge=1)
    probe_tau: float = 1.0
    xi: List[List[float]] = Field(default_factory=list)
    bump_height: float = Field(DEFAULT_BUMP_HEIGHT, ge=0.0)
    probes: bool = True
    tolerances: Dict[str, float] = Field(default_factory=dict)

    @field_validator("tolerances")
    def tolerances_positive(cls, v):
        for name, value in v.items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive")
        return v

    @field_validator("ns", "nz")
    def sizes_positive(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("grid sizes must be positive")
        return v

    @model_validator(mode="after")
    def tau_range_ordered(self):
        if self.tau_max < self.tau_min:
            raise ValueError("tau_max must not be below tau_min")
        return self

    def tau_grid(self) -> List[float]:
        return [float(t) for t in np.linspace(self.tau_min, self.tau_max, self.tau_steps)]


class OperatorConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    order: int = Field(..., ge=1)
    system_size: int = Field(..., ge=1)
    base_dim: int = Field(..., ge=0, le=1)
    fibre: FibreConfig
    coefficients: List[CoefficientConfig] = Field(..., min_length=1)
    geometry: str
    weight_c: int = Field(0, ge=0)
    run: Optional[RunConfig] = None

    @field_validator("geometry")
    def known_geometry(cls, v):
        if v not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {', '.join(GEOMETRIES)}")
        return v


# ----------------------------
# Conversion
# ----------------------------

def _path(loc: Tuple, prefix: str = "") -> str:
    parts = ([prefix] if prefix else []) + [str(p) for p in loc]
    return ".".join(parts) or "<root>"


def schema_error(exc: ValidationError, prefix: str = "") -> SchemaError:
    """Dotted path of every violation, from the pydantic error locations."""
    violations = [(_path(e["loc"], prefix), e["msg"]) for e in exc.errors()]
    path, reason = violations[0]
    return SchemaError(path, reason, violations)


def _entry(value: Entry, n: int, where: str) -> np.ndarray:
    a = np.asarray(value, dtype=float)
    if a.ndim == 0:
        return float(a) * np.eye(n)
    if a.shape != (n, n):
        raise SchemaError(where, f"matrix entry has shape {a.shape}, expected {(n, n)}")
    return a


def build_operator(cfg: OperatorConfig) -> ModelOperator:
    n = cfg.system_size
    coefficients: Dict[Any, Dict[Tuple[int, int], np.ndarray]] = {}
    for i, c in enumerate(cfg.coefficients):
        key = (c.k, tuple(c.alpha), tuple(c.beta))
        poly = coefficients.setdefault(key, {})
        for j, (x_deg, z_deg, re, im) in enumerate(c.poly):
            where = f"coefficients.{i}.poly.{j}"
            value = _entry(re, n, where) + 1j * _entry(im, n, where)
            poly[(x_deg, z_deg)] = poly.get((x_deg, z_deg), 0) + value
    fibre = FibreSpec(cfg.fibre.type, cfg.fibre.length)
    try:
        return ModelOperator(cfg.order, n, cfg.base_dim, fibre, coefficients, cfg.geometry, cfg.weight_c)
    except SingularMatrix as e:
        raise SchemaError("coefficients", f"leading coefficient of order {cfg.order} is missing or singular "
                                          f"(smallest singular value {e.pivot:.3e})") from e
    except ValueError as e:
        raise SchemaError("coefficients", str(e)) from e


def parse_config(text: str) -> Tuple[RunConfig, ModelOperator]:
    """Validated run parameters and model operator, or SchemaError listing every violation."""
    try:
        cfg = OperatorConfig.model_validate_json(text)
    except ValidationError as e:
        raise schema_error(e) from e
    return cfg.run or RunConfig(), build_operator(cfg)


def load_config(path: str) -> Tuple[RunConfig, ModelOperator]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise SchemaError("config", f"cannot read {path}: {e.strerror}") from e
    run, op = parse_config(text)
    return run.model_copy(update={"config_path": path}), op


def merge_run(base: RunConfig, overrides: Dict[str, Any]) -> RunConfig:
    """CLI values win over the config's run block; None means not given."""
    merged = base.model_dump()
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as e:
        raise schema_error(e, "run") from e


def operator_to_json(op: ModelOperator, run: Optional[RunConfig] = None) -> str:
    """Inverse of parse_config for the operator part (complex matrices split into re/im)."""
    n = op.system_size
    coefficients = []
    for (k, alpha, beta), poly in op.coefficients.items():
        terms = []
        for (x_deg, z_deg), c in sorted(poly.items()):
            if np.allclose(c, c[0, 0] * np.eye(n)):
                re, im = float(c[0, 0].real), float(c[0, 0].imag)
            else:
                re, im = c.real.tolist(), c.imag.tolist()
            terms.append([x_deg, z_deg, re, im])
        coefficients.append({"k": k, "alpha": list(alpha), "beta": list(beta), "poly": terms})
    doc = {
        "order": op.order,
        "system_size": n,
        "base_dim": op.base_dim,
        "fibre": {"type": op.fibre.kind, "length": op.fibre.length},
        "coefficients": coefficients,
        "geometry": op.geometry_tag,
        "weight_c": op.weight_c,
    }
    if run is not None:
        doc["run"] = run.model_dump(exclude={"subcommand", "config_path"})
    return json.dumps(doc, indent=2)
