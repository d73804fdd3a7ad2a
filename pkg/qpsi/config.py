from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .core.mpnum import MAX_DIGITS, EvalContext
from .errors import ConfigError
from .identities.catalog import get_identity
from .identities.schema import IdentityId

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = "configs/verify.yaml"
PRECISION_ENV = "QPSI_PRECISION"

ReportFormat = Literal["json", "csv", "text", "xlsx"]


def load_config(path: Optional[str] = None) -> dict:
    """YAML config as a dict. A missing default file means built-in defaults."""
    p = Path(path or DEFAULT_CONFIG)
    if not p.exists():
        if path:
            raise ConfigError(f"config file not found: {path}")
        return {}
    with open(p, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


class SweepConfig(BaseModel):
    identity: IdentityId
    samples: int = Field(50, ge=0)
    seed: int = Field(42, ge=0, lt=2**64)
    precision_digits: int = Field(50, ge=20, le=MAX_DIGITS)
    q_range: Tuple[float, float] = (0.05, 0.5)
    complex_params: bool = False
    n_values: List[int] = Field(default_factory=lambda: [0, 1, 2, 5, 10])
    tolerance: float = Field(1e-30, gt=0)
    modulus_range: Tuple[float, float] = (0.1, 0.9)
    derived_range: Tuple[float, float] = (0.05, 0.95)
    modulus_margin: float = Field(0.1, ge=0, lt=1)
    workers: int = Field(1, ge=1)
    max_terms: int = Field(10000, gt=0)
    pole_distance_min: float = Field(1e-3, gt=0, lt=1)
    format: ReportFormat = "json"
    out: Optional[str] = None

    @field_validator("q_range")
    @classmethod
    def _q_inside_disk(cls, v):
        lo, hi = v
        if not 0 < lo <= hi < 1:
            raise ValueError("q_range must satisfy 0 < q_min <= q_max < 1")
        return v

    @field_validator("modulus_range", "derived_range")
    @classmethod
    def _ordered(cls, v):
        if not 0 < v[0] <= v[1]:
            raise ValueError("range must satisfy 0 < lo <= hi")
        return v

    @field_validator("n_values")
    @classmethod
    def _nonnegative(cls, v):
        if any(n < 0 for n in v):
            raise ValueError("n_values must be nonnegative")
        return sorted(set(v))

    @model_validator(mode="after")
    def _n_only_for_semi_finite(self):
        if not get_identity(self.identity).semi_finite:
            self.n_values = [0]
        return self

    def eval_context(self) -> EvalContext:
        return EvalContext(
            precision_digits=self.precision_digits,
            max_terms=self.max_terms,
            pole_distance_min=self.pole_distance_min,
        )


def _env_precision() -> Optional[int]:
    env = os.getenv(PRECISION_ENV)
    if not env:
        return None
    try:
        return int(env)
    except ValueError as err:
        raise ConfigError(f"{PRECISION_ENV} must be an integer, got {env!r}") from err


def resolve_precision(cfg: dict, override: Optional[int] = None) -> int:
    """Working digits: default 50 < YAML `sweep.precision_digits` < QPSI_PRECISION < override."""
    if override is not None:
        return override
    env = _env_precision()
    if env is not None:
        return env
    data = cfg.get("sweep", cfg) or {}
    return int(data.get("precision_digits", SweepConfig.model_fields["precision_digits"].default))


def sweep_config(cfg: dict, **overrides: Any) -> SweepConfig:
    """Merge built-in defaults < YAML `sweep` section < QPSI_PRECISION < explicit overrides."""
    data = dict(cfg.get("sweep", cfg) or {})
    env = _env_precision()
    if env is not None:
        data["precision_digits"] = env
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SweepConfig(**data)
    except ValidationError as err:
        raise ConfigError(f"invalid sweep configuration: {err}") from err
