from __future__ import annotations

import enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..core.mpnum import BoundedValue, number_repr, to_decimal


class IdentityId(str, enum.Enum):
    SIXPSI6_SUM = "SIXPSI6_SUM"
    EIGHTPHI7_EXT = "EIGHTPHI7_EXT"
    SEMI_6PSI6 = "SEMI_6PSI6"
    EIGHTPHI7_TRANS = "EIGHTPHI7_TRANS"
    SEMI_8PHI7 = "SEMI_8PHI7"
    SIXPSI6_TRANS = "SIXPSI6_TRANS"
    TENPHI9_4TERM = "TENPHI9_4TERM"
    SEMI_10PHI9 = "SEMI_10PHI9"
    EIGHTPSI8_TRANS = "EIGHTPSI8_TRANS"
    SIXPHI5_SUM = "SIXPHI5_SUM"
    ONEPSI1_SUM = "ONEPSI1_SUM"


FREE_NAMES = ("a", "b", "c", "d", "e", "f", "g", "h", "z")


class ParamSet(BaseModel):
    """Parameters of one identity instance.

    Free parameters are machine numbers. Derived ones (b, c, lam depending on the
    identity) are recomputed at working precision by the evaluator; `derived`
    only keeps a machine-precision preview for reports and guards.
    """

    model_config = ConfigDict(frozen=True)

    q: complex = Field(..., description="Base, 0 < |q| < 1")
    a: Optional[complex] = None
    b: Optional[complex] = None
    c: Optional[complex] = None
    d: Optional[complex] = None
    e: Optional[complex] = None
    f: Optional[complex] = None
    g: Optional[complex] = None
    h: Optional[complex] = None
    z: Optional[complex] = Field(None, description="Argument of the 1psi1 sum")
    n: int = Field(0, ge=0, description="Semi-finite depth")
    derived: Dict[str, complex] = Field(default_factory=dict)

    def free(self) -> dict[str, complex]:
        return {k: getattr(self, k) for k in FREE_NAMES if getattr(self, k) is not None}

    def decimal_strings(self) -> dict[str, str]:
        out = {"q": number_repr(_machine(self.q))}
        out.update({k: number_repr(_machine(v)) for k, v in self.free().items()})
        return out


def _machine(x: complex):
    return x.real if x.imag == 0 else x


class IdentityReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    identity: IdentityId
    params: ParamSet
    sample_index: int = 0
    lhs: Optional[BoundedValue] = None
    rhs: Optional[BoundedValue] = None
    residual: Optional[float] = Field(None, ge=0, description="|lhs-rhs|/(|lhs|+|rhs|+10^-digits)")
    passed: bool = False
    skipped: bool = False
    skip_reason: Optional[str] = None
    derived: Dict[str, str] = Field(default_factory=dict, description="Derived parameters at working precision")
    diagnostics: Dict[str, Dict[str, Any]] = Field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.skipped:
            return "skipped"
        return "pass" if self.passed else "fail"

    def record(self) -> dict:
        """Flat JSON-ready form; numbers as decimal strings."""
        return {
            "index": self.sample_index,
            "n": self.params.n,
            "params": self.params.decimal_strings(),
            "derived": dict(self.derived),
            "lhs": _bounded(self.lhs),
            "rhs": _bounded(self.rhs),
            "residual": None if self.residual is None else repr(self.residual),
            "pass": self.passed,
            "skipped": self.skipped,
            "skip_reason": self.skip_reason,
            "diagnostics": self.diagnostics,
        }


def _bounded(v: Optional[BoundedValue]) -> Optional[dict]:
    if v is None:
        return None
    return {"value": to_decimal(v.value), "abs_err": v.context.nstr(v.abs_err, 6)}
