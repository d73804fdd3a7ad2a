from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Union

import mpmath
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DivisionNearZero, NonFiniteBound

logger = logging.getLogger(__name__)

# Error bookkeeping runs in machine floats; beyond this the rounding unit underflows.
MAX_DIGITS = 300

Number = Union[int, float, complex]


@functools.lru_cache(maxsize=None)
def mp_context(dps: int) -> "mpmath.MPContext":
    """Independent mpmath context at a fixed precision.

    Contexts are cached per precision and never mutated after creation, so a
    context can be shared by threads and rebuilt identically in worker processes.
    """
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


class EvalContext(BaseModel):
    """Immutable evaluation environment shared by every evaluator."""

    model_config = ConfigDict(frozen=True)

    precision_digits: int = Field(50, ge=20, le=MAX_DIGITS, description="Working precision in decimal digits")
    eps_term: Optional[float] = Field(
        None, gt=0, lt=1, description="Term negligibility threshold; default 10^(-precision_digits+10)"
    )
    max_terms: int = Field(10000, gt=0, description="Per-direction term budget of a series")
    pole_distance_min: float = Field(1e-3, gt=0, lt=1, description="Minimum |1 - x q^j| of any denominator factor")
    input_ulps: int = Field(64, ge=0, description="Roundoff units assumed on every parameter value")

    @property
    def mp(self):
        return mp_context(self.precision_digits)

    @property
    def eps(self) -> float:
        if self.eps_term is not None:
            return self.eps_term
        return 10.0 ** (-(self.precision_digits - 10))

    @property
    def unit(self) -> float:
        """Conservative relative rounding unit of one mpmath operation."""
        return math.ldexp(1.0, 2 - self.mp.prec)

    @property
    def rel_in(self) -> float:
        return self.input_ulps * self.unit

    @property
    def floor(self):
        return self.mp.mpf(10) ** (-self.precision_digits)

    def convert(self, z: Any):
        """Convert to an mpf/mpc of this context; real complex numbers become mpf."""
        if isinstance(z, complex) and z.imag == 0:
            z = z.real
        return self.mp.convert(z)

    def exact(self, z: Any) -> "BoundedValue":
        return BoundedValue(self.convert(z), self.mp.zero)

    def rounded(self, z: Any, rel: float) -> "BoundedValue":
        """Value carrying a relative error `rel` (e.g. a parameter expression)."""
        v = self.convert(z)
        return BoundedValue(v, abs(v) * self.mp.mpf(rel))


def _restore_bounded(dps: int, value_kind: str, value_raw: Any, err_raw: Any) -> "BoundedValue":
    ctx = mp_context(dps)
    value = ctx.make_mpc(value_raw) if value_kind == "c" else ctx.make_mpf(value_raw)
    return BoundedValue(value, ctx.make_mpf(err_raw))


@dataclass(frozen=True)
class BoundedValue:
    """A value together with a rigorous bound on |true - value|."""

    value: Any
    abs_err: Any

    def __post_init__(self):
        if not (mpmath.isfinite(self.abs_err) and mpmath.isfinite(self.value)):
            raise NonFiniteBound(f"non-finite bounded value {self.value} +/- {self.abs_err}")

    @property
    def context(self):
        return self.value.context

    def magnitude(self) -> float:
        return magnitude(self.value)

    def rel_err(self) -> float:
        m = abs(self.value)
        if m == 0:
            return math.inf if self.abs_err else 0.0
        return float(self.abs_err / m)

    def __reduce__(self):
        # mpf/mpc types are per-context classes; pickle their raw tuples instead
        ctx = self.value.context
        if hasattr(self.value, "_mpc_"):
            return _restore_bounded, (ctx.dps, "c", self.value._mpc_, self.abs_err._mpf_)
        return _restore_bounded, (ctx.dps, "r", self.value._mpf_, self.abs_err._mpf_)


# ---------- magnitudes ----------

def magnitude(z: Any) -> float:
    """|z| as a machine float (inf on overflow)."""
    try:
        return abs(complex(z))
    except OverflowError:
        return math.inf


def magnitude_ratio(x: Any, y: Any) -> float:
    """|x/y| as a machine float for y != 0; the quotient is formed in mpmath
    when either modulus leaves the float range."""
    xm, ym = magnitude(x), magnitude(y)
    if 0 < xm < math.inf and 0 < ym < math.inf:
        return xm / ym
    if x == 0:
        return 0.0
    return magnitude(x / y)


def _unit(ctx) -> Any:
    return ctx.ldexp(ctx.one, 2 - ctx.prec)


def _context(x: BoundedValue, y: BoundedValue):
    ctx = x.value.context
    if y.value.context is not ctx:
        raise TypeError("BoundedValue operands come from different precision contexts")
    return ctx


# ---------- arithmetic ----------

def bv_neg(x: BoundedValue) -> BoundedValue:
    return BoundedValue(-x.value, x.abs_err)


def bv_add(x: BoundedValue, y: BoundedValue) -> BoundedValue:
    ctx = _context(x, y)
    value = x.value + y.value
    err = x.abs_err + y.abs_err
    if err or value != ctx.fadd(x.value, y.value, exact=True):
        err += abs(value) * _unit(ctx)
    return BoundedValue(value, err)


def bv_sub(x: BoundedValue, y: BoundedValue) -> BoundedValue:
    return bv_add(x, bv_neg(y))


def bv_mul(x: BoundedValue, y: BoundedValue) -> BoundedValue:
    ctx = _context(x, y)
    value = x.value * y.value
    err = abs(x.value) * y.abs_err + abs(y.value) * x.abs_err + x.abs_err * y.abs_err
    if err or value != ctx.fmul(x.value, y.value, exact=True):
        err += abs(value) * _unit(ctx)
    return BoundedValue(value, err)


def bv_div(x: BoundedValue, y: BoundedValue) -> BoundedValue:
    ctx = _context(x, y)
    ymag = abs(y.value)
    if ymag <= y.abs_err:
        raise DivisionNearZero(f"divisor {ctx.nstr(y.value, 8)} +/- {ctx.nstr(y.abs_err, 3)} may vanish")
    value = x.value / y.value
    err = (ymag * x.abs_err + abs(x.value) * y.abs_err) / (ymag * (ymag - y.abs_err))
    if err or ctx.fmul(value, y.value, exact=True) != x.value:
        err += abs(value) * _unit(ctx)
    return BoundedValue(value, err)


def bv_sum(values: Iterable[BoundedValue], ctx: EvalContext) -> BoundedValue:
    total = ctx.exact(0)
    for v in values:
        total = bv_add(total, v)
    return total


def bv_prod(values: Iterable[BoundedValue], ctx: EvalContext) -> BoundedValue:
    total = ctx.exact(1)
    for v in values:
        total = bv_mul(total, v)
    return total


def from_relative(value: Any, rel: float) -> BoundedValue:
    """Wrap a value whose relative error is at most `rel` (rel < 1)."""
    ctx = value.context
    if rel >= 1:
        raise DivisionNearZero("relative error bound reached 1; precision exhausted")
    mag = abs(value)
    return BoundedValue(value, mag * ctx.mpf(rel) / (1 - ctx.mpf(rel)))


def relative_residual(lhs: BoundedValue, rhs: BoundedValue, ctx: EvalContext):
    """|lhs - rhs| / (|lhs| + |rhs| + 10^-precision)."""
    diff = abs(lhs.value - rhs.value)
    return diff / (abs(lhs.value) + abs(rhs.value) + ctx.floor)


# ---------- decimal strings ----------

def to_decimal(z: Any, digits: Optional[int] = None) -> str:
    """Decimal string of an mpf/mpc at full working precision."""
    ctx = z.context
    n = digits or ctx.dps + 3
    if hasattr(z, "imag") and z.imag != 0:
        im = z.imag
        sign = "-" if im < 0 else "+"
        return f"{ctx.nstr(z.real, n)}{sign}{ctx.nstr(abs(im), n)}j"
    return ctx.nstr(z.real if hasattr(z, "imag") else z, n)


def number_repr(x: Number) -> str:
    """Shortest round-trip string of a machine number."""
    if isinstance(x, complex):
        if x.imag == 0:
            return repr(x.real)
        sign = "-" if x.imag < 0 else "+"
        return f"{x.real!r}{sign}{abs(x.imag)!r}j"
    return repr(x)


def parse_number(s: Union[str, Number]) -> Number:
    if isinstance(s, (int, float, complex)):
        return s
    s = str(s).strip().replace(" ", "")
    try:
        return float(s)
    except ValueError:
        return complex(s)


def bv_pow_int(x: BoundedValue, m: int) -> BoundedValue:
    """x**m for an integer m, with the relative error of x raised accordingly."""
    ctx = x.value.context
    if m == 0:
        return BoundedValue(ctx.one, ctx.zero)
    if m == 1:
        return x
    if m < 0 and x.value == 0:
        raise DivisionNearZero("zero raised to a negative power")
    value = x.value ** m
    rel = math.expm1(abs(m) * math.log1p(x.rel_err())) + (abs(m).bit_length() + 1) * math.ldexp(1.0, 2 - ctx.prec)
    if m < 0:
        rel = rel / (1 - rel) if rel < 1 else math.inf
    return from_relative(value, rel)
