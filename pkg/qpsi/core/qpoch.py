from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Any, Literal, Optional, Sequence, Union

from ..errors import ConfigError, PoleError
from .mpnum import (
    BoundedValue,
    EvalContext,
    Number,
    bv_div,
    bv_mul,
    bv_prod,
    from_relative,
    magnitude,
    magnitude_ratio,
    relative_residual,
)

logger = logging.getLogger(__name__)

IndexKind = Literal["finite_nonneg", "finite_neg", "infinite"]
INFINITE = math.inf


@dataclass(frozen=True)
class QBase:
    """The base q, 0 < |q| < 1. Kept as a machine number so it is exact at any precision."""

    q: Number

    def __post_init__(self):
        m = abs(complex(self.q))
        if not 0 < m < 1:
            raise ConfigError(f"base must satisfy 0 < |q| < 1, got q={self.q!r}")

    @property
    def modulus(self) -> float:
        return abs(complex(self.q))

    def value(self, ctx: EvalContext):
        return ctx.convert(self.q)


@dataclass(frozen=True)
class PochValue(BoundedValue):
    index_kind: IndexKind = "finite_nonneg"


def _certify(value: Any, rel_sum: float, kind: IndexKind) -> PochValue:
    # product of factors (1 + e_j) with sum |e_j| <= rel_sum deviates by at most expm1(rel_sum)
    bv = from_relative(value, math.expm1(rel_sum))
    return PochValue(bv.value, bv.abs_err, kind)


def _factor_product(
    x: Any,
    q: Any,
    count: int,
    ctx: EvalContext,
    rel_x: float,
    guard: Optional[str] = None,
    k: Optional[int] = None,
) -> tuple[Any, float, float]:
    """Product of (1 - x q^j) for 0 <= j < count.

    Returns (product, summed relative error, absolute error of exactly-zero
    factors or 0). With `guard` set every factor must keep |1 - x q^j| >= delta.
    """
    mp = ctx.mp
    u = ctx.unit
    delta = ctx.pole_distance_min
    prod = mp.one
    rel = 0.0
    zero_bound = None
    for _ in range(count):
        f = 1 - x
        fm = magnitude(f)
        if guard is not None and fm < delta:
            raise PoleError(guard, k=k, distance=fm)
        if f == 0:
            xm = magnitude(x)
            zero_bound = xm * rel_x if zero_bound is None else zero_bound * xm * rel_x
        else:
            rel += magnitude_ratio(x, f) * rel_x + 2 * u
            prod *= f
        x = x * q
        rel_x += u
    if zero_bound is not None:
        return mp.zero, rel, zero_bound
    return prod, rel, 0.0


def poch_inf(
    a: Any, base: QBase, ctx: EvalContext, guard: bool = False, label: Optional[str] = None
) -> PochValue:
    """(a;q)_inf, truncated at the first J with |a||q|^J/(1-|q|) < eps_term.

    The dropped tail is bounded multiplicatively and folded into abs_err.
    """
    mp = ctx.mp
    a = ctx.convert(a)
    if a == 0:
        return PochValue(mp.one, mp.zero, "infinite")
    am = magnitude(a)
    qm = base.modulus
    eps = ctx.eps
    if am / (1 - qm) < eps:
        cutoff = 0
    else:
        cutoff = max(0, math.ceil(math.log(eps * (1 - qm) / am) / math.log(qm)))
    while am * qm**cutoff / (1 - qm) >= eps:
        cutoff += 1
    name = label or f"({mp.nstr(a, 8)})_inf"
    prod, rel, _ = _factor_product(a, base.value(ctx), cutoff, ctx, ctx.rel_in, guard=name if guard else None)
    tau = am * qm**cutoff / (1 - qm)
    rel += tau / (1 - tau)
    return _certify(prod, rel, "infinite")


def poch_int(
    a: Any, k: int, base: QBase, ctx: EvalContext, guard: bool = False, label: Optional[str] = None
) -> PochValue:
    """(a;q)_k for any integer k.

    Negative k uses the finite route 1/prod_{j=1..-k}(1 - a q^-j), always guarded.
    """
    mp = ctx.mp
    a = ctx.convert(a)
    q = base.value(ctx)
    if k == 0:
        return PochValue(mp.one, mp.zero, "finite_nonneg")
    name = label or f"({mp.nstr(a, 8)})_{k}"
    if k > 0:
        prod, rel, zero_bound = _factor_product(a, q, k, ctx, ctx.rel_in, guard=name if guard else None, k=k)
        if zero_bound:
            return PochValue(mp.zero, mp.mpf(zero_bound) * abs(prod) * (1 + mp.mpf(math.expm1(rel))), "finite_nonneg")
        return _certify(prod, rel, "finite_nonneg")
    m = -k
    x0 = a * q ** (-m)
    rel_x0 = ctx.rel_in + (m.bit_length() + 1) * ctx.unit
    prod, rel, _ = _factor_product(x0, q, m, ctx, rel_x0, guard=name, k=k)
    value = 1 / prod
    # a relative error r on the divisor becomes r/(1-r) on the quotient
    bound = math.expm1(rel + ctx.unit)
    return _certify(value, math.log1p(bound / (1 - bound)), "finite_neg")


def poch_multi(
    params: Sequence[Any],
    k: Union[int, float],
    base: QBase,
    ctx: EvalContext,
    guard: bool = False,
) -> PochValue:
    """(a_1,...,a_m)_k with k an integer or INFINITE."""
    kind: IndexKind = "infinite" if k == INFINITE else ("finite_nonneg" if k >= 0 else "finite_neg")
    factors: list[BoundedValue] = []
    for i, a in enumerate(params):
        try:
            if k == INFINITE:
                factors.append(poch_inf(a, base, ctx, guard=guard))
            else:
                factors.append(poch_int(a, int(k), base, ctx, guard=guard))
        except PoleError as err:
            raise err.with_index(i)
    total = bv_prod(factors, ctx)
    return PochValue(total.value, total.abs_err, kind)


# ---------- elementary identities ----------

class ElementaryId(str, enum.Enum):
    SHIFTED_INFINITE = "shifted_infinite"  # (xq^-2n)_inf / (xq^-2n)_n
    DOUBLE_SHIFT = "double_shift"  # (xq^-2n)_n
    SINGLE_SHIFT = "single_shift"  # (xq^-n)_n


def _signed_monomial(x: Any, n: int, q_exp_twice: int, base: QBase, ctx: EvalContext) -> BoundedValue:
    """(-1)^n x^n q^(q_exp_twice/2); q_exp_twice is always even for the identities below."""
    value = x**n * base.value(ctx) ** (q_exp_twice // 2)
    if n % 2:
        value = -value
    rel = n * ctx.rel_in + (n.bit_length() + abs(q_exp_twice).bit_length() + 4) * ctx.unit
    return from_relative(value, rel)


def elementary_id_check(which: Union[ElementaryId, str], x: Number, n: int, base: QBase, ctx: EvalContext):
    """Relative residual between the two sides of a shifted-factorial reflection identity.

      shifted_infinite: (xq^-2n)_inf/(xq^-2n)_n = (-1)^n x^n q^-(n^2+n)/2 (q/x)_n (x)_inf
      double_shift:     (xq^-2n)_n = (-1)^n x^n q^-(3n^2+n)/2 (q^(n+1)/x)_n
      single_shift:     (xq^-n)_n  = (-1)^n x^n q^-(n^2+n)/2 (q/x)_n
    """
    which = ElementaryId(which)
    if n < 1:
        raise ValueError("n must be a positive integer")
    x = ctx.convert(x)
    q = base.value(ctx)
    if which is ElementaryId.SHIFTED_INFINITE:
        shifted = x * q ** (-2 * n)
        lhs = bv_div(poch_inf(shifted, base, ctx), poch_int(shifted, n, base, ctx, guard=True))
        mono = _signed_monomial(x, n, -(n * n + n), base, ctx)
        rhs = bv_mul(bv_mul(mono, poch_int(q / x, n, base, ctx)), poch_inf(x, base, ctx))
    elif which is ElementaryId.DOUBLE_SHIFT:
        lhs = poch_int(x * q ** (-2 * n), n, base, ctx)
        mono = _signed_monomial(x, n, -(3 * n * n + n), base, ctx)
        rhs = bv_mul(mono, poch_int(q ** (n + 1) / x, n, base, ctx))
    else:
        lhs = poch_int(x * q ** (-n), n, base, ctx)
        mono = _signed_monomial(x, n, -(n * n + n), base, ctx)
        rhs = bv_mul(mono, poch_int(q / x, n, base, ctx))
    return relative_residual(lhs, rhs, ctx)


# ---------- pole distance ----------

def pole_distance(
    x: Number, q: Number, lo: Optional[int] = 0, hi: Optional[int] = None
) -> float:
    """min |1 - x q^j| over lo <= j <= hi (None means unbounded), in machine precision.

    Only the j nearest j* = -log|x|/log|q| can come close to a pole, so a short
    window around j* (clipped to the range) is inspected.
    """
    x = complex(x)
    q = complex(q)
    if x == 0:
        return 1.0
    if lo is not None and hi is not None and hi < lo:
        return math.inf
    qm = abs(q)
    jstar = -math.log(abs(x)) / math.log(qm)
    width = max(3, math.ceil(math.log(0.5) / math.log(qm)) + 1)
    centre = round(jstar)
    best = math.inf
    for d in range(-width, width + 1):
        j = centre + d
        if lo is not None:
            j = max(j, lo)
        if hi is not None:
            j = min(j, hi)
        try:
            best = min(best, abs(1 - x * q**j))
        except OverflowError:
            continue
    return best
