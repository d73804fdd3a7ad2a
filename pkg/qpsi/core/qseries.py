from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Literal, Optional

from ..errors import ConfigError, NoConvergence, PoleError
from .mpnum import (
    BoundedValue,
    EvalContext,
    bv_add,
    bv_div,
    bv_mul,
    bv_pow_int,
    from_relative,
    magnitude,
    magnitude_ratio,
    relative_residual,
)
from .qpoch import QBase, poch_int

logger = logging.getLogger(__name__)

# consecutive negligible terms required before a direction may stop
SMALL_WINDOW = 8
_TINY = 1e-300

ParamKind = Literal["plain", "vwp_pair", "qpower"]
LowerKind = Literal["zero", "minus_n", "bilateral"]


# ---------- series description ----------

@dataclass(frozen=True)
class ParamExpr:
    """One entry of a numerator or denominator list.

    plain(x)     the factor (x)_k
    vwp_pair(A)  in a numerator: (q sqrt(A), -q sqrt(A))_k; in a denominator:
                 (sqrt(A), -sqrt(A))_k. Together they contribute (1 - A q^2k)/(1 - A),
                 so sqrt(A) is never formed.
    qpower(m)    exactly q^m; lets a denominator cut the sum off structurally.
    """

    kind: ParamKind
    value: Any = None
    power: Optional[int] = None

    @property
    def width(self) -> int:
        return 2 if self.kind == "vwp_pair" else 1


def plain(x: Any) -> ParamExpr:
    return ParamExpr("plain", x)


def vwp_pair(a: Any) -> ParamExpr:
    return ParamExpr("vwp_pair", a)


def qpow(m: int) -> ParamExpr:
    return ParamExpr("qpower", None, int(m))


@dataclass(frozen=True)
class Lower:
    kind: LowerKind
    n: int = 0


ZERO = Lower("zero")
BILATERAL = Lower("bilateral")


def minus_n(n: int) -> Lower:
    if n < 0:
        raise ValueError("semi-finite depth must be nonnegative")
    return Lower("minus_n", int(n))


@dataclass(frozen=True)
class SeriesSpec:
    numer: tuple[ParamExpr, ...]
    denom: tuple[ParamExpr, ...]
    z: Any
    lower: Lower
    base: QBase
    label: str = "series"

    def __post_init__(self):
        object.__setattr__(self, "numer", tuple(self.numer))
        object.__setattr__(self, "denom", tuple(self.denom))
        top = sum(p.width for p in self.numer)
        bottom = sum(p.width for p in self.denom)
        if self.lower.kind == "zero" and top != bottom + 1:
            raise ConfigError(f"{self.label}: unilateral series needs s numerator and s-1 denominator entries")
        if self.lower.kind != "zero" and top != bottom:
            raise ConfigError(f"{self.label}: bilateral and semi-finite series need as many numerator as denominator entries")
        up = [p.value for p in self.numer if p.kind == "vwp_pair"]
        down = [p.value for p in self.denom if p.kind == "vwp_pair"]
        if len(up) != len(down) or any(x is not y and x != y for x, y in zip(up, down)):
            raise ConfigError(f"{self.label}: very-well-poised pairs must match between numerator and denominator")

    def q_value(self, ctx: EvalContext):
        return self.base.value(ctx)

    def entry_value(self, p: ParamExpr, ctx: EvalContext):
        if p.kind == "qpower":
            return self.q_value(ctx) ** p.power
        return ctx.convert(p.value)

    @property
    def cutoff(self) -> Optional[int]:
        """Lowest index with a possibly nonzero term, or None when unbounded below."""
        if self.lower.kind == "zero":
            return 0
        if self.lower.kind == "minus_n":
            return -self.lower.n
        powers = [p.power for p in self.denom if p.kind == "qpower" and p.power >= 1]
        return 1 - min(powers) if powers else None


@dataclass(frozen=True)
class EvalResult:
    value: BoundedValue
    terms_up: int
    terms_down: int
    tail_bound: float
    converged: bool = True

    def summary(self) -> dict:
        ctx = self.value.context
        return {
            "terms_up": self.terms_up,
            "terms_down": self.terms_down,
            "tail_bound": repr(self.tail_bound),
            "abs_err": ctx.nstr(self.value.abs_err, 6),
            "converged": self.converged,
        }


# ---------- resolved numeric form ----------

@dataclass
class _Factor:
    value: Any
    mag: float
    rel: float
    label: str


@dataclass
class _Resolved:
    spec: SeriesSpec
    q: Any
    q2: Any
    qm: float
    z: Any
    zm: float
    z_rel: float
    num: list[_Factor] = field(default_factory=list)
    den: list[_Factor] = field(default_factory=list)
    vwp: list[_Factor] = field(default_factory=list)

    def up_bound(self, k: int) -> float:
        """Bound on |t_{j+1}/t_j| valid for every j >= k."""
        qk = self.qm**k
        r = self.zm
        for f in self.num:
            r *= 1 + f.mag * qk
        for f in self.den:
            d = 1 - f.mag * qk
            if d <= 0:
                return math.inf
            r /= d
        for f in self.vwp:
            d = 1 - f.mag * qk * qk
            if d <= 0:
                return math.inf
            r *= (1 + f.mag * qk * qk * self.qm * self.qm) / d
        return r

    def down_bound(self, k: int) -> float:
        """Bound on |t_{j-1}/t_j| valid for every j <= k."""
        span = 1 - k
        ql = self.qm**span
        r = 1 / self.zm
        for f in self.den:
            r *= f.mag + ql
        for f in self.num:
            d = f.mag - ql
            if d <= 0:
                return math.inf
            r /= d
        for f in self.vwp:
            d = f.mag - self.qm ** (2 * span - 2)
            if d <= 0:
                return math.inf
            r *= (f.mag + self.qm ** (2 * span)) / (d * self.qm * self.qm)
        return r

    def up_limit(self) -> float:
        return self.zm

    def down_limit(self) -> float:
        r = 1 / self.zm
        for f in self.den:
            r *= f.mag
        for f in self.num:
            if f.mag == 0:
                return math.inf
            r /= f.mag
        return r / self.qm ** (2 * len(self.vwp))


def _resolve(spec: SeriesSpec, ctx: EvalContext) -> _Resolved:
    q = spec.q_value(ctx)
    z = ctx.convert(spec.z)
    res = _Resolved(spec, q, q * q, spec.base.modulus, z, magnitude(z), ctx.rel_in)

    def rel_of(p: ParamExpr) -> float:
        if p.kind == "qpower":
            return (abs(p.power).bit_length() + 1) * ctx.unit
        return ctx.rel_in

    for i, p in enumerate(spec.numer):
        v = spec.entry_value(p, ctx)
        target = res.vwp if p.kind == "vwp_pair" else res.num
        target.append(_Factor(v, magnitude(v), rel_of(p), f"{spec.label} numer[{i}]"))
    for i, p in enumerate(spec.denom):
        if p.kind == "vwp_pair":
            continue
        v = spec.entry_value(p, ctx)
        res.den.append(_Factor(v, magnitude(v), rel_of(p), f"{spec.label} denom[{i}]"))
    if spec.lower.kind == "zero":
        res.den.append(_Factor(q, spec.base.modulus, 0.0, f"{spec.label} (q)_k"))
    return res


class _Recurrence:
    """Walks t_k by one-step ratios, keeping x q^k iterates for every factor."""

    def __init__(self, res: _Resolved, k: int, ctx: EvalContext):
        self.res = res
        self.k = k
        self.u = ctx.unit
        self.delta = ctx.pole_distance_min
        qk = res.q**k
        drift = (abs(k).bit_length() + 2) * self.u
        self.num = [f.value * qk for f in res.num]
        self.den = [f.value * qk for f in res.den]
        self.vwp = [f.value * qk * qk for f in res.vwp]
        self.num_rel = [f.rel + drift for f in res.num]
        self.den_rel = [f.rel + drift for f in res.den]
        self.vwp_rel = [f.rel + 2 * drift for f in res.vwp]

    def _factor(self, x: Any, rel_x: float, guard: Optional[str]) -> tuple[Any, float]:
        f = 1 - x
        fm = magnitude(f)
        if guard is not None and fm < self.delta:
            raise PoleError(guard, k=self.k, distance=fm)
        if f == 0:
            return f, 0.0
        return f, magnitude_ratio(x, f) * rel_x + 2 * self.u

    def up(self) -> tuple[Any, float]:
        """t_{k+1}/t_k and its relative error; advances k."""
        res, u = self.res, self.u
        ratio = res.z
        rel = res.z_rel + u
        for i, x in enumerate(self.num):
            f, r = self._factor(x, self.num_rel[i], None)
            ratio *= f
            rel += r
            self.num[i] = x * res.q
            self.num_rel[i] += u
        for i, x in enumerate(self.den):
            f, r = self._factor(x, self.den_rel[i], res.den[i].label)
            ratio /= f
            rel += r
            self.den[i] = x * res.q
            self.den_rel[i] += u
        for i, y in enumerate(self.vwp):
            y_next = y * res.q2
            fd, rd = self._factor(y, self.vwp_rel[i], res.vwp[i].label)
            fn, rn = self._factor(y_next, self.vwp_rel[i] + 2 * u, None)
            ratio = ratio * fn / fd
            rel += rd + rn
            self.vwp[i] = y_next
            self.vwp_rel[i] += 2 * u
        self.k += 1
        return ratio, rel

    def down(self) -> tuple[Any, float]:
        """t_{k-1}/t_k and its relative error; moves k down by one."""
        res, u = self.res, self.u
        self.k -= 1
        inv = 1 / res.z
        rel = res.z_rel + u
        for i, x in enumerate(self.den):
            x = x / res.q
            self.den[i] = x
            self.den_rel[i] += u
            f, r = self._factor(x, self.den_rel[i], None)
            inv *= f
            rel += r
        for i, x in enumerate(self.num):
            x = x / res.q
            self.num[i] = x
            self.num_rel[i] += u
            f, r = self._factor(x, self.num_rel[i], res.num[i].label)
            inv /= f
            rel += r
        for i, y in enumerate(self.vwp):
            y_prev = y / res.q2
            fd, rd = self._factor(y, self.vwp_rel[i], res.vwp[i].label)
            self.vwp_rel[i] += 2 * u
            fn, rn = self._factor(y_prev, self.vwp_rel[i], None)
            inv = inv * fn / fd
            rel += rd + rn
            self.vwp[i] = y_prev
        return inv, rel


# ---------- operations ----------

def term_ratio(spec: SeriesSpec, k: int, ctx: EvalContext) -> BoundedValue:
    """t_{k+1}/t_k = z prod(1 - a_i q^k)/prod(1 - b_j q^k), vwp pairs giving (1 - Aq^{2k+2})/(1 - Aq^{2k})."""
    rec = _Recurrence(_resolve(spec, ctx), k, ctx)
    ratio, rel = rec.up()
    return from_relative(ratio, math.expm1(rel))


def term_direct(spec: SeriesSpec, k: int, ctx: EvalContext) -> BoundedValue:
    """t_k from Pochhammer quotients; the reference the recurrence is checked against."""
    cutoff = spec.cutoff
    if cutoff is not None and k < cutoff:
        return ctx.exact(0)
    base = spec.base
    q = spec.q_value(ctx)
    value = ctx.exact(1)
    for p in spec.numer:
        if p.kind == "vwp_pair":
            a = ctx.convert(p.value)
            top = from_relative(1 - a * q ** (2 * k), _vwp_rel(a, k, q, ctx))
            bottom = from_relative(1 - a, ctx.rel_in * magnitude(a) / max(magnitude(1 - a), _TINY) + ctx.unit)
            if bottom.magnitude() < ctx.pole_distance_min:
                raise PoleError(f"{spec.label} vwp 1-A", k=k, distance=bottom.magnitude())
            value = bv_mul(value, bv_div(top, bottom))
        else:
            value = bv_mul(value, poch_int(spec.entry_value(p, ctx), k, base, ctx))
    for p in spec.denom:
        if p.kind == "vwp_pair":
            continue
        value = bv_div(value, poch_int(spec.entry_value(p, ctx), k, base, ctx, guard=True))
    if spec.lower.kind == "zero":
        value = bv_div(value, poch_int(q, k, base, ctx))
    z = ctx.rounded(spec.z, ctx.rel_in) if spec.z != 0 else ctx.exact(0)
    if k:
        value = bv_mul(value, bv_pow_int(z, k))
    return value


def _vwp_rel(a: Any, k: int, q: Any, ctx: EvalContext) -> float:
    x = a * q ** (2 * k)
    d = 1 - x
    ratio = magnitude_ratio(x, d) if d != 0 else magnitude(x) / _TINY
    return ratio * (ctx.rel_in + (abs(2 * k).bit_length() + 2) * ctx.unit) + ctx.unit


def direct_sum(spec: SeriesSpec, k_lo: int, k_hi: int, ctx: EvalContext) -> BoundedValue:
    """Brute-force sum of term_direct over k_lo <= k <= k_hi (no tail)."""
    total = ctx.exact(0)
    for k in range(k_lo, k_hi + 1):
        total = bv_add(total, term_direct(spec, k, ctx))
    return total


def _sum_upward(res: _Resolved, ctx: EvalContext, k0: int, start: BoundedValue) -> tuple[Any, float, int, float]:
    u = ctx.unit
    eps = ctx.eps
    if res.up_limit() >= 1:
        raise NoConvergence(f"{res.spec.label}: upward terms do not decay (|z| >= 1)")
    rec = _Recurrence(res, k0, ctx)
    t = start.value
    rel_t = start.rel_err()
    total = t
    err = magnitude(t) * rel_t
    terms = 1
    small = 0
    tail = math.inf
    while True:
        ratio, rel_r = rec.up()
        t = t * ratio
        rel_t += rel_r + u
        total = total + t
        terms += 1
        mt = magnitude(t)
        ms = magnitude(total)
        err += mt * rel_t + u * ms
        threshold = eps * max(ms, _TINY)
        small = small + 1 if mt <= threshold else 0
        if small >= SMALL_WINDOW:
            if mt == 0:
                tail = 0.0
                break
            r = res.up_bound(rec.k)
            if r < 1:
                tail = mt * r / (1 - r)
                if tail <= threshold:
                    break
        if terms >= ctx.max_terms:
            raise NoConvergence(f"{res.spec.label}: upward sum not certified within {ctx.max_terms} terms")
    return total, err, terms, tail


def _sum_downward(res: _Resolved, ctx: EvalContext, cutoff: Optional[int]) -> tuple[Any, float, int, float]:
    u = ctx.unit
    eps = ctx.eps
    mp = ctx.mp
    if cutoff is None and res.down_limit() >= 1:
        raise NoConvergence(f"{res.spec.label}: downward terms do not decay")
    rec = _Recurrence(res, 0, ctx)
    t = mp.one
    rel_t = 0.0
    total = mp.zero
    err = 0.0
    terms = 0
    small = 0
    tail = 0.0
    while cutoff is None or rec.k > cutoff:
        inv, rel_r = rec.down()
        t = t * inv
        rel_t += rel_r + u
        total = total + t
        terms += 1
        mt = magnitude(t)
        ms = magnitude(total)
        err += mt * rel_t + u * ms
        if cutoff is not None:
            continue
        threshold = eps * max(ms, _TINY)
        small = small + 1 if mt <= threshold else 0
        if small >= SMALL_WINDOW:
            if mt == 0:
                break
            r = res.down_bound(rec.k)
            if r < 1:
                tail = mt * r / (1 - r)
                if tail <= threshold:
                    break
        if terms >= ctx.max_terms:
            raise NoConvergence(f"{res.spec.label}: downward sum not certified within {ctx.max_terms} terms")
    return total, err, terms, tail


def eval_series(spec: SeriesSpec, ctx: EvalContext) -> EvalResult:
    """Sum a unilateral, semi-finite or bilateral series with a certified error bound."""
    mp = ctx.mp
    res = _resolve(spec, ctx)
    if res.z == 0:
        if spec.lower.kind != "zero":
            raise ConfigError(f"{spec.label}: z = 0 only makes sense for a unilateral series")
        return EvalResult(ctx.exact(1), 1, 0, 0.0)

    cutoff = spec.cutoff
    k0 = -spec.lower.n if spec.lower.kind == "minus_n" else 0
    start = term_direct(spec, k0, ctx) if k0 else ctx.exact(1)
    up_total, up_err, up_terms, up_tail = _sum_upward(res, ctx, k0, start)

    down_total, down_err, down_terms, down_tail = mp.zero, 0.0, 0, 0.0
    if spec.lower.kind == "bilateral" and (cutoff is None or cutoff < 0):
        down_total, down_err, down_terms, down_tail = _sum_downward(res, ctx, cutoff)

    value = up_total + down_total
    tail = up_tail + down_tail
    abs_err = mp.mpf(up_err + down_err + tail) + abs(value) * ctx.unit
    logger.debug(
        "%s: %d up / %d down terms, tail %.3e, err %.3e",
        spec.label, up_terms, down_terms, tail, float(abs_err),
    )
    return EvalResult(BoundedValue(value, abs_err), up_terms, down_terms, tail)


def shift_series(spec: SeriesSpec, n: int, ctx: EvalContext) -> tuple[BoundedValue, SeriesSpec]:
    """Rewrite sum_{k>=0} t_k as t_n * sum_{k>=-n} s_k.

    Every parameter p becomes p q^n, vwp(A) becomes vwp(A q^2n) and the implicit
    (q)_k becomes an explicit q^{1+n}; the prefactor is the term t_n itself.
    """
    if spec.lower.kind != "zero":
        raise ConfigError("only unilateral series can be shifted")
    if n == 0:
        return ctx.exact(1), spec
    q = spec.q_value(ctx)
    qn = q**n

    def moved(p: ParamExpr) -> ParamExpr:
        if p.kind == "qpower":
            return qpow(p.power + n)
        if p.kind == "vwp_pair":
            return vwp_pair(ctx.convert(p.value) * qn * qn)
        return plain(ctx.convert(p.value) * qn)

    numer = tuple(moved(p) for p in spec.numer)
    denom = (qpow(1 + n),) + tuple(moved(p) for p in spec.denom)
    shifted = SeriesSpec(numer, denom, spec.z, minus_n(n), spec.base, label=f"{spec.label} shifted by {n}")
    return term_direct(spec, n, ctx), shifted


def verify_shift_invariance(spec: SeriesSpec, n: int, ctx: EvalContext):
    """Relative difference between sum_{k>=0} a(k) and sum_{k>=-n} a(k+n)."""
    direct = eval_series(spec, ctx).value
    if n == 0:
        return relative_residual(direct, direct, ctx)
    prefactor, shifted = shift_series(spec, n, ctx)
    moved = bv_mul(prefactor, eval_series(shifted, ctx).value)
    return relative_residual(direct, moved, ctx)

