from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Optional

from ..core.mpnum import BoundedValue, EvalContext, bv_div, bv_mul, bv_neg, bv_pow_int, bv_sum
from ..core.qpoch import INFINITE, QBase, pole_distance, poch_multi
from ..core.qseries import BILATERAL, ZERO, SeriesSpec, eval_series, minus_n, plain, qpow, vwp_pair
from ..errors import QpsiError

logger = logging.getLogger(__name__)


# ---------- declarative pieces of an identity ----------

@dataclass(frozen=True)
class Term:
    """sign * prod(x^m) * (inf_num)_inf/(inf_den)_inf * (fin_num)_n/(fin_den)_n * series."""

    label: str
    sign: int = 1
    scalars: tuple[tuple[Any, int], ...] = ()
    inf_num: tuple[Any, ...] = ()
    inf_den: tuple[Any, ...] = ()
    fin_num: tuple[Any, ...] = ()
    fin_den: tuple[Any, ...] = ()
    series: Optional[SeriesSpec] = None


@dataclass(frozen=True)
class Sides:
    lhs: tuple[Term, ...]
    rhs: tuple[Term, ...]
    n: int = 0


def phi_vwp(A, numer, denom, z, base: QBase, label: str) -> SeriesSpec:
    """Unilateral very-well-poised series with leading parameter A."""
    return SeriesSpec(
        (plain(A), vwp_pair(A), *map(plain, numer)),
        (vwp_pair(A), *map(plain, denom)),
        z, ZERO, base, label,
    )


def psi_vwp(A, numer, denom, z, base: QBase, label: str) -> SeriesSpec:
    """Bilateral very-well-poised series; denominator entries may already be ParamExpr."""
    return SeriesSpec(
        (vwp_pair(A), *map(plain, numer)),
        (vwp_pair(A), *(p if hasattr(p, "kind") else plain(p) for p in denom)),
        z, BILATERAL, base, label,
    )


def semi_vwp(A, q, n: int, numer, denom, z, base: QBase, label: str) -> SeriesSpec:
    """sum over k >= -n with leading numerator A q^-n and denominator q^(1+n)."""
    return SeriesSpec(
        (plain(A * q ** (-n)), vwp_pair(A), *map(plain, numer)),
        (qpow(1 + n), vwp_pair(A), *map(plain, denom)),
        z, minus_n(n), base, label,
    )


# ---------- evaluation ----------

def evaluate_term(term: Term, n: int, base: QBase, ctx: EvalContext) -> tuple[BoundedValue, Optional[dict]]:
    value = ctx.exact(1)
    for x, m in term.scalars:
        value = bv_mul(value, bv_pow_int(ctx.rounded(x, ctx.rel_in), m))
    if term.inf_num:
        value = bv_mul(value, poch_multi(term.inf_num, INFINITE, base, ctx))
    if term.inf_den:
        value = bv_div(value, poch_multi(term.inf_den, INFINITE, base, ctx, guard=True))
    if term.fin_num:
        value = bv_mul(value, poch_multi(term.fin_num, n, base, ctx))
    if term.fin_den:
        value = bv_div(value, poch_multi(term.fin_den, n, base, ctx, guard=True))
    diagnostics = None
    if term.series is not None:
        result = eval_series(term.series, ctx)
        value = bv_mul(value, result.value)
        diagnostics = result.summary()
    if term.sign < 0:
        value = bv_neg(value)
    return value, diagnostics


def evaluate_side(
    terms: tuple[Term, ...], n: int, base: QBase, ctx: EvalContext, component: str
) -> tuple[BoundedValue, dict]:
    values: list[BoundedValue] = []
    diagnostics: dict[str, dict] = {}
    for term in terms:
        try:
            value, diag = evaluate_term(term, n, base, ctx)
        except QpsiError as err:
            raise err.at(f"{component} {term.label}")
        if diag is not None:
            diagnostics[f"{component} {term.label}"] = diag
        values.append(value)
    return bv_sum(values, ctx), diagnostics


# ---------- pole guard walk ----------

def _series_walk(spec: SeriesSpec, q: complex) -> list[tuple[str, complex, complex, Optional[int], Optional[int]]]:
    """(label, x, base, lo, hi) for every factor 1 - x base^j the evaluator divides by."""
    kind = spec.lower.kind
    lo = spec.cutoff
    den_lo = lo if kind == "minus_n" else 0
    checks = []
    for i, p in enumerate(spec.denom):
        if p.kind == "plain":
            checks.append((f"{spec.label} denom[{i}]", p.value, q, den_lo, None))
    for i, p in enumerate(spec.numer):
        if p.kind == "plain" and kind != "zero":
            checks.append((f"{spec.label} numer[{i}]", p.value, q, lo, -1))
        elif p.kind == "vwp_pair":
            checks.append((f"{spec.label} vwp[{i}]", p.value, q * q, lo if kind != "zero" else 0, None))
    return checks


def pole_walk(sides: Sides, base: QBase, delta: float) -> Optional[str]:
    """First denominator factor closer than delta to zero, in machine precision, or None."""
    q = complex(base.q)
    for side_name, terms in (("lhs", sides.lhs), ("rhs", sides.rhs)):
        for term in terms:
            checks = [(f"({x})_inf", x, q, 0, None) for x in term.inf_den]
            if sides.n:
                checks += [(f"({x})_n", x, q, 0, sides.n - 1) for x in term.fin_den]
            if term.series is not None:
                checks += _series_walk(term.series, q)
            for label, x, qq, lo, hi in checks:
                try:
                    dist = pole_distance(complex(x), qq, lo, hi)
                except (OverflowError, ValueError, ZeroDivisionError):
                    return f"{side_name} {term.label} {label}"
                if dist < delta:
                    return f"{side_name} {term.label} {label}"
    return None


def vanishing_walk(sides: Sides, base: QBase, delta: float) -> Optional[str]:
    """First product numerator factor within delta of zero, or zero scalar, or None.

    A vanishing product side turns the identity into 0 = 0 while its series
    side still cancels only to working precision.
    """
    q = complex(base.q)
    for side_name, terms in (("lhs", sides.lhs), ("rhs", sides.rhs)):
        for term in terms:
            checks = [(f"({x})_inf", x, 0, None) for x in term.inf_num]
            if sides.n:
                checks += [(f"({x})_n", x, 0, sides.n - 1) for x in term.fin_num]
            for label, x, lo, hi in checks:
                try:
                    dist = pole_distance(complex(x), q, lo, hi)
                except (OverflowError, ValueError, ZeroDivisionError):
                    continue
                if dist < delta:
                    return f"{side_name} {term.label} {label}"
            for x, m in term.scalars:
                if m > 0 and complex(x) == 0:
                    return f"{side_name} {term.label} scalar {x}"
    return None


# ---------- parameter values ----------

def numeric_values(params, ctx: Optional[EvalContext] = None) -> dict[str, Any]:
    """q and the free parameters as working-precision numbers (machine numbers without ctx)."""
    raw = {"q": params.q, **params.free()}
    if ctx is None:
        return {k: (v.real if v.imag == 0 else v) for k, v in raw.items()}
    return {k: ctx.convert(v) for k, v in raw.items()}
