"""Coefficients of the semi-finite four-term 10phi9 transformation.

With lam = q a^2/(c d e) and c = q^2 a^3/(b d e f g h), the semi-finite sum plus
alpha_n times the first b-series equals beta_n times the lam-side semi-finite sum
plus gamma_n times the second b-series. Each coefficient is a signed monomial,
finite (.)_n blocks and infinite products; they are kept as Term blocks so the
evaluator and the pole walk see the same factors.
"""
from __future__ import annotations

from typing import Any

from ..core.mpnum import BoundedValue, EvalContext
from ..core.qpoch import QBase
from .forms import Term, evaluate_term, numeric_values


def tenphi9_derived(v: dict[str, Any]) -> dict[str, Any]:
    """c = q^2 a^3/(bdefgh), lam = q a^2/(cde)."""
    q, a, b, d, e, f, g, h = (v[k] for k in "qabdefgh")
    c = q * q * a**3 / (b * d * e * f * g * h)
    return {"c": c, "lam": q * a * a / (c * d * e)}


def alpha_block(v: dict[str, Any], n: int, label: str = "alpha_n") -> Term:
    q, a, b, c, d, e, f, g, h = (v[k] for k in "qabcdefgh")
    qn = q**n
    return Term(
        label,
        sign=-1,
        scalars=((b, 1), (a, -1)),
        fin_num=(q, q / a, c / b),
        fin_den=(q / b, c / a),
        inf_num=(b * q * qn / a, c * qn, a * q, b * q / c)
        + tuple(b * q / x for x in (d, e, f, g, h))
        + (d, e, f, g, h),
        inf_den=(b * c * qn / a, b * b * q / a, a * q / b, a * q / c)
        + tuple(b * x / a for x in (d, e, f, g, h))
        + tuple(a * q / x for x in (d, e, f, g, h)),
    )


def beta_block(v: dict[str, Any], n: int, label: str = "beta_n") -> Term:
    q, a, b, c, d, e, f, g, h, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "g", "h", "lam"))
    qn = q**n
    return Term(
        label,
        fin_num=(q / a, lam * c / a, a * q / (lam * d), a * q / (lam * e), b / a),
        fin_den=(q / lam, c, q / d, q / e, b / lam),
        inf_num=(a * q,)
        + tuple(b * x / lam for x in (f, g, h))
        + tuple(lam * q / x for x in (f, g, h))
        + (b * qn / a,),
        inf_den=(lam * q,)
        + tuple(b * x / a for x in (f, g, h))
        + tuple(a * q / x for x in (f, g, h))
        + (b * qn / lam,),
    )


def gamma_block(v: dict[str, Any], n: int, label: str = "gamma_n") -> Term:
    q, a, b, c, d, e, f, g, h, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "g", "h", "lam"))
    qn = q**n
    return Term(
        label,
        fin_num=(q, q / a, b / a, a * q / (lam * d), a * q / (lam * e), lam * c / (a * b)),
        fin_den=(c, c / a, q / b, q / d, q / e, q * b / lam),
        inf_num=(b * qn / a, a * q, f, g, h)
        + tuple(lam * x / a for x in (c, d, e))
        + tuple(b * q / x for x in (f, g, h))
        + tuple(a * b * q / (lam * x) for x in (c, d, e)),
        inf_den=(b * c * qn / a, b * b * q / lam)
        + tuple(a * q / x for x in (f, g, h))
        + tuple(b * x / a for x in (d, e, f, g, h))
        + (lam / b,)
        + tuple(a * q / x for x in (c, d, e)),
    )


def _coefficient(block, params, ctx: EvalContext) -> BoundedValue:
    v = numeric_values(params, ctx)
    v.update(tenphi9_derived(v))
    value, _ = evaluate_term(block(v, params.n), params.n, QBase(params.q), ctx)
    return value


def coeff_alpha(params, ctx: EvalContext) -> BoundedValue:
    return _coefficient(alpha_block, params, ctx)


def coeff_beta(params, ctx: EvalContext) -> BoundedValue:
    return _coefficient(beta_block, params, ctx)


def coeff_gamma(params, ctx: EvalContext) -> BoundedValue:
    return _coefficient(gamma_block, params, ctx)
