import pytest

from qpsi.config import sweep_config
from qpsi.core.mpnum import bv_div, bv_mul, relative_residual
from qpsi.core.qpoch import INFINITE, QBase, poch_multi
from qpsi.identities import IdentityId, coeff_alpha, coeff_beta, coeff_gamma, get_identity
from qpsi.identities.coefficients import tenphi9_derived
from qpsi.identities.constraints import resolve
from qpsi.identities.forms import Term, evaluate_term
from qpsi.verify.sampler import sample_params


@pytest.fixture(scope="module")
def params():
    config = sweep_config({}, identity=IdentityId.TENPHI9_4TERM, samples=1, seed=7)
    [(_, p)] = sample_params(config)
    return p


def _products(term: Term, ctx, base):
    value, _ = evaluate_term(Term("products", inf_num=term.inf_num, inf_den=term.inf_den), 0, base, ctx)
    return value


def test_derived_values():
    v = {"q": 0.5, "a": 0.5, "b": 0.6, "d": 0.7, "e": 0.8, "f": 0.9, "g": 0.4, "h": 0.3}
    out = tenphi9_derived(v)
    assert out["c"] == pytest.approx(0.25 * 0.125 / (0.6 * 0.7 * 0.8 * 0.9 * 0.4 * 0.3))
    assert out["lam"] == pytest.approx(0.5 * 0.25 / (out["c"] * 0.7 * 0.8))


def test_depth_zero_coefficients_match_four_term_prefactors(ctx, params):
    definition = get_identity(IdentityId.TENPHI9_4TERM)
    base = QBase(params.q)
    sides = definition.build(resolve(definition, params, ctx), 0, base)
    second = sides.lhs[1]
    third, fourth = sides.rhs

    assert relative_residual(coeff_alpha(params, ctx), _products(second, ctx, base), ctx) <= 1e-38
    assert relative_residual(coeff_beta(params, ctx), _products(third, ctx, base), ctx) <= 1e-38
    assert relative_residual(coeff_gamma(params, ctx), _products(fourth, ctx, base), ctx) <= 1e-38


def test_coefficients_change_with_depth(ctx, params):
    deeper = params.model_copy(update={"n": 3})
    ratio = bv_div(coeff_beta(deeper, ctx), coeff_beta(params, ctx))
    assert abs(ratio.value - 1) > 1e-10


def _quotient(ctx, base, num, den, k):
    return bv_div(poch_multi(num, k, base, ctx), poch_multi(den, k, base, ctx))


def _unnormalised(v, n, ctx, base):
    """delta_n and the raw coefficients a_n, b_n, c_n before division by delta_n."""
    q, a, b, c, d, e, f, g, h, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "g", "h", "lam"))
    qn, qm = q**n, q ** (-n)
    shifted_den = [a * q * qm * qm / c, a * q * qm / d, a * q * qm / e, a * q * qm / f, a * q * qm / g, a * q * qm / h]
    tail_den = [b * c * qn / a, b * d / a, b * e / a, b * f / a, b * g / a, b * h / a]

    delta = bv_mul(
        _quotient(
            ctx, base,
            [a * qm * qm, b * qm, c, d * qm, e * qm, f * qm, g * qm, h * qm],
            [q, a * q * qm / b] + shifted_den,
            n,
        ),
        ctx.exact((1 - a) / (1 - a * qm * qm) * qn),
    )
    raw_a = bv_mul(
        _quotient(
            ctx, base,
            [a * q * qm * qm, b * qn / a, c, d * qm, e * qm, f * qm, g * qm, h * qm],
            [b * b * q / a, a * qm / b] + shifted_den,
            INFINITE,
        ),
        _quotient(ctx, base, [b * q * qm / c] + [b * q / x for x in (d, e, f, g, h)], tail_den, INFINITE),
    )
    raw_b = bv_mul(
        bv_mul(
            _quotient(
                ctx, base,
                [a * q * qm * qm, b * qn / a] + [lam * q * qm / x for x in (f, g, h)] + [b * x / lam for x in (f, g, h)],
                [lam * q * qm * qm, b * qn / lam] + [a * q * qm / x for x in (f, g, h)] + [b * x / a for x in (f, g, h)],
                INFINITE,
            ),
            ctx.exact((1 - lam) / (1 - lam * qm * qm) * qn),
        ),
        _quotient(
            ctx, base,
            [lam * qm * qm, b * qm, lam * c / a, lam * d * qm / a, lam * e * qm / a, f * qm, g * qm, h * qm],
            [q, lam * q * qm / b, a * q * qm * qm / c, a * q * qm / d, a * q * qm / e]
            + [lam * q * qm / x for x in (f, g, h)],
            n,
        ),
    )
    raw_c = bv_mul(
        _quotient(
            ctx, base,
            [a * q * qm * qm, b * qn / a, f * qm, g * qm, h * qm, b * q / f, b * q / g, b * q / h],
            [b * b * q / lam, lam * qm / b] + shifted_den,
            INFINITE,
        ),
        _quotient(
            ctx, base,
            [lam * c / a, lam * d * qm / a, lam * e * qm / a, a * b * q * qm / (lam * c), a * b * q / (lam * d), a * b * q / (lam * e)],
            tail_den,
            INFINITE,
        ),
    )
    return delta, raw_a, raw_b, raw_c


@pytest.mark.parametrize("n", [2, 3, 4])
def test_coefficients_equal_normalised_products(ctx, params, n):
    deeper = params.model_copy(update={"n": n})
    definition = get_identity(IdentityId.TENPHI9_4TERM)
    delta, raw_a, raw_b, raw_c = _unnormalised(resolve(definition, deeper, ctx), n, ctx, QBase(params.q))
    assert relative_residual(coeff_alpha(deeper, ctx), bv_div(raw_a, delta), ctx) <= 1e-30
    assert relative_residual(coeff_beta(deeper, ctx), bv_div(raw_b, delta), ctx) <= 1e-30
    assert relative_residual(coeff_gamma(deeper, ctx), bv_div(raw_c, delta), ctx) <= 1e-30
