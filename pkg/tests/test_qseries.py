import numpy as np
import pytest

from qpsi.core.mpnum import EvalContext, bv_div, relative_residual
from qpsi.core.qpoch import INFINITE, QBase, poch_multi
from qpsi.core.qseries import (
    BILATERAL,
    ZERO,
    SeriesSpec,
    direct_sum,
    eval_series,
    minus_n,
    plain,
    qpow,
    shift_series,
    term_direct,
    term_ratio,
    verify_shift_invariance,
    vwp_pair,
)
from qpsi.errors import ConfigError, NoConvergence
from qpsi.identities.forms import phi_vwp, psi_vwp


def _two_phi_one(q=0.35, a=0.3, b=0.5, c=0.7, z=0.4):
    return SeriesSpec((plain(a), plain(b)), (plain(c),), z, ZERO, QBase(q), "2phi1")


def _one_psi_one(q=0.4, a=0.8, b=0.2, z=0.6):
    return SeriesSpec((plain(a),), (plain(b),), z, BILATERAL, QBase(q), "1psi1")


def test_widths_are_validated():
    with pytest.raises(ConfigError):
        SeriesSpec((plain(0.3),), (plain(0.5),), 0.4, ZERO, QBase(0.3))
    with pytest.raises(ConfigError):
        SeriesSpec((plain(0.3), plain(0.2)), (plain(0.5),), 0.4, BILATERAL, QBase(0.3))
    with pytest.raises(ConfigError):
        SeriesSpec((vwp_pair(0.3),), (vwp_pair(0.4),), 0.4, BILATERAL, QBase(0.3))


def test_depth_must_be_nonnegative():
    with pytest.raises(ValueError):
        minus_n(-1)


def test_cutoffs():
    base = QBase(0.3)
    assert _two_phi_one().cutoff == 0
    assert _one_psi_one().cutoff is None
    semi = SeriesSpec((plain(0.3),), (qpow(4),), 0.4, minus_n(3), base)
    assert semi.cutoff == -3
    cut = SeriesSpec((plain(0.3),), (qpow(3),), 0.4, BILATERAL, base)
    assert cut.cutoff == -2


def test_q_binomial_theorem(ctx):
    # sum (a)_k/(q)_k z^k = (az)_inf/(z)_inf
    q, a, z = 0.3, 0.6, 0.45
    base = QBase(q)
    spec = SeriesSpec((plain(a),), (), z, ZERO, base, "1phi0")
    result = eval_series(spec, ctx)
    am, zm = ctx.convert(a), ctx.convert(z)
    closed = bv_div(poch_multi([am * zm], INFINITE, base, ctx), poch_multi([zm], INFINITE, base, ctx))
    assert relative_residual(result.value, closed, ctx) <= 1e-38
    assert result.terms_down == 0
    assert result.converged


def test_ramanujan_sum_against_products(ctx):
    q, a, b, z = 0.4, 0.8, 0.2, 0.6
    base = QBase(q)
    result = eval_series(_one_psi_one(q, a, b, z), ctx)
    # products formed at working precision, not in machine doubles
    q, a, b, z = base.value(ctx), ctx.convert(a), ctx.convert(b), ctx.convert(z)
    closed = bv_div(
        poch_multi([q, b / a, a * z, q / (a * z)], INFINITE, base, ctx),
        poch_multi([b, q / a, z, b / (a * z)], INFINITE, base, ctx),
    )
    assert relative_residual(result.value, closed, ctx) <= 1e-38
    assert result.terms_down > 0


def test_recurrence_matches_brute_force_sum():
    ctx = EvalContext(precision_digits=80)
    spec = _one_psi_one()
    fast = eval_series(spec, ctx).value
    slow = direct_sum(spec, -300, 400, ctx)
    assert abs(fast.value - slow.value) <= fast.abs_err + slow.abs_err + ctx.floor


def test_unilateral_recurrence_matches_brute_force_sum(ctx):
    a, b, c, d, q = 0.3, 0.5, 0.6, 0.7, 0.3
    spec = phi_vwp(a, (b, c, d), (a * q / b, a * q / c, a * q / d), a * q / (b * c * d), QBase(q), "6phi5")
    fast = eval_series(spec, ctx).value
    slow = direct_sum(spec, 0, 250, ctx)
    assert abs(fast.value - slow.value) <= fast.abs_err + slow.abs_err + ctx.floor


def test_term_ratio_agrees_with_direct_terms(ctx):
    spec = _one_psi_one()
    for k in (-5, 0, 4):
        ratio = term_ratio(spec, k, ctx)
        direct = bv_div(term_direct(spec, k + 1, ctx), term_direct(spec, k, ctx))
        assert relative_residual(ratio, direct, ctx) <= 1e-40


def test_terms_below_structural_cutoff_vanish(ctx):
    base = QBase(0.3)
    bilateral = SeriesSpec((plain(0.6),), (qpow(1),), 0.5, BILATERAL, base)
    unilateral = SeriesSpec((plain(0.6),), (), 0.5, ZERO, base)
    assert term_direct(bilateral, -1, ctx).value == 0
    cut = eval_series(bilateral, ctx)
    assert cut.terms_down == 0
    assert relative_residual(cut.value, eval_series(unilateral, ctx).value, ctx) <= 1e-45


@pytest.mark.parametrize("n", [1, 3, 7])
def test_shift_invariance(ctx, n):
    assert verify_shift_invariance(_two_phi_one(), n, ctx) <= 1e-38


def test_shift_invariance_very_well_poised(ctx):
    a, b, c, d, q = 0.3, 0.5, 0.6, 0.7, 0.3
    spec = phi_vwp(a, (b, c, d), (a * q / b, a * q / c, a * q / d), a * q / (b * c * d), QBase(q), "6phi5")
    for n in (1, 4):
        assert verify_shift_invariance(spec, n, ctx) <= 1e-38


def test_shifted_series_shape(ctx):
    spec = _two_phi_one()
    prefactor, shifted = shift_series(spec, 2, ctx)
    assert shifted.lower == minus_n(2)
    assert shifted.denom[0] == qpow(3)
    assert shifted.cutoff == -2
    assert relative_residual(prefactor, term_direct(spec, 2, ctx), ctx) == 0
    one, same = shift_series(spec, 0, ctx)
    assert one.value == 1 and same is spec


def test_zero_argument(ctx):
    assert eval_series(_two_phi_one(z=0), ctx).value.value == 1
    with pytest.raises(ConfigError):
        eval_series(_one_psi_one(z=0), ctx)


def test_divergent_series_is_reported(ctx):
    with pytest.raises(NoConvergence):
        eval_series(_two_phi_one(z=1.2), ctx)
    with pytest.raises(NoConvergence):
        # |b/az| > 1: the negative-index terms grow
        eval_series(_one_psi_one(a=0.3, b=0.6, z=0.5), ctx)


def _six_psi_six(q=0.3, a=0.4, b=0.6, c=0.7, d=0.8, e=0.5):
    return psi_vwp(a, (b, c, d, e), (a * q / b, a * q / c, a * q / d, a * q / e), q * a * a / (b * c * d * e), QBase(q), "6psi6")


def _eight_psi_eight(q=0.3, a=0.5, params=(0.6, 0.7, 0.8, 0.9, 0.75, 0.65)):
    prod = 1.0
    for x in params:
        prod *= x
    denom = tuple(a * q / x for x in params)
    return psi_vwp(a, params, denom, q * q * a**3 / prod, QBase(q), "8psi8")


@pytest.mark.parametrize(
    "spec, span",
    [(_six_psi_six(), 120), (_eight_psi_eight(), 80)],
    ids=["6psi6", "8psi8"],
)
def test_bilateral_recurrence_matches_brute_force_sum(spec, span):
    ctx = EvalContext(precision_digits=60)
    result = eval_series(spec, ctx)
    slow = direct_sum(spec, -span, span, ctx)
    assert result.terms_down > 0
    assert abs(result.value.value - slow.value) <= result.value.abs_err + slow.abs_err + ctx.floor


def test_deep_downward_sum_keeps_a_finite_bound(ctx):
    # x q^k leaves the double range long before the downward terms are negligible
    q, a, b, z = 0.20501340221946834, 0.7736651948944069, 0.19831308725787747, 0.302371612015806
    base = QBase(q)
    result = eval_series(_one_psi_one(q, a, b, z), ctx)
    assert ctx.mp.isfinite(result.value.abs_err)
    assert result.terms_down > 300
    q, a, b, z = base.value(ctx), ctx.convert(a), ctx.convert(b), ctx.convert(z)
    closed = bv_div(
        poch_multi([q, b / a, a * z, q / (a * z)], INFINITE, base, ctx),
        poch_multi([b, q / a, z, b / (a * z)], INFINITE, base, ctx),
    )
    assert relative_residual(result.value, closed, ctx) <= 1e-35


def test_direct_terms_with_overflowing_iterates_stay_finite(ctx):
    # a q^(2k) reaches 1e390 at k = -150
    spec = _six_psi_six(q=0.05)
    total = direct_sum(spec, -150, 150, ctx)
    assert ctx.mp.isfinite(total.abs_err)
    fast = eval_series(spec, ctx).value
    assert abs(total.value - fast.value) <= total.abs_err + fast.abs_err + ctx.floor


def test_vwp_pair_equals_explicit_square_roots(ctx):
    a, b, c, d, q = 0.3, 0.5, 0.6, 0.7, 0.3
    base = QBase(q)
    paired = phi_vwp(a, (b, c, d), (a * q / b, a * q / c, a * q / d), a * q / (b * c * d), base, "6phi5")
    s = ctx.mp.sqrt(ctx.convert(a))
    qs = base.value(ctx) * s
    explicit = SeriesSpec(
        (plain(a), plain(qs), plain(-qs), plain(b), plain(c), plain(d)),
        (plain(s), plain(-s), plain(a * q / b), plain(a * q / c), plain(a * q / d)),
        a * q / (b * c * d),
        ZERO,
        base,
        "6phi5 explicit",
    )
    for k in range(7):
        assert relative_residual(term_direct(paired, k, ctx), term_direct(explicit, k, ctx), ctx) <= 1e-40
    assert relative_residual(eval_series(paired, ctx).value, eval_series(explicit, ctx).value, ctx) <= 1e-40


def test_shift_invariance_on_random_series(ctx):
    rng = np.random.default_rng(17)
    for _ in range(100):
        q = float(rng.uniform(0.05, 0.5))
        a, b, c = (float(x) for x in rng.uniform(0.1, 0.9, size=3))
        z = float(rng.uniform(0.05, 0.6))
        n = int(rng.integers(1, 11))
        assert verify_shift_invariance(_two_phi_one(q, a, b, c, z), n, ctx) <= 1e-38
