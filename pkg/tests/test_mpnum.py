import pickle

import numpy as np
import pytest
from pydantic import ValidationError

from qpsi.core.mpnum import (
    BoundedValue,
    EvalContext,
    bv_add,
    bv_div,
    bv_mul,
    bv_pow_int,
    bv_prod,
    bv_sub,
    bv_sum,
    magnitude_ratio,
    mp_context,
    number_repr,
    parse_number,
    relative_residual,
    to_decimal,
)
from qpsi.errors import DivisionNearZero, NonFiniteBound, PoleError


def test_context_is_cached_per_precision():
    assert mp_context(50) is mp_context(50)
    assert mp_context(50) is not mp_context(60)
    assert mp_context(60).dps == 60


def test_precision_bounds_are_validated():
    with pytest.raises(ValidationError):
        EvalContext(precision_digits=10)
    with pytest.raises(ValidationError):
        EvalContext(precision_digits=400)


def test_default_term_threshold_follows_precision(ctx):
    assert ctx.eps == pytest.approx(1e-40)
    assert EvalContext(precision_digits=50, eps_term=1e-20).eps == 1e-20


def test_arithmetic_bounds_contain_high_precision_value(ctx):
    hi = mp_context(120)
    x = ctx.rounded(ctx.mp.mpf(1) / 3, ctx.unit)
    y = ctx.rounded(ctx.mp.mpf(2) / 7, ctx.unit)
    true_x = hi.mpf(1) / 3
    true_y = hi.mpf(2) / 7

    s = bv_add(x, y)
    p = bv_mul(x, y)
    d = bv_div(x, y)
    assert abs(hi.convert(s.value) - (true_x + true_y)) <= hi.convert(s.abs_err)
    assert abs(hi.convert(p.value) - true_x * true_y) <= hi.convert(p.abs_err)
    assert abs(hi.convert(d.value) - true_x / true_y) <= hi.convert(d.abs_err)


def test_exact_operations_carry_no_error(ctx):
    s = bv_add(ctx.exact(1), ctx.exact(2))
    assert s.value == 3
    assert s.abs_err == 0


def test_division_by_interval_containing_zero(ctx):
    mp = ctx.mp
    with pytest.raises(DivisionNearZero):
        bv_div(ctx.exact(1), BoundedValue(mp.mpf("1e-10"), mp.mpf(1)))


def test_integer_powers(ctx):
    x = ctx.rounded(0.7, ctx.rel_in)
    cube = bv_pow_int(x, 3)
    inv = bv_pow_int(x, -2)
    assert abs(cube.value - ctx.mp.mpf(0.7) ** 3) <= cube.abs_err
    assert abs(inv.value - ctx.mp.mpf(0.7) ** -2) <= inv.abs_err
    assert bv_pow_int(x, 0).value == 1


def test_residual_of_equal_values_is_zero(ctx):
    v = ctx.exact(0.5)
    assert relative_residual(v, v, ctx) == 0


def test_residual_is_symmetric_and_floored(ctx):
    a, b = ctx.exact(1), ctx.exact(1.5)
    assert relative_residual(a, b, ctx) == relative_residual(b, a, ctx)
    assert relative_residual(ctx.exact(0), ctx.exact(0), ctx) == 0


def test_bounded_value_pickles_across_processes(ctx):
    v = BoundedValue(ctx.mp.mpc(1, 2) / 3, ctx.mp.mpf("1e-45"))
    back = pickle.loads(pickle.dumps(v))
    assert back.value == v.value
    assert back.abs_err == v.abs_err
    assert back.context.dps == 50


def test_errors_pickle_with_their_state():
    err = PoleError("(0.5)_inf", k=3, distance=1e-5).with_index(1).at("SIXPHI5_SUM, rhs products")
    back = pickle.loads(pickle.dumps(err))
    assert type(back) is PoleError
    assert back.index == 1
    assert back.component == err.component
    assert str(back) == str(err)
    assert back.exit_code == 3


def test_decimal_strings(ctx):
    assert number_repr(0.1) == "0.1"
    assert number_repr(complex(0.25, -0.5)) == "0.25-0.5j"
    assert parse_number("0.25") == 0.25
    assert parse_number("0.1+0.2j") == complex(0.1, 0.2)
    assert to_decimal(ctx.mp.mpf(1) / 4) == "0.25"


def _perturbed(rng, ctx, hi):
    """(bounded value at working precision, a true value inside its bound at 120 digits)."""
    re, im = (float(v) for v in rng.uniform(0.1, 2.0, size=2) * rng.choice([-1, 1], size=2))
    exact = hi.mpc(re, im) / 3
    e = 10.0 ** -float(rng.uniform(10, 45)) * float(abs(exact))
    value = +ctx.convert(exact)
    bounded = BoundedValue(value, ctx.mp.mpf(e) + abs(value) * ctx.unit)
    true = exact + hi.mpf(0.9 * e) * int(rng.choice([-1, 1]))
    return bounded, true


def test_bounds_contain_true_values_for_random_operands(ctx):
    hi = mp_context(120)
    rng = np.random.default_rng(3)
    for _ in range(200):
        (x, tx), (y, ty) = _perturbed(rng, ctx, hi), _perturbed(rng, ctx, hi)
        for result, true in (
            (bv_add(x, y), tx + ty),
            (bv_sub(x, y), tx - ty),
            (bv_mul(x, y), tx * ty),
            (bv_div(x, y), tx / ty),
        ):
            assert abs(hi.convert(result.value) - true) <= hi.convert(result.abs_err)


def test_sum_and_product_bounds_contain_true_values(ctx):
    hi = mp_context(120)
    rng = np.random.default_rng(5)
    for _ in range(50):
        pairs = [_perturbed(rng, ctx, hi) for _ in range(4)]
        values = [v for v, _ in pairs]
        s = bv_sum(values, ctx)
        p = bv_prod(values, ctx)
        true_sum = sum((t for _, t in pairs), hi.zero)
        true_prod = hi.one
        for _, t in pairs:
            true_prod *= t
        assert abs(hi.convert(s.value) - true_sum) <= hi.convert(s.abs_err)
        assert abs(hi.convert(p.value) - true_prod) <= hi.convert(p.abs_err)
    assert bv_sum([], ctx).value == 0 and bv_prod([], ctx).value == 1


def test_cancellation_keeps_both_input_errors(ctx):
    mp = ctx.mp
    e = mp.mpf("1e-20")
    x = BoundedValue(mp.mpf(1) / 7, e)
    minus_x = BoundedValue(-mp.mpf(1) / 7, e)
    assert bv_add(x, minus_x).abs_err >= 2 * e
    assert bv_sub(x, x).abs_err >= 2 * e


def test_non_finite_bounds_are_rejected(ctx):
    mp = ctx.mp
    with pytest.raises(NonFiniteBound):
        BoundedValue(mp.one, mp.nan)
    with pytest.raises(NonFiniteBound):
        BoundedValue(mp.inf, mp.zero)
    assert NonFiniteBound("x").exit_code == 3


def test_magnitude_ratio_beyond_double_range(ctx):
    mp = ctx.mp
    x = mp.mpf("1e400")
    assert magnitude_ratio(x, 1 - x) == pytest.approx(1.0)
    assert magnitude_ratio(mp.mpf("1e-400"), mp.mpf(2)) == 0.0
    assert magnitude_ratio(0, mp.mpf(2)) == 0.0
    assert magnitude_ratio(mp.mpf(3), mp.mpf(4)) == pytest.approx(0.75)
