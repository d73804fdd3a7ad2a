import json

import pytest

from qpsi.config import sweep_config
from qpsi.core.mpnum import EvalContext
from qpsi.errors import ConfigError
from qpsi.identities import IdentityId, ParamSet, check_identity, solve_constraints
from qpsi.limit.dominance import dominance_probe, fit_dominance
from qpsi.limit.run import LimitRow, LimitStudyResult, main, n_grid, run_limit_study
from qpsi.verify.sampler import sample_params

# |b| = qa^2/cdef = 0.25
SEMI_6PSI6 = {"q": 0.25, "a": 0.2, "c": 0.4, "d": 0.5, "e": 0.4, "f": 0.5}


@pytest.fixture(scope="module")
def study():
    params = solve_constraints(IdentityId.SEMI_6PSI6, SEMI_6PSI6, limit=True)
    return run_limit_study(IdentityId.SEMI_6PSI6, params, [0, 1, 2, 5, 10, 20, 40], EvalContext(precision_digits=50))


def test_fit_recovers_geometric_envelope():
    points = [(k, 2.0 * 0.5 ** abs(k)) for k in range(-6, 7)]
    fit = fit_dominance(points)
    assert fit.r == pytest.approx(0.5)
    assert fit.C == pytest.approx(2.0)
    assert fit.dominated
    assert all(m <= fit.C * fit.r ** abs(k) * (1 + 1e-9) for k, m in points)


def test_fit_needs_two_points():
    with pytest.raises(ValueError):
        fit_dominance([(0, 1.0), (1, 0.0)])


def test_default_depth_grid():
    assert n_grid(40) == [0, 1, 2, 5, 10, 20, 40]
    assert n_grid(7) == [0, 1, 2, 5, 7]
    assert n_grid(60)[-1] == 60


def test_semi_finite_6psi6_reaches_bailey_sum(study):
    gaps = study.gaps()
    assert study.target is IdentityId.SIXPSI6_SUM
    assert gaps[-1] < 1e-20
    assert study.reached(1e-15) is not None
    assert study.decreasing_from() is not None
    assert study.decreasing_from() <= 20
    vanishing = [r.vanishing_term.magnitude() for r in study.rows]
    assert all(later < earlier for earlier, later in zip(vanishing[3:], vanishing[4:]))


def test_depth_zero_row_is_the_finite_identity(study, ctx):
    row = study.rows[0]
    report = check_identity(IdentityId.SEMI_6PSI6, study.params.model_copy(update={"n": 0}), ctx)
    assert row.n == 0
    assert report.passed
    assert row.semi_finite_lhs.value == report.lhs.value


def test_rows_serialize(study):
    df = study.frame()
    assert list(df["n"]) == [0, 1, 2, 5, 10, 20, 40]
    assert {"semi_finite_lhs", "bilateral_target", "vanishing_abs", "gap"} <= set(df.columns)


def test_decreasing_from_detects_tail(ctx):
    zero = ctx.exact(0)
    rows = [LimitRow(n=n, semi_finite_lhs=zero, bilateral_target=zero, vanishing_term=zero, gap=g)
            for n, g in zip([0, 1, 2, 3], [1.0, 2.0, 0.5, 0.1])]
    result = LimitStudyResult(
        identity=IdentityId.SEMI_6PSI6, target=IdentityId.SIXPSI6_SUM, params=ParamSet(q=0.3), rows=rows
    )
    assert result.decreasing_from() == 1
    assert result.reached(0.5) == 2


def test_limit_needs_a_semi_finite_identity(ctx):
    with pytest.raises(ConfigError):
        run_limit_study(IdentityId.SIXPSI6_SUM, ParamSet(q=0.3), [0], ctx)


def test_dominance_probe(ctx):
    params = solve_constraints(IdentityId.SEMI_6PSI6, SEMI_6PSI6, limit=True)
    fit = dominance_probe(IdentityId.SEMI_6PSI6, params, [0, 5, 10, 20], ctx, window=10)
    assert fit.dominated
    assert all(m <= fit.C * fit.r ** abs(k) * (1 + 1e-9) for k, m in fit.points)


def test_limit_command(tmp_path):
    params = tmp_path / "params.json"
    params.write_text(json.dumps({k: str(v) for k, v in SEMI_6PSI6.items()}), encoding="utf-8")
    out = tmp_path / "limit.json"
    code = main(["--identity", "SEMI_6PSI6", "--params", str(params), "--n", "0,10,40",
                 "--format", "json", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["target"] == "SIXPSI6_SUM"
    assert [r["n"] for r in payload["rows"]] == [0, 10, 40]


@pytest.mark.slow
@pytest.mark.parametrize("identity", [IdentityId.SEMI_8PHI7, IdentityId.SEMI_10PHI9])
def test_transformation_limits(ctx, identity):
    config = sweep_config({}, identity=identity, samples=1, seed=42, n_values=[0])
    [(_, params)] = sample_params(config, limit=True)
    study = run_limit_study(identity, params, [0, 5, 10, 20, 40, 60], ctx)
    assert study.gaps()[-1] < study.gaps()[0]
    assert study.reached(1e-15) is not None
