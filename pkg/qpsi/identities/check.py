from __future__ import annotations

import logging
from typing import Union

from ..core.mpnum import EvalContext, relative_residual, to_decimal
from ..core.qpoch import QBase
from ..errors import NoConvergence, QpsiError
from .catalog import get_identity
from .constraints import resolve
from .forms import evaluate_side
from .schema import IdentityId, IdentityReport, ParamSet

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-30


def check_identity(
    identity: Union[IdentityId, str],
    params: ParamSet,
    ctx: EvalContext,
    tolerance: float = DEFAULT_TOLERANCE,
    sample_index: int = 0,
) -> IdentityReport:
    """Evaluate both sides of an identity and decide whether they agree.

    A sample passes when the symmetric relative residual is within tolerance and
    the difference is explained by the certified error bounds of the two sides.
    """
    definition = get_identity(identity)
    name = definition.id.value
    base = QBase(params.q)
    v = resolve(definition, params, ctx)
    derived = {k: to_decimal(v[k]) for k in definition.derived_names}
    try:
        sides = definition.build(v, params.n, base)
        lhs, lhs_diag = evaluate_side(sides.lhs, params.n, base, ctx, f"{name}, lhs")
        rhs, rhs_diag = evaluate_side(sides.rhs, params.n, base, ctx, f"{name}, rhs")
    except NoConvergence as err:
        if not definition.skippable:
            raise
        logger.debug("sample %d of %s skipped: %s", sample_index, name, err)
        return IdentityReport(
            identity=definition.id, params=params, sample_index=sample_index,
            skipped=True, skip_reason=str(err), derived=derived,
        )
    except ZeroDivisionError as err:
        raise QpsiError(f"parameter expression undefined: {err}", component=name) from err

    mp = ctx.mp
    residual = relative_residual(lhs, rhs, ctx)
    diff = abs(lhs.value - rhs.value)
    explained = 10 * (lhs.abs_err + rhs.abs_err) + ctx.floor * (abs(lhs.value) + abs(rhs.value))
    passed = bool(residual <= mp.mpf(tolerance) and diff <= explained)
    if not passed:
        logger.info("%s sample %d: residual %s (explained bound %s)", name, sample_index,
                    mp.nstr(residual, 5), mp.nstr(explained, 5))
    return IdentityReport(
        identity=definition.id,
        params=params,
        sample_index=sample_index,
        lhs=lhs,
        rhs=rhs,
        residual=float(residual),
        passed=passed,
        derived=derived,
        diagnostics={**lhs_diag, **rhs_diag},
    )
