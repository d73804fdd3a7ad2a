from __future__ import annotations

import logging
from typing import Any, Mapping, Optional, Union

from pydantic import ValidationError

from ..core.mpnum import EvalContext
from ..core.qpoch import QBase
from ..errors import ConfigError, ConstraintViolation
from .catalog import IdentityDef, get_identity
from .forms import numeric_values, pole_walk, vanishing_walk
from .schema import IdentityId, ParamSet

logger = logging.getLogger(__name__)


def resolve(definition: IdentityDef, params: ParamSet, ctx: Optional[EvalContext] = None) -> dict[str, Any]:
    """Free and derived values; working precision with ctx, machine precision without."""
    missing = [k for k in definition.free if getattr(params, k) is None]
    if missing:
        raise ConfigError(f"{definition.id.value}: missing free parameters {', '.join(missing)}")
    v = numeric_values(params, ctx)
    v.update(definition.derive(v))
    return v


def violated_modulus(
    checks, v: Mapping[str, Any], margin: float = 0.0
) -> Optional[str]:
    for name, expr in checks:
        if abs(complex(expr(v))) >= 1 - margin:
            return name
    return None


def failed_guard(definition: IdentityDef, v: Mapping[str, Any], delta: float) -> Optional[str]:
    for name, expr in definition.guards:
        if abs(complex(expr(v))) <= delta:
            return name
    return None


def solve_constraints(
    identity: Union[IdentityId, str],
    free_params: Union[ParamSet, Mapping[str, Any]],
    *,
    margin: float = 0.0,
    pole_distance_min: float = 1e-3,
    pole_margin: float = 1.0,
    derived_range: Optional[tuple[float, float]] = None,
    limit: bool = False,
) -> ParamSet:
    """Complete a set of free parameters into an admissible ParamSet.

    Derived parameters follow the identity's constraint. Every convergence modulus
    must stay below 1 - margin, every degeneracy guard above pole_distance_min, and
    the machine-precision pole walk must keep all denominator factors at least
    pole_margin * pole_distance_min away from zero. Product-side numerator factors must
    stay pole_distance_min away from zero as well.
    """
    definition = get_identity(identity)
    if not isinstance(free_params, ParamSet):
        try:
            free_params = ParamSet(**dict(free_params))
        except ValidationError as err:
            raise ConfigError(f"invalid parameters: {err}") from err
    if not definition.semi_finite and free_params.n:
        raise ConstraintViolation(f"{definition.id.value} has no semi-finite depth (n={free_params.n})")
    try:
        v = resolve(definition, free_params)
    except ZeroDivisionError as err:
        raise ConstraintViolation(f"{definition.id.value}: derived parameter undefined ({err})") from err

    for name in definition.derived_names:
        m = abs(complex(v[name]))
        if derived_range is not None and not derived_range[0] <= m <= derived_range[1]:
            raise ConstraintViolation(f"derived |{name}| = {m:.4g} outside [{derived_range[0]}, {derived_range[1]}]")

    checks = definition.moduli + (definition.limit_moduli if limit else ())
    name = violated_modulus(checks, v, margin)
    if name:
        raise ConstraintViolation(f"convergence modulus {name} = {abs(complex(dict(checks)[name](v))):.4g} not below {1 - margin:g}")
    name = failed_guard(definition, v, pole_distance_min)
    if name:
        raise ConstraintViolation(f"degenerate parameters: {name} <= {pole_distance_min:g}")

    try:
        sides = definition.build(v, free_params.n, QBase(free_params.q))
    except ZeroDivisionError as err:
        raise ConstraintViolation(f"{definition.id.value}: parameter expression undefined ({err})") from err
    where = pole_walk(sides, QBase(free_params.q), pole_margin * pole_distance_min)
    if where:
        raise ConstraintViolation(f"pole guard: {where} within {pole_margin * pole_distance_min:g} of a pole")
    where = vanishing_walk(sides, QBase(free_params.q), pole_distance_min)
    if where:
        raise ConstraintViolation(f"vanishing factor: {where} within {pole_distance_min:g} of zero")

    derived = {k: complex(v[k]) for k in definition.derived_names}
    return free_params.model_copy(update={"derived": derived})
