from __future__ import annotations

import argparse
import json
import logging
from pathlib import Path
from typing import Iterable, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from ..config import load_config, sweep_config
from ..core.mpnum import BoundedValue, EvalContext, bv_sub, parse_number, to_decimal
from ..core.qpoch import QBase
from ..errors import ConfigError
from ..identities.catalog import LIMIT_TARGETS, get_identity
from ..identities.constraints import resolve, solve_constraints
from ..identities.forms import evaluate_side, evaluate_term
from ..identities.schema import IdentityId, ParamSet
from ..verify.run import _int_list, write_output
from ..verify.sampler import REJECTIONS_PER_SAMPLE, draw_params
from .dominance import DominanceFit, dominance_probe

logger = logging.getLogger(__name__)

DEFAULT_N_GRID = (0, 1, 2, 5, 10, 20, 40, 60)


class LimitRow(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int
    semi_finite_lhs: BoundedValue
    bilateral_target: BoundedValue
    vanishing_term: BoundedValue
    gap: float = Field(..., ge=0)

    def record(self) -> dict:
        return {
            "n": self.n,
            "semi_finite_lhs": to_decimal(self.semi_finite_lhs.value),
            "bilateral_target": to_decimal(self.bilateral_target.value),
            "vanishing_term": to_decimal(self.vanishing_term.value),
            "vanishing_abs": repr(self.vanishing_term.magnitude()),
            "gap": repr(self.gap),
        }


class LimitStudyResult(BaseModel):
    identity: IdentityId
    target: IdentityId
    params: ParamSet
    rows: list[LimitRow] = Field(default_factory=list)
    dominance: Optional[DominanceFit] = None

    def gaps(self) -> list[float]:
        return [r.gap for r in self.rows]

    def reached(self, tolerance: float) -> Optional[int]:
        """First n whose gap is within tolerance."""
        return next((r.n for r in self.rows if r.gap <= tolerance), None)

    def decreasing_from(self) -> Optional[int]:
        """Smallest n from which the gap decreases strictly at every following row."""
        gaps = self.gaps()
        start = None
        for i in range(len(gaps) - 1, 0, -1):
            if gaps[i] < gaps[i - 1]:
                start = self.rows[i - 1].n
            else:
                break
        return start

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.record() for r in self.rows])


# ---------- targets ----------

def _target_params(identity: IdentityId, params: ParamSet) -> ParamSet:
    free = params.free()
    if identity is IdentityId.SEMI_6PSI6:
        # the bilateral sum reached has (b, c, d, e) renamed to (c, d, e, f)
        mapped = {"a": free["a"], "b": free["c"], "c": free["d"], "d": free["e"], "e": free["f"]}
        return ParamSet(q=params.q, **mapped)
    return ParamSet(q=params.q, **free)


def _evaluate_target(identity: IdentityId, params: ParamSet, ctx: EvalContext) -> tuple[BoundedValue, BoundedValue]:
    """(bilateral target, limit of the semi-finite right-hand side)."""
    target_id = LIMIT_TARGETS[identity]
    definition = get_identity(target_id)
    tp = _target_params(identity, params)
    base = QBase(tp.q)
    sides = definition.build(resolve(definition, tp, ctx), 0, base)
    name = target_id.value
    rhs, _ = evaluate_side(sides.rhs, 0, base, ctx, f"{name}, rhs")
    if identity is IdentityId.SEMI_6PSI6:
        # closed-form product side stands in for the 6psi6
        return rhs, rhs
    lhs, _ = evaluate_side(sides.lhs, 0, base, ctx, f"{name}, lhs")
    return lhs, rhs


def _row(identity: IdentityId, params: ParamSet, n: int, ctx: EvalContext, target, rhs_limit) -> LimitRow:
    definition = get_identity(identity)
    p = params.model_copy(update={"n": n})
    base = QBase(p.q)
    sides = definition.build(resolve(definition, p, ctx), n, base)
    name = identity.value
    semi, _ = evaluate_side(sides.lhs[:1], n, base, ctx, f"{name}, lhs")
    if identity is IdentityId.SEMI_6PSI6:
        vanishing, _ = evaluate_term(sides.rhs[0], n, base, ctx)
    else:
        rhs, _ = evaluate_side(sides.rhs, n, base, ctx, f"{name}, rhs")
        if len(sides.lhs) > 1:
            extra, _ = evaluate_side(sides.lhs[1:], n, base, ctx, f"{name}, lhs")
            rhs = bv_sub(rhs, extra)
        vanishing = bv_sub(rhs, rhs_limit)
    gap = float(abs(semi.value - target.value))
    logger.info("%s n=%d: gap %.3e, vanishing term %.3e", name, n, gap, vanishing.magnitude())
    return LimitRow(n=n, semi_finite_lhs=semi, bilateral_target=target, vanishing_term=vanishing, gap=gap)


def run_limit_study(
    identity,
    params: ParamSet,
    n_values: Iterable[int],
    ctx: EvalContext,
    dominance_window: Optional[int] = None,
) -> LimitStudyResult:
    """Follow a semi-finite identity as n grows toward the bilateral identity it tends to."""
    identity = IdentityId(identity)
    if identity not in LIMIT_TARGETS:
        raise ConfigError(f"{identity.value} has no n -> infinity limit study")
    n_values = sorted(set(n_values))
    target, rhs_limit = _evaluate_target(identity, params, ctx)
    rows = [_row(identity, params, n, ctx, target, rhs_limit) for n in n_values]
    dominance = None
    if dominance_window:
        dominance = dominance_probe(identity, params, n_values, ctx, window=dominance_window)
    return LimitStudyResult(
        identity=identity, target=LIMIT_TARGETS[identity], params=params, rows=rows, dominance=dominance
    )


# ---------- entry point ----------

def read_params_file(identity: IdentityId, path: str) -> ParamSet:
    """JSON object of decimal strings for q and the free parameters."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"params file not found: {path}")
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
        values = {k: parse_number(v) for k, v in raw.items() if k != "n"}
    except ValueError as err:
        raise ConfigError(f"cannot read params file {path}: {err}") from err
    return solve_constraints(identity, values, limit=True)


def n_grid(n_max: int) -> list[int]:
    return sorted({n for n in DEFAULT_N_GRID if n <= n_max} | {n_max})


def main(argv: Optional[list[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="qpsi limit")
    ap.add_argument("--config", default=None)
    ap.add_argument("--identity", required=True, choices=[i.value for i in LIMIT_TARGETS])
    ap.add_argument("--n-max", type=int, default=40)
    ap.add_argument("--n", type=_int_list, default=None, help="explicit comma-separated n values")
    ap.add_argument("--params", default=None, help="JSON file of decimal strings")
    ap.add_argument("--digits", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--tolerance", type=float, default=1e-15)
    ap.add_argument("--dominance-window", type=int, default=0)
    ap.add_argument("--format", choices=["json", "csv", "text"], default="text")
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    identity = IdentityId(args.identity)
    config = sweep_config(
        load_config(args.config), identity=identity, samples=1, n_values=[0],
        precision_digits=args.digits, seed=args.seed,
    )
    ctx = config.eval_context()
    if args.params:
        params = read_params_file(identity, args.params)
    else:
        params, _ = draw_params(get_identity(identity), config, 0, 0, REJECTIONS_PER_SAMPLE, limit=True)
    n_values = args.n or n_grid(args.n_max)

    result = run_limit_study(identity, params, n_values, ctx, dominance_window=args.dominance_window or None)
    df = result.frame()
    if args.format == "json":
        payload = {
            "identity": identity.value,
            "target": result.target.value,
            "params": params.decimal_strings(),
            "rows": [r.record() for r in result.rows],
            "dominance": result.dominance.model_dump() if result.dominance else None,
        }
        data = (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    elif args.format == "csv":
        data = df.to_csv(index=False).encode("utf-8")
    else:
        text = df[["n", "vanishing_abs", "gap"]].to_string(index=False)
        if result.dominance:
            text += f"\ndominance: C={result.dominance.C:.3e} r={result.dominance.r:.4f}"
        data = (text + "\n").encode("utf-8")
    write_output(data, args.out)
    return 0 if result.reached(args.tolerance) is not None else 1


if __name__ == "__main__":
    raise SystemExit(main())
