from __future__ import annotations

import logging
import math
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..core.mpnum import EvalContext
from ..core.qpoch import QBase
from ..core.qseries import term_direct
from ..identities.catalog import get_identity
from ..identities.constraints import resolve
from ..identities.schema import ParamSet

logger = logging.getLogger(__name__)


class DominanceFit(BaseModel):
    """|term_n(k)| <= C r^|k| for every sampled n and k."""

    C: float = Field(..., description="Constant of the dominating series")
    r: float = Field(..., description="Geometric ratio of the dominating series")
    dominated: bool
    points: list[tuple[int, float]] = Field(default_factory=list, description="(k, max_n |term_n(k)|)")


def fit_dominance(points: Sequence[tuple[int, float]]) -> DominanceFit:
    """Least-squares fit of log M(k) ~ log C + |k| log r, then C raised to bound every point."""
    usable = [(k, m) for k, m in points if m > 0 and math.isfinite(m)]
    if len(usable) < 2:
        raise ValueError("need at least two nonzero term magnitudes to fit a dominating series")
    ks = np.array([abs(k) for k, _ in usable], dtype=float)
    logs = np.log(np.array([m for _, m in usable], dtype=float))
    design = np.column_stack([np.ones_like(ks), ks])
    log_r = np.linalg.lstsq(design, logs, rcond=None)[0][1]
    r = float(np.exp(log_r))
    c = float(np.max(logs - ks * log_r))
    return DominanceFit(C=float(np.exp(c)), r=r, dominated=r < 1, points=list(points))


def term_envelope(
    identity, params: ParamSet, n_values: Iterable[int], ctx: EvalContext, window: int = 12
) -> list[tuple[int, float]]:
    """max over n of |k-th term| of the semi-finite left-hand sum, for -window <= k <= window."""
    definition = get_identity(identity)
    base = QBase(params.q)
    envelope: dict[int, float] = {}
    for n in n_values:
        p = params.model_copy(update={"n": n})
        v = resolve(definition, p, ctx)
        spec = definition.build(v, n, base).lhs[0].series
        for k in range(max(-window, -n), window + 1):
            m = term_direct(spec, k, ctx).magnitude()
            envelope[k] = max(envelope.get(k, 0.0), m)
    return sorted(envelope.items())


def dominance_probe(
    identity, params: ParamSet, n_values: Iterable[int], ctx: EvalContext, window: int = 12
) -> DominanceFit:
    fit = fit_dominance(term_envelope(identity, params, n_values, ctx, window))
    logger.info("dominance fit for %s: C=%.3e r=%.4f", identity, fit.C, fit.r)
    return fit
