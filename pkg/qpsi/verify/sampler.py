from __future__ import annotations

import logging
import math

import numpy as np

from ..config import SweepConfig
from ..errors import ConfigError, ConstraintViolation
from ..identities.catalog import IdentityDef, get_identity
from ..identities.constraints import solve_constraints
from ..identities.schema import ParamSet

logger = logging.getLogger(__name__)

# draws allowed per requested sample before the admissible region counts as empty
REJECTIONS_PER_SAMPLE = 1000


def sample_rng(seed: int, n: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, n, index); results do not depend on draw order."""
    return np.random.default_rng([seed, n, index])


def draw_free(definition: IdentityDef, rng: np.random.Generator, config: SweepConfig) -> dict:
    lo, hi = config.modulus_range
    values: dict = {"q": float(rng.uniform(*config.q_range))}
    for name in definition.free:
        m = float(rng.uniform(lo, hi))
        if config.complex_params:
            phase = float(rng.uniform(0.0, 2 * math.pi))
            values[name] = complex(m * math.cos(phase), m * math.sin(phase))
        else:
            values[name] = m
    return values


def draw_params(
    definition: IdentityDef, config: SweepConfig, n: int, index: int, budget: int, limit: bool = False
) -> tuple[ParamSet, int]:
    """One admissible ParamSet and the number of rejected draws it took."""
    rng = sample_rng(config.seed, n, index)
    rejected = 0
    while True:
        free = draw_free(definition, rng, config)
        try:
            params = solve_constraints(
                definition.id,
                {**free, "n": n},
                margin=config.modulus_margin,
                pole_distance_min=config.pole_distance_min,
                pole_margin=2.0,
                derived_range=config.derived_range,
                limit=limit,
            )
            return params, rejected
        except ConstraintViolation as err:
            rejected += 1
            logger.debug("sample %d (n=%d) draw rejected: %s", index, n, err)
            if rejected > budget:
                raise ConfigError(
                    f"{definition.id.value}: no admissible parameters after {rejected} draws; "
                    "widen modulus_range or q_range"
                ) from err


def sample_params(config: SweepConfig, limit: bool = False) -> list[tuple[int, ParamSet]]:
    """All sample parameter sets of a sweep, indexed in (n, i) order."""
    definition = get_identity(config.identity)
    total = config.samples * len(config.n_values)
    budget = REJECTIONS_PER_SAMPLE * max(total, 1)
    out: list[tuple[int, ParamSet]] = []
    rejected = 0
    index = 0
    for n in config.n_values:
        for i in range(config.samples):
            params, r = draw_params(definition, config, n, i, budget - rejected, limit=limit)
            rejected += r
            out.append((index, params))
            index += 1
    logger.info("%s: %d parameter sets drawn, %d draws rejected", definition.id.value, len(out), rejected)
    return out
