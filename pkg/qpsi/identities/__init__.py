from .catalog import IDENTITIES, LIMIT_TARGETS, get_identity
from .check import check_identity
from .coefficients import coeff_alpha, coeff_beta, coeff_gamma
from .constraints import solve_constraints
from .schema import IdentityId, IdentityReport, ParamSet

__all__ = [
    "IDENTITIES",
    "LIMIT_TARGETS",
    "IdentityId",
    "IdentityReport",
    "ParamSet",
    "check_identity",
    "coeff_alpha",
    "coeff_beta",
    "coeff_gamma",
    "get_identity",
    "solve_constraints",
]
