from .dominance import DominanceFit, dominance_probe, fit_dominance
from .run import LimitRow, LimitStudyResult, run_limit_study

__all__ = ["DominanceFit", "LimitRow", "LimitStudyResult", "dominance_probe", "fit_dominance", "run_limit_study"]
