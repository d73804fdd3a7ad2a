from .mpnum import BoundedValue, EvalContext
from .qpoch import INFINITE, QBase, poch_inf, poch_int, poch_multi
from .qseries import EvalResult, SeriesSpec, eval_series

__all__ = [
    "BoundedValue",
    "EvalContext",
    "EvalResult",
    "INFINITE",
    "QBase",
    "SeriesSpec",
    "eval_series",
    "poch_inf",
    "poch_int",
    "poch_multi",
]
