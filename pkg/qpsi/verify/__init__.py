from .report import emit_report, summarize
from .run import SweepResult, run_sweep
from .sampler import sample_params

__all__ = ["SweepResult", "emit_report", "run_sweep", "sample_params", "summarize"]
