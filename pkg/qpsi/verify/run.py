from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from tqdm import tqdm

from ..config import SweepConfig, load_config, sweep_config
from ..core.mpnum import EvalContext
from ..errors import ConfigError, QpsiError
from ..identities.check import check_identity
from ..identities.schema import IdentityId, IdentityReport, ParamSet
from .report import emit_report, summarize
from .sampler import sample_params

logger = logging.getLogger(__name__)


@dataclass
class SweepResult:
    config: SweepConfig
    reports: list[IdentityReport] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        return summarize(self.reports)

    @property
    def all_passed(self) -> bool:
        s = self.summary
        return s["failed"] == 0


def check_sample(
    identity: IdentityId, params: ParamSet, ctx: EvalContext, tolerance: float, index: int
) -> IdentityReport:
    try:
        return check_identity(identity, params, ctx, tolerance=tolerance, sample_index=index)
    except QpsiError as err:
        raise err.at(f"sample {index}")


def run_sweep(config: SweepConfig, progress: bool = True) -> SweepResult:
    """Draw every sample of the sweep and check it; reports come back ordered by sample index."""
    ctx = config.eval_context()
    samples = sample_params(config)
    logger.info("Verifying %s: %d samples at %d digits", config.identity.value, len(samples), ctx.precision_digits)
    reports: list[IdentityReport] = []
    desc = f"Verifying {config.identity.value}"

    if config.workers == 1 or len(samples) <= 1:
        for index, params in tqdm(samples, desc=desc, disable=not progress):
            reports.append(check_sample(config.identity, params, ctx, config.tolerance, index))
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as ex:
            futs = {
                ex.submit(check_sample, config.identity, params, ctx, config.tolerance, index): index
                for index, params in samples
            }
            for fut in tqdm(as_completed(futs), total=len(futs), desc=desc, disable=not progress):
                try:
                    reports.append(fut.result())
                except QpsiError:
                    logger.error("sample %d failed with a numeric error; aborting sweep", futs[fut])
                    for other in futs:
                        other.cancel()
                    raise

    reports.sort(key=lambda r: r.sample_index)
    result = SweepResult(config, reports)
    logger.info("Finished %s: %s", config.identity.value, result.summary)
    return result


def write_output(data: bytes, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        print(f"Saved: {out}")
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from err


def build_parser(ap: Optional[argparse.ArgumentParser] = None) -> argparse.ArgumentParser:
    ap = ap or argparse.ArgumentParser(prog="qpsi verify")
    ap.add_argument("--config", default=None, help="YAML config (default configs/verify.yaml when present)")
    ap.add_argument("--identity", required=True, choices=[i.value for i in IdentityId])
    ap.add_argument("--samples", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--digits", type=int, default=None)
    ap.add_argument("--q-min", type=float, default=None)
    ap.add_argument("--q-max", type=float, default=None)
    ap.add_argument("--complex", action="store_true", default=None)
    ap.add_argument("--n", type=_int_list, default=None, help="semi-finite depths, e.g. 0,1,2,5")
    ap.add_argument("--tolerance", type=float, default=None)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--format", choices=["json", "csv", "text", "xlsx"], default=None)
    ap.add_argument("--out", default=None)
    return ap


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    cfg = load_config(args.config)
    base = sweep_config(cfg, identity=args.identity)
    q_range = None
    if args.q_min is not None or args.q_max is not None:
        q_range = (
            args.q_min if args.q_min is not None else base.q_range[0],
            args.q_max if args.q_max is not None else base.q_range[1],
        )
    return sweep_config(
        cfg,
        identity=args.identity,
        samples=args.samples,
        seed=args.seed,
        precision_digits=args.digits,
        q_range=q_range,
        complex_params=args.complex,
        n_values=args.n,
        tolerance=args.tolerance,
        workers=args.workers,
        format=args.format,
        out=args.out,
    )


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    if config.format == "xlsx" and not config.out:
        raise ConfigError("the xlsx format needs --out")
    result = run_sweep(config)
    data = emit_report(
        result.reports, config.format,
        identity=config.identity.value, seed=config.seed, precision=config.precision_digits,
    )
    write_output(data, config.out)
    return 0 if result.all_passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
