from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import ValidationError

from .core.mpnum import EvalContext, parse_number, to_decimal
from .core.qpoch import QBase
from .core.qseries import BILATERAL, ZERO, ParamExpr, SeriesSpec, eval_series, minus_n, plain, qpow, vwp_pair
from .config import load_config, resolve_precision
from .errors import ConfigError, QpsiError
from .identities.catalog import IDENTITIES

logger = logging.getLogger("qpsi")

COMMANDS = ("list", "verify", "limit", "eval")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# ---------- list ----------

def list_identities() -> str:
    rows = []
    for d in IDENTITIES.values():
        conv = ", ".join(name + " < 1" for name, _ in d.moduli + d.limit_moduli) or "-"
        rows.append(
            f"{d.id.value:<16} {d.shape}\n"
            f"{'':<16} {d.title}; free: {','.join(d.free)}"
            + (f"; {d.constraint}" if d.constraint else "")
            + ("; n >= 0" if d.semi_finite else "")
            + f"; convergence: {conv}"
        )
    return "\n".join(rows) + "\n"


# ---------- eval ----------

def _entry(raw: Any) -> ParamExpr:
    if isinstance(raw, dict):
        if "vwp" in raw:
            return vwp_pair(parse_number(raw["vwp"]))
        if "qpower" in raw:
            return qpow(int(raw["qpower"]))
        raise ConfigError(f"unknown series entry {raw!r}; expected a number, {{vwp: x}} or {{qpower: m}}")
    return plain(parse_number(raw))


def _lower(raw: Any):
    if raw in (None, "zero"):
        return ZERO
    if raw == "bilateral":
        return BILATERAL
    if isinstance(raw, dict) and "minus_n" in raw:
        return minus_n(int(raw["minus_n"]))
    raise ConfigError(f"unknown lower bound {raw!r}; expected zero, bilateral or {{minus_n: n}}")


def read_series_spec(path: str) -> SeriesSpec:
    """Series description from YAML (JSON is accepted as a YAML subset)."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"series spec not found: {path}")
    try:
        raw = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
        return SeriesSpec(
            tuple(_entry(x) for x in raw.get("numer", [])),
            tuple(_entry(x) for x in raw.get("denom", [])),
            parse_number(raw["z"]),
            _lower(raw.get("lower")),
            QBase(parse_number(raw["q"])),
            label=str(raw.get("label", p.stem)),
        )
    except (KeyError, ValueError, yaml.YAMLError) as err:
        raise ConfigError(f"cannot read series spec {path}: {err}") from err


def eval_main(argv: Optional[list[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="qpsi eval")
    ap.add_argument("--series-spec", required=True)
    ap.add_argument("--config", default=None)
    ap.add_argument("--digits", type=int, default=None, help="overrides QPSI_PRECISION and the config file")
    args = ap.parse_args(argv)

    spec = read_series_spec(args.series_spec)
    digits = resolve_precision(load_config(args.config), args.digits)
    try:
        ctx = EvalContext(precision_digits=digits)
    except ValidationError as err:
        raise ConfigError(f"invalid precision {digits}: {err}") from err
    result = eval_series(spec, ctx)
    print(json.dumps({
        "value": to_decimal(result.value.value),
        "precision_digits": digits,
        **result.summary(),
    }, indent=2))
    return 0


# ---------- dispatch ----------

def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = argparse.ArgumentParser(
        prog="qpsi", description="Certified numerical checks of q-series identities", allow_abbrev=False
    )
    ap.add_argument("--log-level", default="WARNING")
    ap.add_argument("command", choices=COMMANDS)
    args, rest = ap.parse_known_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format=LOG_FORMAT)

    try:
        if args.command == "list":
            sys.stdout.write(list_identities())
            return 0
        if args.command == "verify":
            from .verify.run import main as verify_main

            return verify_main(rest)
        if args.command == "limit":
            from .limit.run import main as limit_main

            return limit_main(rest)
        return eval_main(rest)
    except QpsiError as err:
        logger.error("%s", err)
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
