from __future__ import annotations

import io
import json
from typing import Iterable, Optional

import pandas as pd
from openpyxl.styles import Alignment
from openpyxl.utils import get_column_letter

from ..identities.schema import IdentityReport

FORMATS = ("json", "csv", "text", "xlsx")


# ---------- summary ----------

def summarize(reports: Iterable[IdentityReport]) -> dict:
    reports = list(reports)
    residuals = [r.residual for r in reports if not r.skipped and r.residual is not None]
    passed = sum(1 for r in reports if r.passed)
    skipped = sum(1 for r in reports if r.skipped)
    return {
        "samples": len(reports),
        "passed": passed,
        "failed": len(reports) - passed - skipped,
        "skipped": skipped,
        "max_residual": repr(max(residuals)) if residuals else None,
    }


# ---------- flattening ----------

def reports_frame(reports: Iterable[IdentityReport]) -> pd.DataFrame:
    """One row per sample; parameters and derived values get their own columns."""
    rows = []
    for r in reports:
        rec = r.record()
        row = {"index": rec["index"], "identity": r.identity.value, "n": rec["n"], "status": r.status}
        row.update({f"param_{k}": v for k, v in rec["params"].items()})
        row.update({f"derived_{k}": v for k, v in rec["derived"].items()})
        row["residual"] = rec["residual"]
        for side in ("lhs", "rhs"):
            row[side] = rec[side]["value"] if rec[side] else None
            row[f"{side}_abs_err"] = rec[side]["abs_err"] if rec[side] else None
        row["skip_reason"] = rec["skip_reason"]
        rows.append(row)
    return pd.DataFrame(rows)


# ---------- Excel formatting helpers ----------

def _set_auto_filter_and_freeze(ws):
    ws.freeze_panes = "A2"
    ws.auto_filter.ref = ws.dimensions


def _auto_fit_columns(ws, max_width: int = 60):
    for col_idx, col_cells in enumerate(ws.columns, start=1):
        longest = max((len(str(c.value)) for c in col_cells if c.value is not None), default=0)
        ws.column_dimensions[get_column_letter(col_idx)].width = max(10, min(longest + 2, max_width))


def _wrap_columns(ws, col_names: list[str]):
    header = [c.value for c in next(ws.iter_rows(min_row=1, max_row=1))]
    name_to_idx = {name: i for i, name in enumerate(header, start=1)}
    for name in col_names:
        idx = name_to_idx.get(name)
        if not idx:
            continue
        for row in ws.iter_rows(min_row=2, min_col=idx, max_col=idx):
            for cell in row:
                cell.alignment = Alignment(wrap_text=True, vertical="top")


def _xlsx_bytes(df: pd.DataFrame, summary: dict) -> bytes:
    buf = io.BytesIO()
    with pd.ExcelWriter(buf, engine="openpyxl") as writer:
        df.to_excel(writer, sheet_name="samples", index=False)
        pd.DataFrame([summary]).to_excel(writer, sheet_name="summary", index=False)
        ws = writer.sheets["samples"]
        _set_auto_filter_and_freeze(ws)
        _wrap_columns(ws, ["lhs", "rhs", "skip_reason"])
        _auto_fit_columns(ws)
        _auto_fit_columns(writer.sheets["summary"])
    return buf.getvalue()


# ---------- emit ----------

def emit_report(
    reports: Iterable[IdentityReport],
    fmt: str = "json",
    *,
    identity: Optional[str] = None,
    seed: Optional[int] = None,
    precision: Optional[int] = None,
) -> bytes:
    """Serialize sweep reports. Numbers are decimal strings; JSON output is byte-stable."""
    reports = sorted(reports, key=lambda r: r.sample_index)
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {', '.join(FORMATS)}")
    if identity is None and reports:
        identity = reports[0].identity.value
    summary = summarize(reports)

    if fmt == "json":
        payload = {
            "identity": identity,
            "seed": seed,
            "precision": precision,
            "samples": [r.record() for r in reports],
            "summary": summary,
        }
        return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")

    df = reports_frame(reports)
    if fmt == "csv":
        return df.to_csv(index=False).encode("utf-8")
    if fmt == "xlsx":
        return _xlsx_bytes(df, summary)

    lines = [f"identity: {identity}  seed: {seed}  precision: {precision}"]
    if not df.empty:
        cols = [c for c in ("index", "n", "status", "residual", "skip_reason") if c in df.columns]
        lines.append(df[cols].to_string(index=False))
    lines.append(
        f"samples={summary['samples']} passed={summary['passed']} failed={summary['failed']} "
        f"skipped={summary['skipped']} max_residual={summary['max_residual']}"
    )
    return ("\n".join(lines) + "\n").encode("utf-8")
