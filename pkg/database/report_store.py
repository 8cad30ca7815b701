"""Deterministic CSV exports for analysis results.

Columns are fixed per result type, reals carry six decimals, absent values
are empty cells and lines end in a bare newline, so identical results give
identical bytes.
"""
import csv
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from models.analysis_model import (
    SCORE_BINS,
    AdjustmentReport,
    BinDistribution,
    SnapshotSummary,
    SweepResult,
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    ["parameter_name", "parameter_value", "label", "mean", "resources"]
    + [score_bin.value for score_bin in SCORE_BINS]
    + [f"base_{score_bin.value}" for score_bin in SCORE_BINS]
)
CURVE_COLUMNS = ["series", "group", "x", "y", "resources"]
DISTRIBUTION_COLUMNS = ["score_bin", "share", "resources"]
ADJUSTMENT_COLUMNS = ["preset", "score_bin", "share_before", "share_after", "delta", "resources"]
SUMMARY_COLUMNS = ["table", "name", "resources", "share", "asset_types", "in_scope", "coverage"]

Exportable = Union[SweepResult, BinDistribution, SnapshotSummary, Sequence[AdjustmentReport]]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _shares(distribution, prefix: str = "") -> Dict[str, Any]:
    return {
        f"{prefix}{score_bin.value}": distribution.share(score_bin) if distribution else None
        for score_bin in SCORE_BINS
    }


def sweep_rows(result: SweepResult) -> List[Dict[str, Any]]:
    return [
        {
            "parameter_name": result.parameter_name,
            "parameter_value": point.parameter_value,
            "label": point.label,
            "mean": point.mean,
            "resources": point.resources,
            **_shares(point.distribution),
            **_shares(point.base_distribution, prefix="base_"),
        }
        for point in result.points
    ]


def curve_rows(result: SweepResult, series: Optional[str] = None) -> List[Dict[str, Any]]:
    curves = result.curves if series is None else result.curves_for(series)
    return [c.model_dump() for c in curves]


def distribution_rows(distribution: BinDistribution) -> List[Dict[str, Any]]:
    return [
        {
            "score_bin": score_bin.value,
            "share": distribution.share(score_bin),
            "resources": round(distribution.share(score_bin) * distribution.total_resources),
        }
        for score_bin in SCORE_BINS
    ]


def adjustment_rows(reports: Iterable[AdjustmentReport]) -> List[Dict[str, Any]]:
    return [
        {
            "preset": report.preset,
            "score_bin": delta.score_bin.value,
            "share_before": delta.share_before,
            "share_after": delta.share_after,
            "delta": delta.delta,
            "resources": report.before.total_resources,
        }
        for report in reports
        for delta in report.deltas
    ]


def summary_rows(summary: SnapshotSummary) -> List[Dict[str, Any]]:
    rows = []
    for table, breakdown in (("vendor", summary.vendors), ("domain", summary.domains)):
        rows.extend({"table": table, **row.model_dump()} for row in breakdown)
    rows.append({
        "table": "total",
        "name": "total",
        "resources": summary.total_resources,
        "share": 1.0 if summary.total_resources else 0.0,
        "asset_types": summary.total_asset_types,
        "in_scope": summary.total_in_scope,
        "coverage": summary.total_in_scope / summary.total_resources if summary.total_resources else 0.0,
    })
    return rows


def write_csv(rows: Iterable[Dict[str, Any]], columns: Sequence[str], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        count = 0
        for row in rows:
            writer.writerow({column: _cell(row.get(column)) for column in columns})
            count += 1
    logger.info(f"Wrote {count} rows to {path}")
    return path


def export_csv(result: Exportable, path: Union[str, Path]) -> Path:
    """Write a result as CSV; sweep points for a SweepResult (curves go through export_curves_csv)."""
    if isinstance(result, SweepResult):
        return write_csv(sweep_rows(result), SWEEP_COLUMNS, path)
    if isinstance(result, BinDistribution):
        return write_csv(distribution_rows(result), DISTRIBUTION_COLUMNS, path)
    if isinstance(result, SnapshotSummary):
        return write_csv(summary_rows(result), SUMMARY_COLUMNS, path)
    if isinstance(result, (list, tuple)) and all(isinstance(r, AdjustmentReport) for r in result):
        return write_csv(adjustment_rows(result), ADJUSTMENT_COLUMNS, path)
    raise TypeError(f"cannot export {type(result).__name__} as CSV")


def export_curves_csv(result: SweepResult, path: Union[str, Path], series: Optional[str] = None) -> Path:
    return write_csv(curve_rows(result, series), CURVE_COLUMNS, path)
