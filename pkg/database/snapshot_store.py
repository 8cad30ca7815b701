"""Snapshot files on disk.

JSON Lines is the canonical format: one asset per line, field names equal to
the ``Asset`` model fields. Snapshot metadata lives next to it in a
``<stem>.meta.json`` sidecar. CSV is a flat findings-only projection, one row
per finding (or one row with an empty finding_id for an asset without findings).
"""
import csv
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple, Union

from models.asset_model import Snapshot, ValidationReport
from models.scoring_model import RankedScore, ScoreBreakdown
from services.validation_service import ValidationService

logger = logging.getLogger(__name__)

JSONL = "jsonl"
CSV = "csv"
FORMATS = (JSONL, CSV)


def detect_format(path: Path) -> str:
    suffix = path.suffix.lower().lstrip(".")
    if suffix in ("jsonl", "ndjson", "json"):
        return JSONL
    if suffix == "csv":
        return CSV
    raise ValueError(f"cannot infer snapshot format from {path.name!r}; expected .jsonl or .csv")


def sidecar_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}.meta.json")


def _read_metadata(path: Path) -> Tuple[str, Optional[datetime]]:
    """Without a sidecar the snapshot keeps the model's epoch default, never the file mtime."""
    sidecar = sidecar_path(path)
    if sidecar.exists():
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
        return meta.get("snapshot_id") or path.stem, datetime.fromisoformat(meta["created_at"])
    return path.stem, None


def _jsonl_records(path: Path, report: ValidationReport) -> Iterator[Tuple[str, Any]]:
    with path.open("rb") as f:
        for number, raw in enumerate(f, start=1):
            try:
                line = raw.decode("utf-8-sig")
            except UnicodeDecodeError as e:
                report.add(f"line {number}", f"invalid UTF-8 at byte {e.start}")
                continue
            if not line.strip():
                continue
            try:
                yield f"line {number}", json.loads(line)
            except json.JSONDecodeError as e:
                report.add(f"line {number}", f"malformed JSON: {e.msg} (column {e.colno})")


def _csv_records(path: Path, report: ValidationReport) -> List[Tuple[str, Dict[str, Any]]]:
    """Fold finding rows back into asset records, keeping first-seen asset order."""
    assets: Dict[str, Dict[str, Any]] = {}
    locations: Dict[str, str] = {}

    with path.open("r", encoding="utf-8-sig", newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in ("asset_id", "vendor", "asset_type") if c not in (reader.fieldnames or [])]
        if reader.fieldnames and missing:
            report.add("row 1", f"missing column(s) {', '.join(missing)}")
            return []

        for number, row in enumerate(reader, start=2):
            location = f"row {number}"
            asset_id = (row.get("asset_id") or "").strip()
            if not asset_id:
                report.add(location, "asset_id is empty")
                continue

            record = assets.get(asset_id)
            if record is None:
                record = assets[asset_id] = {
                    "asset_id": asset_id,
                    "vendor": row.get("vendor") or "",
                    "asset_type": row.get("asset_type") or "",
                    "findings": [],
                }
                locations[asset_id] = location
            elif (record["vendor"], record["asset_type"]) != (row.get("vendor") or "", row.get("asset_type") or ""):
                report.add(location, f"vendor/asset_type differ from earlier rows of asset {asset_id!r}")

            path_count = (row.get("path_count") or "").strip()
            if path_count:
                try:
                    record["attack_vectors"] = {"path_count": int(path_count)}
                except ValueError:
                    report.add(f"{location}.path_count", f"expected an integer, got {path_count!r}")

            finding_id = (row.get("finding_id") or "").strip()
            if finding_id:
                finding = {
                    "finding_id": finding_id,
                    "control_id": row.get("control_id") or "",
                    "original_severity": row.get("original_severity") or "",
                }
                if (row.get("adjusted_severity") or "").strip():
                    finding["adjusted_severity"] = row["adjusted_severity"]
                record["findings"].append(finding)

    return [(locations[asset_id], record) for asset_id, record in assets.items()]


def load_snapshot(path: Union[str, Path], format: Optional[str] = None) -> Union[Snapshot, ValidationReport]:
    """Parse and validate a snapshot file; I/O errors propagate as OSError."""
    path = Path(path)
    format = format or detect_format(path)
    if format not in FORMATS:
        raise ValueError(f"unknown snapshot format {format!r}; expected one of {', '.join(FORMATS)}")

    report = ValidationReport()
    if format == JSONL:
        records = list(_jsonl_records(path, report))
    else:
        records = _csv_records(path, report)
    snapshot_id, created_at = _read_metadata(path)

    result = ValidationService().validate_records(records, snapshot_id, created_at, report=report)
    if isinstance(result, Snapshot):
        logger.info(f"Loaded {len(result.assets)} assets from {path}")
    return result


def write_snapshot(snapshot: Snapshot, path: Union[str, Path]) -> Path:
    """JSONL inverse of load_snapshot; identical snapshots give identical bytes."""
    path = _write_lines((asset.model_dump_json() for asset in snapshot.assets), Path(path))

    meta = {"snapshot_id": snapshot.snapshot_id, "created_at": snapshot.created_at.isoformat()}
    sidecar_path(path).write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(snapshot.assets)} assets to {path}")
    return path


def _write_lines(lines: Iterable[str], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)
            f.write("\n")
    return path


def write_scores(
    ranking: Iterable[RankedScore],
    breakdowns: Iterable[ScoreBreakdown],
    path: Union[str, Path],
) -> Path:
    """One line per scored asset in rank order: rank, asset_id, final and the full breakdown."""
    by_id = {b.asset_id: b for b in breakdowns}
    lines = (
        json.dumps({
            "rank": ranked.rank,
            "asset_id": ranked.asset_id,
            "final": ranked.final,
            "breakdown": by_id[ranked.asset_id].model_dump(mode="json"),
        })
        for ranked in ranking
    )
    path = _write_lines(lines, Path(path))
    logger.info(f"Wrote {len(by_id)} scores to {path}")
    return path
