import logging
from collections import Counter
from datetime import datetime
from typing import Any, Iterable, List, Mapping, Optional, Tuple, Union

from pydantic import ValidationError

from models.asset_model import Asset, Snapshot, ValidationReport
from models.criteria_model import CriterionFamily

logger = logging.getLogger(__name__)

RawRecord = Tuple[str, Any]


def _describe(error: Mapping[str, Any]) -> str:
    field = error["loc"][-1] if error["loc"] else None
    if error["type"] == "enum" and field in ("original_severity", "adjusted_severity"):
        return f"unknown severity {error['input']!r}"
    message = error["msg"]
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    return message


def _path(location: str, error: Mapping[str, Any]) -> str:
    fields = ".".join(str(part) for part in error["loc"])
    return f"{location}.{fields}" if fields else location


class ValidationService:
    """Enforces every structural invariant before a snapshot can be scored.

    A snapshot is either accepted whole or rejected with a report listing
    every violation; records are never dropped silently.
    """

    def validate_snapshot(self, raw: Union[Snapshot, Mapping[str, Any]]) -> Union[Snapshot, ValidationReport]:
        if isinstance(raw, Snapshot):
            report = ValidationReport()
            self._check_assets(
                [(f"assets[{i}]", asset) for i, asset in enumerate(raw.assets)], report
            )
            return raw if report.ok else report

        assets = raw.get("assets") or []
        return self.validate_records(
            [(f"assets[{i}]", record) for i, record in enumerate(assets)],
            snapshot_id=raw.get("snapshot_id", "snapshot"),
            created_at=raw.get("created_at"),
        )

    def validate_records(
        self,
        records: Iterable[RawRecord],
        snapshot_id: str,
        created_at: Optional[datetime] = None,
        report: Optional[ValidationReport] = None,
    ) -> Union[Snapshot, ValidationReport]:
        """Parse raw asset records, each tagged with its source location."""
        report = report or ValidationReport()
        parsed: List[Tuple[str, Asset]] = []

        for location, record in records:
            if not isinstance(record, Mapping):
                report.add(location, f"expected an object, got {type(record).__name__}")
                continue
            asset_id = record.get("asset_id")
            where = f"{location} (asset {asset_id})" if asset_id else location
            try:
                parsed.append((where, Asset.model_validate(dict(record))))
            except ValidationError as e:
                for error in e.errors():
                    report.add(_path(where, error), _describe(error))

        self._check_assets(parsed, report)
        if not report.ok:
            logger.warning(f"Snapshot {snapshot_id} rejected with {len(report.issues)} issue(s)")
            return report

        fields = {"snapshot_id": snapshot_id, "assets": tuple(asset for _, asset in parsed)}
        if created_at is not None:
            fields["created_at"] = created_at
        try:
            snapshot = Snapshot(**fields)
        except ValidationError as e:
            for error in e.errors():
                report.add(_path("snapshot", error), _describe(error))
            return report

        logger.info(f"Validated snapshot {snapshot.snapshot_id} with {len(snapshot.assets)} assets")
        return snapshot

    def _check_assets(self, assets: List[Tuple[str, Asset]], report: ValidationReport) -> None:
        counts = Counter(asset.asset_id for _, asset in assets)
        for asset_id, count in counts.items():
            if count > 1:
                locations = [loc for loc, asset in assets if asset.asset_id == asset_id]
                report.add(locations[-1], f"duplicate asset_id {asset_id!r} ({count} occurrences)")

        for location, asset in assets:
            self._check_asset(location, asset, report)

    @staticmethod
    def _check_asset(location: str, asset: Asset, report: ValidationReport) -> None:
        finding_ids = Counter(f.finding_id for f in asset.findings)
        for finding_id, count in finding_ids.items():
            if count > 1:
                report.add(f"{location}.findings", f"duplicate finding_id {finding_id!r}")

        for field, family in (("bfc_criteria", CriterionFamily.BFC), ("dc_criteria", CriterionFamily.DC)):
            for i, assessment in enumerate(getattr(asset, field)):
                if assessment.family is not family:
                    report.add(
                        f"{location}.{field}[{i}]",
                        f"criterion {assessment.criterion_id.value} belongs to the "
                        f"{assessment.family.value} family",
                    )

        criteria = Counter(a.criterion_id for a in asset.bfc_criteria + asset.dc_criteria)
        for criterion, count in criteria.items():
            if count > 1:
                report.add(location, f"more than one assessment for criterion {criterion.value}")
