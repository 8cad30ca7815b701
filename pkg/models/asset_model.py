from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.criteria_model import (
    NOT_APPLICABLE,
    CriterionFamily,
    CriterionId,
    LABEL_SCORES,
    normalize_label,
)


class Severity(str, Enum):
    """Ordered finding severity: INFO < LOW < MEDIUM < HIGH < CRITICAL"""
    INFO = "INFO"
    LOW = "LOW"
    MEDIUM = "MEDIUM"
    HIGH = "HIGH"
    CRITICAL = "CRITICAL"

    @property
    def rank(self) -> int:
        return SEVERITY_ORDER.index(self)

    def __lt__(self, other):
        if not isinstance(other, Severity):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other):
        if not isinstance(other, Severity):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other):
        if not isinstance(other, Severity):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other):
        if not isinstance(other, Severity):
            return NotImplemented
        return self.rank >= other.rank


SEVERITY_ORDER: Tuple[Severity, ...] = (
    Severity.INFO,
    Severity.LOW,
    Severity.MEDIUM,
    Severity.HIGH,
    Severity.CRITICAL,
)


def _upper(value: Any) -> Any:
    return value.strip().upper() if isinstance(value, str) else value


class Finding(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    finding_id: str = Field(..., min_length=1)
    control_id: str = Field(..., min_length=1)
    original_severity: Severity
    adjusted_severity: Optional[Severity] = None

    @field_validator("original_severity", "adjusted_severity", mode="before")
    @classmethod
    def _severity_case(cls, value):
        return _upper(value)

    def effective_severity(self, use_adjusted: bool) -> Severity:
        if use_adjusted and self.adjusted_severity is not None:
            return self.adjusted_severity
        return self.original_severity


class AttackVectorEvidence(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    path_count: int = Field(default=0, ge=0)
    pattern_ids: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _count_matches_patterns(self):
        if self.pattern_ids and self.path_count != len(self.pattern_ids):
            raise ValueError(
                f"path_count {self.path_count} does not match {len(self.pattern_ids)} pattern_ids"
            )
        return self


class StructuralSignals(BaseModel):
    """Raw and normalized anomaly / blast-radius signals.

    A raw value without a percentile is resolved by peer-group percentile
    normalization before scoring; a supplied percentile is used verbatim.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    anomaly_raw: Optional[float] = Field(default=None, ge=0, allow_inf_nan=False)
    anomaly_percentile: Optional[float] = Field(default=None, ge=0, le=1)
    blast_raw: Optional[float] = Field(default=None, ge=0, allow_inf_nan=False)
    blast_percentile: Optional[float] = Field(default=None, ge=0, le=1)


class CriterionAssessment(BaseModel):
    """One labelled criterion; the score is always derived from the label."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    criterion_id: CriterionId
    label: str
    score: Optional[float] = Field(default=None, ge=0, le=1)
    confidence: float = Field(default=1.0, ge=0, le=1)

    @model_validator(mode="before")
    @classmethod
    def _attach_score(cls, data):
        if not isinstance(data, dict) or not isinstance(data.get("label"), str):
            return data
        data = dict(data)
        data["label"] = normalize_label(data["label"])
        try:
            criterion = CriterionId(data.get("criterion_id"))
        except ValueError:
            return data
        scale = LABEL_SCORES[criterion]
        if data.get("score") is None and data["label"] in scale:
            data["score"] = scale[data["label"]]
        return data

    @model_validator(mode="after")
    def _label_on_scale(self):
        scale = LABEL_SCORES[self.criterion_id]
        if self.label == NOT_APPLICABLE:
            if self.score is not None:
                raise ValueError(f"{self.criterion_id.value}: not_applicable carries no score")
            return self
        if self.label not in scale:
            raise ValueError(
                f"unknown label {self.label!r} for {self.criterion_id.value}; "
                f"expected one of {', '.join(scale)} or {NOT_APPLICABLE}"
            )
        if self.score != scale[self.label]:
            raise ValueError(
                f"score {self.score} does not match {self.criterion_id.value}={self.label} "
                f"({scale[self.label]})"
            )
        return self

    @property
    def family(self) -> CriterionFamily:
        return self.criterion_id.family

    @property
    def is_applicable(self) -> bool:
        return self.label != NOT_APPLICABLE


class Asset(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    asset_id: str = Field(..., min_length=1)
    vendor: str
    asset_type: str
    findings: Tuple[Finding, ...] = ()
    attack_vectors: AttackVectorEvidence = Field(default_factory=AttackVectorEvidence)
    structural: StructuralSignals = Field(default_factory=StructuralSignals)
    bfc_criteria: Tuple[CriterionAssessment, ...] = ()
    dc_criteria: Tuple[CriterionAssessment, ...] = ()
    metadata_tags: Dict[str, str] = Field(default_factory=dict)

    @property
    def has_context(self) -> bool:
        """True when any business-function or data criterion is applicable."""
        return any(c.is_applicable for c in self.bfc_criteria + self.dc_criteria)


def in_scope(asset: Asset) -> bool:
    """An asset is scored only when it carries at least one risk signal."""
    return len(asset.findings) > 0 or asset.attack_vectors.path_count >= 1


def _epoch() -> datetime:
    return datetime(1970, 1, 1, tzinfo=timezone.utc)


class Snapshot(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    snapshot_id: str = Field(..., min_length=1)
    assets: Tuple[Asset, ...] = ()
    created_at: datetime = Field(default_factory=_epoch)

    def in_scope_assets(self) -> List[Asset]:
        return [asset for asset in self.assets if in_scope(asset)]


class ValidationIssue(BaseModel):
    model_config = ConfigDict(frozen=True)

    location: str
    message: str


class ValidationReport(BaseModel):
    """Every violation found while validating a snapshot; non-empty means rejected"""
    issues: List[ValidationIssue] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, location: str, message: str) -> None:
        self.issues.append(ValidationIssue(location=location, message=message))

    def format(self) -> str:
        return "\n".join(f"{issue.location}: {issue.message}" for issue in self.issues)
