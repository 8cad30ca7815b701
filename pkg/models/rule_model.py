from typing import Dict, Iterator, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.asset_model import Severity
from models.criteria_model import NOT_APPLICABLE, CriterionId, LABEL_SCORES, normalize_label


class RuleMatch(BaseModel):
    """Predicate over asset metadata; every listed condition must hold.

    An empty match holds for every asset and finding.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    tag_equals: Dict[str, str] = Field(default_factory=dict)
    tag_matches: Dict[str, str] = Field(default_factory=dict)  # tag -> regex
    tag_absent: Tuple[str, ...] = ()
    type_equals: Optional[str] = None
    type_in: Tuple[str, ...] = ()
    vendor_equals: Optional[str] = None
    control_equals: Optional[str] = None
    severity_equals: Optional[Severity] = None
    all_of: Tuple["RuleMatch", ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _dashed_keys(cls, data):
        if isinstance(data, dict):
            return {k.replace("-", "_") if isinstance(k, str) else k: v for k, v in data.items()}
        return data

    @field_validator("severity_equals", mode="before")
    @classmethod
    def _severity_case(cls, value):
        return value.strip().upper() if isinstance(value, str) else value


RuleMatch.model_rebuild()


class RuleAction(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["set_label", "set_severity"]
    value: str
    criterion: Optional[CriterionId] = None
    confidence: float = Field(default=1.0, ge=0, le=1)

    @model_validator(mode="before")
    @classmethod
    def _shorthand(cls, data):
        """Accept {set_severity: LOW} and {set_label: environment, value: production}."""
        if not isinstance(data, dict) or "kind" in data:
            return data
        data = dict(data)
        if "set_severity" in data:
            data["kind"] = "set_severity"
            data["value"] = data.pop("set_severity")
        elif "set_label" in data:
            data["kind"] = "set_label"
            data["criterion"] = data.pop("set_label")
        return data

    @model_validator(mode="after")
    def _value_fits_kind(self):
        if self.kind == "set_severity":
            if self.criterion is not None:
                raise ValueError("set_severity does not take a criterion")
            try:
                Severity(self.value.strip().upper())
            except ValueError:
                raise ValueError(f"unknown severity {self.value!r}")
            return self

        if self.criterion is None:
            raise ValueError("set_label requires a criterion")
        label = normalize_label(self.value)
        if label != NOT_APPLICABLE and label not in LABEL_SCORES[self.criterion]:
            raise ValueError(
                f"unknown label {self.value!r} for {self.criterion.value}; "
                f"expected one of {', '.join(LABEL_SCORES[self.criterion])} or {NOT_APPLICABLE}"
            )
        return self

    @property
    def severity(self) -> Severity:
        return Severity(self.value.strip().upper())

    @property
    def label(self) -> str:
        return normalize_label(self.value)


class Rule(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Optional[str] = None
    match: RuleMatch = Field(default_factory=RuleMatch)
    action: RuleAction


class RuleSet(BaseModel):
    """Rules in file order; the first matching rule wins per finding or criterion."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    rules: Tuple[Rule, ...] = ()

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[Rule]:  # type: ignore[override]
        return iter(self.rules)

    def indexed(self, kind: str) -> List[Tuple[int, Rule]]:
        return [(i, rule) for i, rule in enumerate(self.rules) if rule.action.kind == kind]
