from enum import Enum
from types import MappingProxyType
from typing import Dict, Mapping, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.asset_model import SEVERITY_ORDER, Severity


class SeverityWeightConfig(BaseModel):
    """Severity → weight map w(s); weights lie in [0,1] and never decrease with severity."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1)
    weights: Dict[Severity, float]

    @field_validator("weights", mode="before")
    @classmethod
    def _severity_keys(cls, value):
        if isinstance(value, dict):
            return {k.strip().upper() if isinstance(k, str) else k: v for k, v in value.items()}
        return value

    @model_validator(mode="after")
    def _complete_and_monotone(self):
        missing = [s.value for s in SEVERITY_ORDER if s not in self.weights]
        if missing:
            raise ValueError(f"severity weights missing for {', '.join(missing)}")
        previous = 0.0
        for severity in SEVERITY_ORDER:
            weight = self.weights[severity]
            if not 0.0 <= weight <= 1.0:
                raise ValueError(f"weight for {severity.value} must lie in [0,1], got {weight}")
            if weight < previous:
                raise ValueError(f"weights must not decrease with severity (at {severity.value})")
            previous = weight
        return self

    @classmethod
    def from_tuple(cls, name: str, values: Sequence[float]) -> "SeverityWeightConfig":
        """Build from an (INFO, LOW, MEDIUM, HIGH, CRITICAL) tuple"""
        if len(values) != len(SEVERITY_ORDER):
            raise ValueError(f"expected {len(SEVERITY_ORDER)} weights, got {len(values)}")
        return cls(name=name, weights=dict(zip(SEVERITY_ORDER, values)))

    def weight(self, severity: Severity) -> float:
        return self.weights[severity]

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(self.weights[s] for s in SEVERITY_ORDER)


SEVERITY_PRESETS: Mapping[str, SeverityWeightConfig] = MappingProxyType({
    name: SeverityWeightConfig.from_tuple(name, values)
    for name, values in (
        ("baseline", (0.002, 0.02, 0.08, 0.35, 0.70)),
        ("conservative", (0.0005, 0.008, 0.035, 0.25, 0.50)),
        ("very-conservative", (0.0002, 0.004, 0.02, 0.18, 0.40)),
        ("ultra-conservative", (0.0001, 0.002, 0.012, 0.12, 0.30)),
        ("aggressive", (0.002, 0.02, 0.07, 0.45, 0.80)),
        ("linear", (0.005, 0.05, 0.15, 0.40, 0.70)),
    )
})

TAU_PRESETS: Tuple[float, ...] = (3.0, 5.0, 7.0, 10.0, 15.0)


class Channel(str, Enum):
    MISCONFIGURATION = "MISCONFIGURATION"
    ATTACK_VECTOR = "ATTACK_VECTOR"
    FLOOR = "FLOOR"


class ExposureConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    severity_weights: SeverityWeightConfig = Field(
        default_factory=lambda: SEVERITY_PRESETS["baseline"]
    )
    cap: float = Field(default=0.75, ge=0, le=1)
    floor: float = Field(default=0.05, ge=0, le=1)
    tau: float = Field(default=7.0, gt=0, allow_inf_nan=False)
    use_adjusted_severity: bool = False

    @model_validator(mode="after")
    def _floor_below_cap(self):
        if self.floor > self.cap:
            raise ValueError(f"floor {self.floor} must not exceed cap {self.cap}")
        return self


class ExposureBreakdown(BaseModel):
    """b_vec saturates to 1.0 in double precision once p/τ exceeds ~36."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    b_mis: float = Field(ge=0, le=1)
    b_vec: float = Field(ge=0, le=1)
    b_base: float = Field(ge=0, le=1)
    dominant_channel: Channel
