from types import MappingProxyType
from typing import Dict, List, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from models.criteria_model import CriterionId


def _uniform_weights() -> Dict[CriterionId, float]:
    return {criterion: 1.0 for criterion in CriterionId}


class CriterionWeights(BaseModel):
    """Default criterion weights w_i and the low-confidence exclusion threshold."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    weights: Dict[CriterionId, float] = Field(default_factory=_uniform_weights)
    confidence_threshold: float = Field(default=0.5, ge=0, le=1)

    @field_validator("weights")
    @classmethod
    def _positive(cls, value: Dict[CriterionId, float]):
        for criterion, weight in value.items():
            if not weight > 0:
                raise ValueError(f"weight for {criterion.value} must be > 0, got {weight}")
        return {**_uniform_weights(), **value}

    def weight(self, criterion: CriterionId) -> float:
        return self.weights[criterion]


class ContextVector(BaseModel):
    """Contextual components; unavailable ones stay None and are never imputed."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    v_anom: Optional[float] = Field(default=None, ge=0, le=1)
    v_blast: Optional[float] = Field(default=None, ge=0, le=1)
    v_bfc: Optional[float] = Field(default=None, ge=0, le=1)
    v_dc: Optional[float] = Field(default=None, ge=0, le=1)

    def components(self) -> List[float]:
        return [v for v in (self.v_anom, self.v_blast, self.v_bfc, self.v_dc) if v is not None]

    @property
    def has_semantic_context(self) -> bool:
        return self.v_bfc is not None or self.v_dc is not None


ALPHA_PRESETS: Mapping[str, float] = MappingProxyType({
    "conservative": 0.10,
    "moderate": 0.15,
    "baseline": 0.20,
    "aggressive": 0.30,
    "very-aggressive": 0.40,
})


class ModulationConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(default=0.20, gt=0, lt=1)


class ContextIndex(BaseModel):
    """Criticality index c(a) over k available components; k=0 means no context."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    index: float = Field(ge=0, le=1)
    k: int = Field(ge=0, le=4)
