from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.exceptions import ConfigurationError
from models.context_model import ContextIndex, ContextVector, CriterionWeights, ModulationConfig
from models.exposure_model import ExposureBreakdown, ExposureConfig


class ScoringConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    exposure: ExposureConfig = Field(default_factory=ExposureConfig)
    modulation: ModulationConfig = Field(default_factory=ModulationConfig)
    criterion_weights: CriterionWeights = Field(default_factory=CriterionWeights)

    def with_overrides(self, **changes) -> "ScoringConfig":
        """Copy with nested fields replaced, e.g. with_overrides(tau=3.0, alpha=0.4)."""
        exposure_fields = {k: changes.pop(k) for k in list(changes) if k in ExposureConfig.model_fields}
        exposure = self.exposure.model_copy(update=exposure_fields) if exposure_fields else self.exposure
        modulation = self.modulation
        if "alpha" in changes:
            modulation = ModulationConfig.model_construct(alpha=changes.pop("alpha"))
        if changes:
            raise TypeError(f"unknown config fields: {', '.join(sorted(changes))}")
        # rebuild so that validators run on the merged values
        try:
            return ScoringConfig.model_validate({
                "exposure": exposure.model_dump(),
                "modulation": modulation.model_dump(),
                "criterion_weights": self.criterion_weights.model_dump(),
            })
        except ValidationError as e:
            raise ConfigurationError(str(e))


class ScoreBreakdown(BaseModel):
    """Full explanation of one asset's score; final = min(1, b_base * multiplier)."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    asset_id: str
    exposure: ExposureBreakdown
    context: ContextVector
    index: ContextIndex
    multiplier: float
    final: float = Field(ge=0, le=1)


class RankedScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    rank: int = Field(ge=1)
    asset_id: str
    final: float
