from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ScoreBin(str, Enum):
    """Five score ranges, lower-inclusive; CRITICAL_BIN also holds 1.0."""
    INFO_BIN = "INFO_BIN"
    LOW_BIN = "LOW_BIN"
    MEDIUM_BIN = "MEDIUM_BIN"
    HIGH_BIN = "HIGH_BIN"
    CRITICAL_BIN = "CRITICAL_BIN"


SCORE_BINS: Tuple[ScoreBin, ...] = tuple(ScoreBin)
# upper edges of every bin but the last
BIN_EDGES: Tuple[float, ...] = (0.2, 0.4, 0.8, 0.9)


def _empty_shares() -> Dict[ScoreBin, float]:
    return {score_bin: 0.0 for score_bin in ScoreBin}


class BinDistribution(BaseModel):
    """Resource-weighted share of resources per score bin."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    shares: Dict[ScoreBin, float] = Field(default_factory=_empty_shares)
    total_resources: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _shares_sum_to_one(self):
        if self.total_resources > 0 and abs(sum(self.shares.values()) - 1.0) > 1e-9:
            raise ValueError(f"bin shares sum to {sum(self.shares.values())}, expected 1")
        return self

    def share(self, score_bin: ScoreBin) -> float:
        return self.shares.get(score_bin, 0.0)


class BinDelta(BaseModel):
    model_config = ConfigDict(frozen=True)

    score_bin: ScoreBin
    share_before: float
    share_after: float
    delta: float


class SweepPoint(BaseModel):
    """One parameter setting; label names a preset when the parameter is not numeric."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    parameter_value: float
    label: Optional[str] = None
    mean: Optional[float] = None
    resources: int = 0
    distribution: Optional[BinDistribution] = None
    base_distribution: Optional[BinDistribution] = None


class CurvePoint(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    series: str
    group: str
    x: float
    y: float
    resources: int = 0


class SweepResult(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    parameter_name: str
    points: Tuple[SweepPoint, ...] = ()
    curves: Tuple[CurvePoint, ...] = ()

    @model_validator(mode="after")
    def _strictly_ordered(self):
        values = [p.parameter_value for p in self.points]
        if any(a >= b for a, b in zip(values, values[1:])):
            raise ValueError(f"{self.parameter_name} values must be strictly increasing")
        return self

    def curves_for(self, series: str) -> Tuple[CurvePoint, ...]:
        return tuple(c for c in self.curves if c.series == series)


class AdjustmentPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    asset_id: str
    score_original: float
    score_adjusted: float


class AdjustmentReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    preset: str
    before: BinDistribution
    after: BinDistribution
    deltas: Tuple[BinDelta, ...]


class BreakdownRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    resources: int
    share: float
    asset_types: int = 0
    in_scope: int = 0
    coverage: float = 0.0


class SnapshotSummary(BaseModel):
    """Inventory shape of a snapshot, per vendor and per logical domain"""
    model_config = ConfigDict(frozen=True)

    total_resources: int
    total_asset_types: int
    total_in_scope: int
    vendors: Tuple[BreakdownRow, ...]
    domains: Tuple[BreakdownRow, ...]
