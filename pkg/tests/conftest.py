from typing import Iterable, Optional

import pytest

from models.asset_model import Asset, AttackVectorEvidence, CriterionAssessment, Finding, Snapshot
from models.context_model import ModulationConfig
from models.exposure_model import ExposureConfig, SeverityWeightConfig
from models.scoring_model import ScoringConfig


def make_finding(severity: str, finding_id: str = "f1", control_id: str = "ctl-001",
                 adjusted: Optional[str] = None) -> Finding:
    return Finding(
        finding_id=finding_id,
        control_id=control_id,
        original_severity=severity,
        adjusted_severity=adjusted,
    )


def make_asset(
    asset_id: str = "a1",
    severities: Iterable[str] = (),
    path_count: int = 0,
    vendor: str = "AWS",
    asset_type: str = "object_bucket",
    bfc=(),
    dc=(),
    tags=None,
    structural=None,
) -> Asset:
    return Asset(
        asset_id=asset_id,
        vendor=vendor,
        asset_type=asset_type,
        findings=tuple(make_finding(s, finding_id=f"{asset_id}-f{i}") for i, s in enumerate(severities)),
        attack_vectors=AttackVectorEvidence(path_count=path_count),
        structural=structural or {},
        bfc_criteria=tuple(bfc),
        dc_criteria=tuple(dc),
        metadata_tags=tags or {},
    )


def assessment(criterion: str, label: str, confidence: float = 1.0) -> CriterionAssessment:
    return CriterionAssessment(criterion_id=criterion, label=label, confidence=confidence)


@pytest.fixture
def running_example_config() -> ScoringConfig:
    """Publicly writable bucket that triggers a function: the worked example parameters."""
    weights = SeverityWeightConfig.from_tuple("example", (0.002, 0.02, 0.08, 0.45, 0.75))
    return ScoringConfig(
        exposure=ExposureConfig(severity_weights=weights, cap=0.75, floor=0.05, tau=0.6),
        modulation=ModulationConfig(alpha=0.3),
    )


@pytest.fixture
def small_snapshot() -> Snapshot:
    return Snapshot(
        snapshot_id="small",
        assets=(
            make_asset("bucket-1", severities=("HIGH", "CRITICAL"), path_count=1,
                       bfc=[assessment("environment", "production")],
                       tags={"env": "prod", "domain": "Storage & Data"}),
            make_asset("role-1", severities=("LOW",), vendor="Okta", asset_type="iam_role",
                       tags={"env": "dev", "domain": "Identity & Access"}),
            make_asset("vm-1", vendor="AWS", asset_type="compute_instance",
                       dc=[assessment("data_type", "regulated")],
                       tags={"env": "prod", "domain": "Compute & Containers"}),
        ),
    )
