from types import MappingProxyType
from typing import Dict, Mapping, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.asset_model import SEVERITY_ORDER, Severity

_VENDOR_RESOURCES = {
    "AWS": 103_474,
    "Salesforce": 13_491,
    "Azure": 6_354,
    "Azure AD": 2_707,
    "GitHub": 2_349,
    "Cloudflare": 1_198,
    "Okta": 613,
    "GCP": 524,
    "JumpCloud": 400,
    "Jira Cloud": 207,
    "Google Workspace": 92,
    "Jamf": 82,
    "HiBob": 68,
    "CrowdStrike": 57,
    "NetSuite": 9,
}

_DOMAIN_RESOURCES = {
    "Compute & Containers": 62_450,
    "Identity & Access": 36_525,
    "Storage & Data": 23_272,
    "Network & Edge": 4_587,
    "Source Control & CI": 2_424,
    "SaaS / Business Apps": 1_591,
    "Other": 775,
}


def _shares(counts: Mapping[str, int]) -> Dict[str, float]:
    total = sum(counts.values())
    return {name: count / total for name, count in counts.items()}


DEFAULT_VENDOR_MIX: Mapping[str, float] = MappingProxyType(_shares(_VENDOR_RESOURCES))
DEFAULT_DOMAIN_MIX: Mapping[str, float] = MappingProxyType(_shares(_DOMAIN_RESOURCES))

# share of each vendor's resources carrying at least one finding
VENDOR_COVERAGE: Mapping[str, float] = MappingProxyType({
    "AWS": 0.2914,
    "Salesforce": 0.0042,
    "Azure": 0.0505,
    "Azure AD": 0.6550,
    "GitHub": 0.0362,
    "Cloudflare": 0.0,
    "Okta": 0.6232,
    "GCP": 0.9962,
    "JumpCloud": 0.70,
    "Jira Cloud": 0.0,
    "Google Workspace": 0.1304,
    "Jamf": 1.0,
    "HiBob": 1.0,
    "CrowdStrike": 1.0,
    "NetSuite": 0.0,
})

DOMAIN_ASSET_TYPES: Mapping[str, Tuple[str, ...]] = MappingProxyType({
    "Compute & Containers": (
        "compute_instance", "container_image", "kubernetes_workload", "serverless_function", "autoscaling_group",
    ),
    "Identity & Access": ("iam_role", "iam_user", "iam_policy", "service_account", "sso_application"),
    "Storage & Data": ("object_bucket", "relational_database", "key_value_table", "block_volume", "data_warehouse"),
    "Network & Edge": ("security_group", "load_balancer", "vpc", "dns_zone", "cdn_distribution"),
    "Source Control & CI": ("repository", "ci_pipeline", "deploy_key"),
    "SaaS / Business Apps": ("saas_workspace", "crm_object", "hr_record_store"),
    "Other": ("endpoint_device", "security_sensor"),
})

# no data-criticality criteria apply to these domains
DATALESS_DOMAINS: Tuple[str, ...] = ("Identity & Access", "Network & Edge")

DEFAULT_SEVERITY_MIX: Mapping[Severity, float] = MappingProxyType({
    Severity.INFO: 0.30,
    Severity.LOW: 0.30,
    Severity.MEDIUM: 0.25,
    Severity.HIGH: 0.12,
    Severity.CRITICAL: 0.03,
})

# P(path_count = 1..5), concentrated at low counts
DEFAULT_PATH_COUNT_WEIGHTS: Tuple[float, ...] = (0.45, 0.25, 0.15, 0.10, 0.05)

MIX_TOLERANCE = 1e-9


def _check_mix(name: str, mix: Mapping) -> None:
    if not mix:
        raise ValueError(f"{name} must not be empty")
    for key, share in mix.items():
        if not 0.0 <= share <= 1.0:
            raise ValueError(f"{name} share for {key} must lie in [0,1], got {share}")
    total = sum(mix.values())
    if abs(total - 1.0) > MIX_TOLERANCE:
        raise ValueError(f"{name} shares sum to {total}, expected 1")


class GeneratorConfig(BaseModel):
    """Shape of a synthetic snapshot; defaults follow the evaluation inventory."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=42, ge=0, lt=2 ** 64)
    asset_count: int = Field(default=10_000, gt=0)
    vendor_mix: Dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_VENDOR_MIX))
    domain_mix: Dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_DOMAIN_MIX))
    finding_rate: float = Field(default=0.299, ge=0, le=1)
    attack_vector_rate: float = Field(default=8 / 131_625, ge=0, le=1)
    severity_mix: Dict[Severity, float] = Field(default_factory=lambda: dict(DEFAULT_SEVERITY_MIX))
    context_coverage: float = Field(default=0.5, ge=0, le=1)
    structural_coverage: float = Field(default=0.5, ge=0, le=1)
    mean_findings: float = Field(default=3.0, ge=1)
    path_count_weights: Tuple[float, ...] = DEFAULT_PATH_COUNT_WEIGHTS
    context_skew: float = Field(default=0.0, ge=0)
    vendor_coverage: bool = False

    @field_validator("severity_mix", mode="before")
    @classmethod
    def _severity_keys(cls, value):
        if isinstance(value, dict):
            return {k.strip().upper() if isinstance(k, str) else k: v for k, v in value.items()}
        return value

    @model_validator(mode="after")
    def _mixes_sum_to_one(self):
        _check_mix("vendor_mix", self.vendor_mix)
        _check_mix("domain_mix", self.domain_mix)
        _check_mix("severity_mix", self.severity_mix)
        _check_mix("path_count_weights", dict(enumerate(self.path_count_weights, start=1)))
        unknown = [d for d in self.domain_mix if d not in DOMAIN_ASSET_TYPES]
        if unknown:
            raise ValueError(f"unknown domain(s) {', '.join(unknown)}; expected one of {', '.join(DOMAIN_ASSET_TYPES)}")
        return self

    def severity_probabilities(self) -> Tuple[float, ...]:
        return tuple(self.severity_mix.get(s, 0.0) for s in SEVERITY_ORDER)
