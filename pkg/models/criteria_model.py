"""Business-function and data-criticality rubric.

Every criterion has an ordered label scale with fixed numeric scores. The
tables are the calibrated rubric, not user data, so they are exposed
read-only.
"""
from enum import Enum
from types import MappingProxyType
from typing import Mapping, Tuple

NOT_APPLICABLE = "not_applicable"


class CriterionFamily(str, Enum):
    BFC = "bfc"
    DC = "dc"


class CriterionId(str, Enum):
    # business-function criticality
    FUNCTIONAL_ROLE = "functional_role"
    ENVIRONMENT = "environment"
    CONTROL_ROLE = "control_role"
    EXPLICIT_BUSINESS_IMPORTANCE = "explicit_business_importance"
    BLAST_RADIUS_CATEGORY = "blast_radius_category"
    # data criticality
    DATA_TYPE = "data_type"
    SYSTEM_ROLE = "system_role"
    ACCESS_EXPOSURE = "access_exposure"
    PROPAGATION_SCOPE = "propagation_scope"
    REGULATORY_RELEVANCE = "regulatory_relevance"
    DATA_FRESHNESS = "data_freshness"

    @property
    def family(self) -> CriterionFamily:
        return CRITERION_FAMILY[self]


def _frozen(table: dict) -> Mapping:
    return MappingProxyType({key: MappingProxyType(labels) for key, labels in table.items()})


# Labels are listed in ascending order of criticality.
BFC_LABEL_SCORES: Mapping[CriterionId, Mapping[str, float]] = _frozen({
    CriterionId.FUNCTIONAL_ROLE: {
        "auxiliary": 0.2,
        "internal_support": 0.5,
        "customer_facing_support": 0.8,
        "core_business_function": 1.0,
    },
    CriterionId.ENVIRONMENT: {
        "development": 0.3,
        "pre_production": 0.6,
        "production": 1.0,
    },
    CriterionId.CONTROL_ROLE: {
        "single_workload": 0.4,
        "shared_service": 0.7,
        "orchestrator": 1.0,
    },
    CriterionId.EXPLICIT_BUSINESS_IMPORTANCE: {
        "none": 0.3,
        "implicit": 0.7,
        "explicit": 1.0,
    },
    CriterionId.BLAST_RADIUS_CATEGORY: {
        "internal_operations": 0.4,
        "shared_platform": 0.6,
        "customer_data_platform": 0.7,
        "customer_front_door": 0.8,
        "system_of_record": 0.9,
        "identity_control_plane": 1.0,
        "revenue_flow": 1.0,
    },
})

DC_LABEL_SCORES: Mapping[CriterionId, Mapping[str, float]] = _frozen({
    CriterionId.DATA_TYPE: {
        "unknown": 0.0,
        "low": 0.25,
        "internal": 0.5,
        "business_sensitive": 0.75,
        "regulated": 1.0,
    },
    CriterionId.SYSTEM_ROLE: {
        "transient": 0.2,
        "derived_copy": 0.5,
        "authoritative_source": 0.8,
        "system_of_record": 1.0,
    },
    CriterionId.ACCESS_EXPOSURE: {
        "restricted": 0.3,
        "moderate": 0.6,
        "broad": 1.0,
    },
    CriterionId.PROPAGATION_SCOPE: {
        "local": 0.4,
        "multi_service": 0.7,
        "cross_domain": 1.0,
    },
    CriterionId.REGULATORY_RELEVANCE: {
        "none": 0.2,
        "moderate": 0.6,
        "high": 1.0,
    },
    CriterionId.DATA_FRESHNESS: {
        "archival": 0.3,
        "periodic": 0.6,
        "live_operational": 1.0,
    },
})

CRITERION_FAMILY: Mapping[CriterionId, CriterionFamily] = MappingProxyType({
    **{criterion: CriterionFamily.BFC for criterion in BFC_LABEL_SCORES},
    **{criterion: CriterionFamily.DC for criterion in DC_LABEL_SCORES},
})

LABEL_SCORES: Mapping[CriterionId, Mapping[str, float]] = MappingProxyType({
    **BFC_LABEL_SCORES,
    **DC_LABEL_SCORES,
})


def normalize_label(label: str) -> str:
    """'Pre-production' and 'pre production' both become 'pre_production'."""
    return label.strip().lower().replace("-", "_").replace(" ", "_").replace("/", "_")


def labels_for(criterion: CriterionId) -> Tuple[str, ...]:
    return tuple(LABEL_SCORES[criterion])


def criteria_in(family: CriterionFamily) -> Tuple[CriterionId, ...]:
    return tuple(c for c, f in CRITERION_FAMILY.items() if f is family)
