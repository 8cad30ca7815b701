import re
import logging
from typing import Dict, List, Optional, Protocol, Tuple

from core.exceptions import ConfigurationError
from models.analysis_model import AdjustmentPair
from models.asset_model import Asset, CriterionAssessment, Finding, Severity, Snapshot
from models.criteria_model import CriterionFamily, CriterionId
from models.rule_model import RuleMatch, RuleSet
from models.scoring_model import ScoringConfig
from services.exposure_service import ExposureService

logger = logging.getLogger(__name__)


class SeverityAdjuster(Protocol):
    """Reinterprets a finding's severity in light of the asset it sits on."""

    def adjust(self, finding: Finding, asset: Asset) -> Optional[Severity]:
        ...


class ContextClassifier(Protocol):
    """Labels an asset along the business-function and data-criticality criteria."""

    def classify(self, asset: Asset) -> Tuple[List[CriterionAssessment], List[CriterionAssessment]]:
        ...


class RuleEngine:
    def __init__(self, rules: RuleSet):
        self.rules = rules
        self._patterns: Dict[str, re.Pattern] = {}
        for index, rule in enumerate(rules):
            self._compile(index, rule.match)

    def _compile(self, index: int, match: RuleMatch) -> None:
        for tag, pattern in match.tag_matches.items():
            try:
                self._patterns[pattern] = re.compile(pattern)
            except re.error as e:
                raise ConfigurationError(f"malformed pattern for tag {tag!r}: {e}", rule_index=index)
        for nested in match.all_of:
            self._compile(index, nested)

    def matches(self, match: RuleMatch, asset: Asset, finding: Optional[Finding] = None) -> bool:
        tags = asset.metadata_tags
        if any(tags.get(key) != value for key, value in match.tag_equals.items()):
            return False
        for key, pattern in match.tag_matches.items():
            if key not in tags or not self._patterns[pattern].search(tags[key]):
                return False
        if any(key in tags for key in match.tag_absent):
            return False
        if match.type_equals is not None and asset.asset_type != match.type_equals:
            return False
        if match.type_in and asset.asset_type not in match.type_in:
            return False
        if match.vendor_equals is not None and asset.vendor != match.vendor_equals:
            return False
        if match.control_equals is not None and (finding is None or finding.control_id != match.control_equals):
            return False
        if match.severity_equals is not None and (
            finding is None or finding.original_severity != match.severity_equals
        ):
            return False
        return all(self.matches(nested, asset, finding) for nested in match.all_of)


class RuleSeverityAdjuster:
    """First matching set_severity rule decides the adjusted severity."""

    def __init__(self, rules: RuleSet):
        self.engine = RuleEngine(rules)
        self.severity_rules = rules.indexed("set_severity")

    def adjust(self, finding: Finding, asset: Asset) -> Optional[Severity]:
        for _, rule in self.severity_rules:
            if self.engine.matches(rule.match, asset, finding):
                return rule.action.severity
        return None


class RuleContextClassifier:
    """First matching set_label rule per criterion decides the label."""

    def __init__(self, rules: RuleSet):
        self.engine = RuleEngine(rules)
        self.label_rules = rules.indexed("set_label")

    def classify(self, asset: Asset) -> Tuple[List[CriterionAssessment], List[CriterionAssessment]]:
        chosen: Dict[CriterionId, CriterionAssessment] = {}
        for _, rule in self.label_rules:
            criterion = rule.action.criterion
            if criterion in chosen or not self.engine.matches(rule.match, asset):
                continue
            chosen[criterion] = CriterionAssessment(
                criterion_id=criterion,
                label=rule.action.label,
                confidence=rule.action.confidence,
            )
        ordered = [chosen[c] for c in CriterionId if c in chosen]
        return (
            [a for a in ordered if a.family is CriterionFamily.BFC],
            [a for a in ordered if a.family is CriterionFamily.DC],
        )


class ContextualizerService:
    """Interpretation layer in front of the deterministic scoring model.

    Adjusters and classifiers only rewrite intermediate inputs (adjusted
    severities, criterion labels); they never assign a score.
    """

    def adjust_severities(self, snapshot: Snapshot, adjuster: SeverityAdjuster) -> Snapshot:
        adjusted_count = 0
        assets = []
        for asset in snapshot.assets:
            findings = []
            for finding in asset.findings:
                severity = adjuster.adjust(finding, asset)
                if severity is None:
                    findings.append(finding)
                    continue
                adjusted_count += 1
                findings.append(finding.model_copy(update={"adjusted_severity": severity}))
            assets.append(asset.model_copy(update={"findings": tuple(findings)}))

        logger.info(f"Adjusted {adjusted_count} finding severities in snapshot {snapshot.snapshot_id}")
        return snapshot.model_copy(update={"assets": tuple(assets)})

    def apply_severity_rules(self, snapshot: Snapshot, rules: RuleSet) -> Snapshot:
        if not rules.indexed("set_severity"):
            return snapshot
        return self.adjust_severities(snapshot, RuleSeverityAdjuster(rules))

    def classify_with(self, snapshot: Snapshot, classifier: ContextClassifier) -> Snapshot:
        """Fill criteria from the classifier; assessments already on the asset win."""
        added = 0
        assets = []
        for asset in snapshot.assets:
            present = {a.criterion_id for a in asset.bfc_criteria + asset.dc_criteria}
            bfc, dc = classifier.classify(asset)
            new_bfc = [a for a in bfc if a.criterion_id not in present]
            new_dc = [a for a in dc if a.criterion_id not in present]
            added += len(new_bfc) + len(new_dc)
            assets.append(asset.model_copy(update={
                "bfc_criteria": asset.bfc_criteria + tuple(new_bfc),
                "dc_criteria": asset.dc_criteria + tuple(new_dc),
            }))

        logger.info(f"Classified {added} criteria in snapshot {snapshot.snapshot_id}")
        return snapshot.model_copy(update={"assets": tuple(assets)})

    def classify_context(self, snapshot: Snapshot, rules: RuleSet) -> Snapshot:
        if not rules.indexed("set_label"):
            return snapshot
        return self.classify_with(snapshot, RuleContextClassifier(rules))

    def adjustment_impact(self, snapshot: Snapshot, config: ScoringConfig) -> List[AdjustmentPair]:
        """Finding score with original vs adjusted severities over the adjusted subset."""
        original = ExposureService(config.exposure.model_copy(update={"use_adjusted_severity": False}))
        adjusted = ExposureService(config.exposure.model_copy(update={"use_adjusted_severity": True}))

        pairs = [
            AdjustmentPair(
                asset_id=asset.asset_id,
                score_original=original.misconfiguration_exposure(asset.findings),
                score_adjusted=adjusted.misconfiguration_exposure(asset.findings),
            )
            for asset in snapshot.assets
            if asset.findings and any(f.adjusted_severity is not None for f in asset.findings)
        ]
        logger.info(f"Adjustment impact computed for {len(pairs)} assets")
        return pairs
