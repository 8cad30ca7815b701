import math
import logging
from typing import Iterable

from models.asset_model import Asset, AttackVectorEvidence, Finding
from models.exposure_model import Channel, ExposureBreakdown, ExposureConfig

logger = logging.getLogger(__name__)


class ExposureService:
    """Intrinsic exposure of an asset: misconfiguration channel, attack-vector channel, floor."""

    def __init__(self, config: ExposureConfig):
        self.config = config

    def effective_weight(self, finding: Finding) -> float:
        severity = finding.effective_severity(self.config.use_adjusted_severity)
        return self.config.severity_weights.weight(severity)

    def misconfiguration_exposure(self, findings: Iterable[Finding]) -> float:
        """Capped saturating union: cap * (1 - prod(1 - w(s_i)))."""
        # Sorted factors make the product independent of finding order.
        survival = math.prod(sorted(1.0 - self.effective_weight(f) for f in findings))
        return self.config.cap * (1.0 - survival)

    def attack_vector_exposure(self, evidence: AttackVectorEvidence) -> float:
        """1 - exp(-p / tau); zero when no path terminates at the asset."""
        if evidence.path_count == 0:
            return 0.0
        return -math.expm1(-evidence.path_count / self.config.tau)

    def base_exposure(self, asset: Asset) -> ExposureBreakdown:
        b_mis = self.misconfiguration_exposure(asset.findings)
        b_vec = self.attack_vector_exposure(asset.attack_vectors)
        floor = self.config.floor
        b_base = max(b_mis, b_vec, floor)

        # ties: attack vector > misconfiguration > floor
        if b_vec == b_base:
            dominant = Channel.ATTACK_VECTOR
        elif b_mis == b_base:
            dominant = Channel.MISCONFIGURATION
        else:
            dominant = Channel.FLOOR

        logger.debug(
            f"Exposure for {asset.asset_id}: b_mis={b_mis:.6f} b_vec={b_vec:.6f} "
            f"b_base={b_base:.6f} ({dominant.value})"
        )
        return ExposureBreakdown(b_mis=b_mis, b_vec=b_vec, b_base=b_base, dominant_channel=dominant)
