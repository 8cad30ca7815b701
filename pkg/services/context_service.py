import math
import logging
from collections import defaultdict
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from core.exceptions import ContractViolation
from models.asset_model import Asset, CriterionAssessment, Snapshot
from models.context_model import (
    ContextIndex,
    ContextVector,
    CriterionWeights,
    ModulationConfig,
)
from models.criteria_model import CriterionFamily

logger = logging.getLogger(__name__)

PeerKey = Callable[[Asset], Hashable]


def vendor_type_peers(asset: Asset) -> Hashable:
    """Default peer group: assets of the same vendor and type"""
    return (asset.vendor, asset.asset_type)


def global_peers(asset: Asset) -> Hashable:
    return None


def percentile_normalize(
    values: Sequence[Tuple[str, float]],
    peer_key: Optional[Callable[[str], Hashable]] = None,
) -> Dict[str, float]:
    """Midrank percentile of each raw value within its peer group.

    percentile(x) = (count_less(x) + 0.5 * count_equal(x)) / group_size, which
    is (average_rank - 0.5) / group_size; a singleton group maps to 0.5.
    """
    groups: Dict[Hashable, List[Tuple[str, float]]] = defaultdict(list)
    for asset_id, raw in values:
        if not math.isfinite(raw) or raw < 0:
            raise ContractViolation(f"raw value for {asset_id} must be finite and non-negative, got {raw}")
        groups[peer_key(asset_id) if peer_key else None].append((asset_id, raw))

    percentiles: Dict[str, float] = {}
    for members in groups.values():
        raws = np.array([raw for _, raw in members], dtype=float)
        ranks = rankdata(raws, method="average")
        for (asset_id, _), rank in zip(members, ranks):
            percentiles[asset_id] = float((rank - 0.5) / len(members))
    return percentiles


class ContextService:
    """Contextual vector, criticality index and bounded context multiplier."""

    def __init__(
        self,
        weights: Optional[CriterionWeights] = None,
        modulation: Optional[ModulationConfig] = None,
        peer_key: PeerKey = vendor_type_peers,
        blast_peer_key: PeerKey = vendor_type_peers,
    ):
        self.weights = weights or CriterionWeights()
        self.modulation = modulation or ModulationConfig()
        self.peer_key = peer_key
        self.blast_peer_key = blast_peer_key

    def soft_max_criteria(
        self,
        assessments: Iterable[CriterionAssessment],
        family: Optional[CriterionFamily] = None,
    ) -> Optional[float]:
        """Weighted soft maximum 1 - prod(1 - x_i)^(w_i / sum w) over usable criteria.

        Not-applicable and low-confidence criteria are dropped before the
        weights are renormalized. Returns None when nothing usable remains.
        """
        assessments = list(assessments)
        families = {a.family for a in assessments}
        if family is not None:
            families.add(family)
        if len(families) > 1:
            raise ContractViolation(
                f"criteria from more than one family: {', '.join(sorted(f.value for f in families))}"
            )

        usable = [
            a for a in assessments
            if a.is_applicable and a.confidence >= self.weights.confidence_threshold
        ]
        if not usable:
            return None

        raw_weights = np.array([self.weights.weight(a.criterion_id) for a in usable], dtype=float)
        exponents = raw_weights / raw_weights.sum()
        scores = np.array([a.score for a in usable], dtype=float)
        if np.any((scores >= 1.0) & (exponents > 0)):
            return 1.0
        return float(-np.expm1(np.dot(exponents, np.log1p(-scores))))

    def normalize_structural(self, snapshot: Snapshot) -> Dict[str, Tuple[Optional[float], Optional[float]]]:
        """Resolve anomaly and blast signals to percentiles, once per snapshot."""
        by_id = {asset.asset_id: asset for asset in snapshot.assets}

        anomaly = percentile_normalize(
            [
                (a.asset_id, a.structural.anomaly_raw)
                for a in snapshot.assets
                if a.structural.anomaly_percentile is None and a.structural.anomaly_raw is not None
            ],
            peer_key=lambda asset_id: self.peer_key(by_id[asset_id]),
        )
        blast = percentile_normalize(
            [
                (a.asset_id, a.structural.blast_raw)
                for a in snapshot.assets
                if a.structural.blast_percentile is None and a.structural.blast_raw is not None
            ],
            peer_key=lambda asset_id: self.blast_peer_key(by_id[asset_id]),
        )

        resolved = {}
        for asset in snapshot.assets:
            signals = asset.structural
            v_anom = signals.anomaly_percentile if signals.anomaly_percentile is not None else anomaly.get(asset.asset_id)
            v_blast = signals.blast_percentile if signals.blast_percentile is not None else blast.get(asset.asset_id)
            resolved[asset.asset_id] = (v_anom, v_blast)

        logger.info(
            f"Normalized structural signals: {len(anomaly)} anomaly and {len(blast)} blast raw values"
        )
        return resolved

    def context_vector(
        self,
        asset: Asset,
        structural: Tuple[Optional[float], Optional[float]] = (None, None),
    ) -> ContextVector:
        v_anom, v_blast = structural
        return ContextVector(
            v_anom=v_anom,
            v_blast=v_blast,
            v_bfc=self.soft_max_criteria(asset.bfc_criteria, CriterionFamily.BFC),
            v_dc=self.soft_max_criteria(asset.dc_criteria, CriterionFamily.DC),
        )

    @staticmethod
    def criticality_index(vector: ContextVector) -> ContextIndex:
        """Equal-exponent soft maximum over available components.

        With no components the index is the neutral 0.5 and k=0.
        """
        components = vector.components()
        k = len(components)
        if k == 0:
            return ContextIndex(index=0.5, k=0)
        if k == 1:
            return ContextIndex(index=components[0], k=1)
        values = np.array(components, dtype=float)
        if np.any(values >= 1.0):
            return ContextIndex(index=1.0, k=k)
        index = float(-np.expm1(np.log1p(-values).sum() / k))
        return ContextIndex(index=min(max(index, 0.0), 1.0), k=k)

    def modulation_multiplier(self, index: ContextIndex, alpha: Optional[float] = None) -> float:
        """clip(1 + alpha(2c - 1), 1 - alpha, 1 + alpha); exactly 1 when no context exists."""
        alpha = self.modulation.alpha if alpha is None else alpha
        if index.k == 0:
            return 1.0
        return float(np.clip(1.0 + alpha * (2.0 * index.index - 1.0), 1.0 - alpha, 1.0 + alpha))
