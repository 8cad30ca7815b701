import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

from models.asset_model import Asset, Snapshot, in_scope
from models.context_model import ContextVector
from models.scoring_model import RankedScore, ScoreBreakdown, ScoringConfig
from services.context_service import ContextService, PeerKey, vendor_type_peers
from services.exposure_service import ExposureService

logger = logging.getLogger(__name__)


def final_score(b_base: float, multiplier: float) -> float:
    """s = min(1, B * m); the only clamp applied after modulation"""
    return min(1.0, b_base * multiplier)


class ScoringService:
    def __init__(
        self,
        config: Optional[ScoringConfig] = None,
        jobs: int = 1,
        peer_key: PeerKey = vendor_type_peers,
        blast_peer_key: PeerKey = vendor_type_peers,
    ):
        self.config = config or ScoringConfig()
        self.jobs = max(1, jobs)
        self.exposure_service = ExposureService(self.config.exposure)
        self.context_service = ContextService(
            self.config.criterion_weights,
            self.config.modulation,
            peer_key=peer_key,
            blast_peer_key=blast_peer_key,
        )

    def score_asset(self, asset: Asset, context: ContextVector) -> ScoreBreakdown:
        """Score one asset whose context vector is already resolved."""
        exposure = self.exposure_service.base_exposure(asset)
        index = self.context_service.criticality_index(context)
        multiplier = self.context_service.modulation_multiplier(index)
        return ScoreBreakdown(
            asset_id=asset.asset_id,
            exposure=exposure,
            context=context,
            index=index,
            multiplier=multiplier,
            final=final_score(exposure.b_base, multiplier),
        )

    def contexts(self, snapshot: Snapshot) -> Dict[str, ContextVector]:
        """Context vectors for every asset, after one snapshot-wide normalization pass"""
        structural = self.context_service.normalize_structural(snapshot)
        return {
            asset.asset_id: self.context_service.context_vector(asset, structural[asset.asset_id])
            for asset in snapshot.assets
        }

    def score_snapshot(self, snapshot: Snapshot) -> List[ScoreBreakdown]:
        """One breakdown per in-scope asset, in input order."""
        structural = self.context_service.normalize_structural(snapshot)
        scoped = [asset for asset in snapshot.assets if in_scope(asset)]

        def score(asset: Asset) -> ScoreBreakdown:
            context = self.context_service.context_vector(asset, structural[asset.asset_id])
            return self.score_asset(asset, context)

        if self.jobs > 1 and len(scoped) > 1:
            # map() keeps input order, so output is identical at any job count
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                breakdowns = list(pool.map(score, scoped))
        else:
            breakdowns = [score(asset) for asset in scoped]

        logger.info(
            f"Scored {len(breakdowns)} in-scope assets of {len(snapshot.assets)} "
            f"in snapshot {snapshot.snapshot_id}"
        )
        return breakdowns

    @staticmethod
    def rank(breakdowns: Sequence[ScoreBreakdown]) -> List[RankedScore]:
        """Final score descending, asset_id ascending on ties."""
        ordered = sorted(breakdowns, key=lambda b: (-b.final, b.asset_id))
        return [
            RankedScore(rank=position, asset_id=b.asset_id, final=b.final)
            for position, b in enumerate(ordered, start=1)
        ]
