"""Seeded synthetic snapshots shaped like a multi-cloud inventory.

Every draw comes from a single numpy PCG64 stream seeded by
``GeneratorConfig.seed``, consumed in a fixed order, so a seed identifies a
snapshot exactly. Mix counts are allocated by largest remainder before being
shuffled, which keeps realized shares within 1/asset_count of the mix.
"""
import logging
from datetime import datetime, timezone
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from models.asset_model import (
    SEVERITY_ORDER,
    Asset,
    AttackVectorEvidence,
    CriterionAssessment,
    Finding,
    Snapshot,
    StructuralSignals,
)
from models.criteria_model import NOT_APPLICABLE, CriterionFamily, CriterionId, criteria_in, labels_for
from models.generator_model import DATALESS_DOMAINS, DOMAIN_ASSET_TYPES, VENDOR_COVERAGE, GeneratorConfig

logger = logging.getLogger(__name__)

GENERATED_AT = datetime(2025, 1, 1, tzinfo=timezone.utc)
CONTROLS_PER_DOMAIN = 40

_ENV_TAGS = {"development": "dev", "pre_production": "staging", "production": "prod"}


def allocate(total: int, mix: Mapping[str, float]) -> Dict[str, int]:
    """Largest-remainder split of ``total`` across the mix keys, in mix order."""
    names = list(mix)
    quotas = np.array([mix[n] for n in names], dtype=float) * total
    counts = np.floor(quotas).astype(int)
    remainder = total - int(counts.sum())
    if remainder > 0:
        # stable sort keeps mix order among equal remainders
        order = np.argsort(-(quotas - counts), kind="stable")
        counts[order[:remainder]] += 1
    return dict(zip(names, counts.tolist()))


def _slug(name: str) -> str:
    return "".join(ch if ch.isalnum() else "-" for ch in name.lower()).strip("-")


class GeneratorService:
    def __init__(self, config: Optional[GeneratorConfig] = None):
        self.config = config or GeneratorConfig()

    def generate_snapshot(self, snapshot_id: Optional[str] = None) -> Snapshot:
        config = self.config
        n = config.asset_count
        rng = np.random.default_rng(config.seed)

        vendors = self._assign(rng, n, config.vendor_mix)
        domains = self._assign(rng, n, config.domain_mix)
        with_findings = self._finding_assets(rng, vendors)
        with_vectors = self._pick(rng, n, config.attack_vector_rate)
        with_context = self._pick(rng, n, config.context_coverage)
        with_structural = self._pick(rng, n, config.structural_coverage)

        width = len(str(n))
        assets = []
        for i in range(n):
            asset_id = f"{_slug(vendors[i])}-{i:0{width}d}"
            domain = domains[i]
            bfc, dc = self._criteria(rng, domain) if with_context[i] else ((), ())
            assets.append(Asset(
                asset_id=asset_id,
                vendor=vendors[i],
                asset_type=str(rng.choice(DOMAIN_ASSET_TYPES[domain])),
                findings=self._findings(rng, asset_id, domain) if with_findings[i] else (),
                attack_vectors=self._attack_vectors(rng, asset_id) if with_vectors[i] else AttackVectorEvidence(),
                structural=self._structural(rng) if with_structural[i] else StructuralSignals(),
                bfc_criteria=bfc,
                dc_criteria=dc,
                metadata_tags=self._tags(rng, domain, bfc),
            ))

        snapshot = Snapshot(
            snapshot_id=snapshot_id or f"synthetic-{config.seed}-{n}",
            assets=tuple(assets),
            created_at=GENERATED_AT,
        )
        logger.info(
            f"Generated snapshot {snapshot.snapshot_id}: {n} assets, "
            f"{int(with_findings.sum())} with findings, {int(with_vectors.sum())} with attack vectors"
        )
        return snapshot

    @staticmethod
    def _assign(rng: np.random.Generator, n: int, mix: Mapping[str, float]) -> List[str]:
        labels = [name for name, count in allocate(n, mix).items() for _ in range(count)]
        return [labels[j] for j in rng.permutation(n)]

    @staticmethod
    def _pick(rng: np.random.Generator, n: int, rate: float) -> np.ndarray:
        chosen = np.zeros(n, dtype=bool)
        chosen[rng.permutation(n)[:int(round(rate * n))]] = True
        return chosen

    def _finding_assets(self, rng: np.random.Generator, vendors: Sequence[str]) -> np.ndarray:
        if not self.config.vendor_coverage:
            return self._pick(rng, len(vendors), self.config.finding_rate)

        chosen = np.zeros(len(vendors), dtype=bool)
        for vendor in self.config.vendor_mix:
            members = np.flatnonzero(np.array(vendors) == vendor)
            if members.size == 0:
                continue
            rate = VENDOR_COVERAGE.get(vendor, self.config.finding_rate)
            chosen[rng.permutation(members)[:int(round(rate * members.size))]] = True
        return chosen

    def _findings(self, rng: np.random.Generator, asset_id: str, domain: str) -> Tuple[Finding, ...]:
        count = int(rng.geometric(1.0 / self.config.mean_findings))
        severities = rng.choice(len(SEVERITY_ORDER), size=count, p=self.config.severity_probabilities())
        controls = rng.integers(1, CONTROLS_PER_DOMAIN + 1, size=count)
        prefix = _slug(domain).split("-")[0]
        return tuple(
            Finding(
                finding_id=f"{asset_id}-f{j + 1}",
                control_id=f"{prefix}-{int(control):03d}",
                original_severity=SEVERITY_ORDER[int(severity)],
            )
            for j, (severity, control) in enumerate(zip(severities, controls))
        )

    def _attack_vectors(self, rng: np.random.Generator, asset_id: str) -> AttackVectorEvidence:
        weights = self.config.path_count_weights
        path_count = int(rng.choice(len(weights), p=weights)) + 1
        return AttackVectorEvidence(
            path_count=path_count,
            pattern_ids=tuple(f"{asset_id}-av{k + 1}" for k in range(path_count)),
        )

    @staticmethod
    def _structural(rng: np.random.Generator) -> StructuralSignals:
        return StructuralSignals(
            anomaly_raw=round(float(rng.gamma(2.0, 1.0)), 6),
            blast_raw=float(rng.poisson(4.0)),
        )

    def _label(self, rng: np.random.Generator, criterion: CriterionId) -> str:
        """Scale labels run low to high; a positive skew favours the upper end."""
        labels = labels_for(criterion)
        weights = np.arange(1, len(labels) + 1, dtype=float) ** self.config.context_skew
        return labels[int(rng.choice(len(labels), p=weights / weights.sum()))]

    def _criteria(self, rng: np.random.Generator, domain: str):
        bfc = tuple(
            CriterionAssessment(
                criterion_id=c, label=self._label(rng, c), confidence=round(float(rng.uniform(0.5, 1.0)), 3),
            )
            for c in criteria_in(CriterionFamily.BFC)
        )
        if domain in DATALESS_DOMAINS:
            dc = tuple(
                CriterionAssessment(criterion_id=c, label=NOT_APPLICABLE)
                for c in criteria_in(CriterionFamily.DC)
            )
        else:
            dc = tuple(
                CriterionAssessment(
                    criterion_id=c, label=self._label(rng, c), confidence=round(float(rng.uniform(0.5, 1.0)), 3),
                )
                for c in criteria_in(CriterionFamily.DC)
            )
        return bfc, dc

    @staticmethod
    def _tags(rng: np.random.Generator, domain: str, bfc: Sequence[CriterionAssessment]) -> Dict[str, str]:
        environment = next((a.label for a in bfc if a.criterion_id is CriterionId.ENVIRONMENT), None)
        if environment is None:
            environment = str(rng.choice(tuple(_ENV_TAGS)))
        return {"env": _ENV_TAGS[environment], "domain": domain}
