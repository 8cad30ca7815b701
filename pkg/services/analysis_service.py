"""Sensitivity and ablation studies over a snapshot.

Every statistic is resource-weighted (each in-scope resource counts once)
and computed over in-scope assets only.
"""
import math
import logging
from bisect import bisect_right
from collections import Counter, defaultdict
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from core.exceptions import ConfigurationError, ContractViolation
from models.analysis_model import (
    AdjustmentReport,
    BIN_EDGES,
    BinDelta,
    BinDistribution,
    BreakdownRow,
    CurvePoint,
    SCORE_BINS,
    ScoreBin,
    SnapshotSummary,
    SweepPoint,
    SweepResult,
)
from models.asset_model import Asset, Severity, Snapshot, in_scope
from models.context_model import ALPHA_PRESETS
from models.exposure_model import SeverityWeightConfig
from models.scoring_model import ScoringConfig
from services.context_service import ContextService
from services.contextualizer_service import ContextualizerService
from services.exposure_service import ExposureService
from services.scoring_service import ScoringService, final_score

logger = logging.getLogger(__name__)

DEFAULT_P_MAX = 30
CUMULATIVE = "cumulative"


def bin_of(score: float) -> ScoreBin:
    if not 0.0 <= score <= 1.0:
        raise ContractViolation(f"score must lie in [0,1], got {score}")
    return SCORE_BINS[bisect_right(BIN_EDGES, score)]


def bin_distribution(scores: Iterable[float]) -> BinDistribution:
    values = np.asarray(list(scores), dtype=float)
    if values.size == 0:
        return BinDistribution()
    if np.any(~((values >= 0.0) & (values <= 1.0))):
        raise ContractViolation("every score must lie in [0,1]")
    counts = np.bincount(np.digitize(values, BIN_EDGES), minlength=len(SCORE_BINS))
    return BinDistribution(
        shares={score_bin: float(count / values.size) for score_bin, count in zip(SCORE_BINS, counts)},
        total_resources=int(values.size),
    )


def adjustment_delta(
    before: BinDistribution,
    after: BinDistribution,
    drop_unchanged: bool = True,
) -> List[BinDelta]:
    """Signed per-bin share change; unchanged bins are dropped unless asked for."""
    deltas = []
    for score_bin in SCORE_BINS:
        share_before, share_after = before.share(score_bin), after.share(score_bin)
        delta = share_after - share_before
        if drop_unchanged and abs(delta) <= 1e-12:
            continue
        deltas.append(BinDelta(
            score_bin=score_bin, share_before=share_before, share_after=share_after, delta=delta,
        ))
    return deltas


def _mean(values: Sequence[float]) -> Optional[float]:
    return float(np.mean(values)) if len(values) else None


def _alpha_label(alpha: float) -> Optional[str]:
    return next((name for name, value in ALPHA_PRESETS.items() if value == alpha), None)


class AnalysisService:
    def __init__(self, config: Optional[ScoringConfig] = None, jobs: int = 1):
        self.config = config or ScoringConfig()
        self.jobs = jobs
        self.contextualizer = ContextualizerService()

    def severity_sweep(
        self,
        snapshot: Snapshot,
        presets: Sequence[SeverityWeightConfig],
        config: Optional[ScoringConfig] = None,
    ) -> SweepResult:
        """b_mis per severity-weight preset, with per-cell and cumulative curves per highest-severity group.

        Point i carries preset i (label) and the bin distribution of b_mis over
        in-scope assets. Curve series are named after the preset; groups are the
        highest effective severity of an asset.
        """
        config = config or self.config
        scoped = snapshot.in_scope_assets()
        points, curves = [], []

        for position, preset in enumerate(presets):
            exposure = ExposureService(config.with_overrides(severity_weights=preset).exposure)
            b_mis = [exposure.misconfiguration_exposure(asset.findings) for asset in scoped]
            points.append(SweepPoint(
                parameter_value=float(position),
                label=preset.name,
                mean=_mean(b_mis),
                resources=len(b_mis),
                distribution=bin_distribution(b_mis),
            ))
            curves.extend(self._accumulation_curves(preset.name, exposure, scoped))

        logger.info(f"Severity sweep over {len(presets)} presets and {len(scoped)} in-scope assets")
        return SweepResult(parameter_name="severity_weights", points=tuple(points), curves=tuple(curves))

    @staticmethod
    def _accumulation_curves(series: str, exposure: ExposureService, assets: Sequence[Asset]) -> List[CurvePoint]:
        """Two curves per highest-severity group.

        ``<group>``: mean b_mis of the assets with exactly n findings; empty
        cells are omitted and ``resources`` is the cell size.

        ``<group>/cumulative``: mean b_mis of each asset's n most severe
        findings over the whole group, assets with fewer than n findings
        contributing their full score. ``resources`` is the group size and
        the curve never decreases.
        """
        use_adjusted = exposure.config.use_adjusted_severity
        cells: Dict[str, Dict[int, List[float]]] = defaultdict(lambda: defaultdict(list))
        prefixes: Dict[str, List[List[float]]] = defaultdict(list)

        for asset in assets:
            if not asset.findings:
                continue
            ordered = sorted(asset.findings, key=lambda f: f.effective_severity(use_adjusted).rank, reverse=True)
            group = ordered[0].effective_severity(use_adjusted).value
            prefix = [exposure.misconfiguration_exposure(ordered[:n]) for n in range(1, len(ordered) + 1)]
            cells[group][len(ordered)].append(prefix[-1])
            prefixes[group].append(prefix)

        curves = []
        for group in sorted(cells, key=lambda g: Severity(g).rank, reverse=True):
            for n in sorted(cells[group]):
                values = cells[group][n]
                curves.append(CurvePoint(
                    series=series, group=group, x=float(n), y=float(np.mean(values)), resources=len(values),
                ))

            rows = prefixes[group]
            width = max(len(p) for p in rows)
            matrix = np.array([p + [p[-1]] * (width - len(p)) for p in rows], dtype=float)
            for n, value in enumerate(matrix.mean(axis=0), start=1):
                curves.append(CurvePoint(
                    series=series, group=f"{group}/{CUMULATIVE}", x=float(n), y=float(value), resources=len(rows),
                ))
        return curves

    def adjustment_sweep(
        self,
        snapshot: Snapshot,
        presets: Sequence[SeverityWeightConfig],
        config: Optional[ScoringConfig] = None,
    ) -> List[AdjustmentReport]:
        """Original vs adjusted finding-score bins over the adjusted subset, per preset."""
        config = config or self.config
        reports = []
        for preset in presets:
            pairs = self.contextualizer.adjustment_impact(snapshot, config.with_overrides(severity_weights=preset))
            before = bin_distribution(p.score_original for p in pairs)
            after = bin_distribution(p.score_adjusted for p in pairs)
            reports.append(AdjustmentReport(
                preset=preset.name, before=before, after=after, deltas=tuple(adjustment_delta(before, after)),
            ))
        return reports

    def tau_sweep(
        self,
        snapshot: Snapshot,
        taus: Sequence[float],
        config: Optional[ScoringConfig] = None,
        p_max: int = DEFAULT_P_MAX,
    ) -> SweepResult:
        """Mean b_vec over assets with attack-vector evidence, plus theoretical and observed curves."""
        config = config or self.config
        if any(not (math.isfinite(t) and t > 0) for t in taus):
            raise ConfigurationError(f"tau values must be positive, got {list(taus)}")
        subset = [a for a in snapshot.in_scope_assets() if a.attack_vectors.path_count > 0]
        path_counts = Counter(a.attack_vectors.path_count for a in subset)

        points, curves = [], []
        for tau in sorted(set(taus)):
            exposure = ExposureService(config.with_overrides(tau=tau).exposure)
            b_vec = [exposure.attack_vector_exposure(a.attack_vectors) for a in subset]
            points.append(SweepPoint(
                parameter_value=tau,
                mean=_mean(b_vec),
                resources=len(b_vec),
                distribution=bin_distribution(b_vec) if b_vec else None,
            ))
            series = f"tau={tau:g}"
            curves.extend(
                CurvePoint(series=series, group="theoretical", x=float(p), y=-math.expm1(-p / tau))
                for p in range(1, p_max + 1)
            )
            curves.extend(
                CurvePoint(series=series, group="observed", x=float(p), y=-math.expm1(-p / tau), resources=count)
                for p, count in sorted(path_counts.items())
            )

        if not subset:
            logger.warning("Tau sweep: no in-scope asset carries attack-vector evidence")
        return SweepResult(parameter_name="tau", points=tuple(points), curves=tuple(curves))

    def alpha_sweep(
        self,
        snapshot: Snapshot,
        alphas: Sequence[float],
        config: Optional[ScoringConfig] = None,
    ) -> SweepResult:
        """Mean final score and base-vs-final bins over assets with business or data context."""
        config = config or self.config
        for alpha in alphas:
            if not 0.0 < alpha < 1.0:
                raise ConfigurationError(f"alpha must lie in (0,1), got {alpha}")

        scoring = ScoringService(config, jobs=self.jobs)
        subset = [b for b in scoring.score_snapshot(snapshot) if b.context.has_semantic_context]
        base = [b.exposure.b_base for b in subset]
        base_distribution = bin_distribution(base)
        context: ContextService = scoring.context_service

        points = []
        for alpha in sorted(set(alphas)):
            finals = [
                final_score(b.exposure.b_base, context.modulation_multiplier(b.index, alpha))
                for b in subset
            ]
            points.append(SweepPoint(
                parameter_value=alpha,
                label=_alpha_label(alpha),
                mean=_mean(finals),
                resources=len(finals),
                distribution=bin_distribution(finals),
                base_distribution=base_distribution,
            ))

        logger.info(f"Alpha sweep over {len(points)} values and {len(subset)} contextualized assets")
        return SweepResult(parameter_name="alpha", points=tuple(points))

    def severity_alpha_grid(
        self,
        snapshot: Snapshot,
        presets: Sequence[SeverityWeightConfig],
        alphas: Sequence[float],
        config: Optional[ScoringConfig] = None,
    ) -> Dict[str, SweepResult]:
        config = config or self.config
        return {
            preset.name: self.alpha_sweep(snapshot, alphas, config.with_overrides(severity_weights=preset))
            for preset in presets
        }

    @staticmethod
    def summarize_snapshot(snapshot: Snapshot) -> SnapshotSummary:
        """Per-vendor and per-domain inventory breakdown with in-scope coverage."""
        total = len(snapshot.assets)
        vendors: Dict[str, List[Asset]] = defaultdict(list)
        domains: Dict[str, List[Asset]] = defaultdict(list)
        for asset in snapshot.assets:
            vendors[asset.vendor].append(asset)
            domains[asset.metadata_tags.get("domain", "Other")].append(asset)

        def rows(grouped: Dict[str, List[Asset]]) -> tuple:
            result = []
            for name, members in grouped.items():
                scoped = sum(1 for a in members if in_scope(a))
                result.append(BreakdownRow(
                    name=name,
                    resources=len(members),
                    share=len(members) / total,
                    asset_types=len({a.asset_type for a in members}),
                    in_scope=scoped,
                    coverage=scoped / len(members),
                ))
            return tuple(sorted(result, key=lambda r: (-r.resources, r.name)))

        return SnapshotSummary(
            total_resources=total,
            total_asset_types=len({(a.vendor, a.asset_type) for a in snapshot.assets}),
            total_in_scope=sum(1 for a in snapshot.assets if in_scope(a)),
            vendors=rows(vendors),
            domains=rows(domains),
        )
