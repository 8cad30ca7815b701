import argparse
import logging
from pathlib import Path

from core.settings import Settings
from database.report_store import export_csv
from database.rules_store import load_rules
from database.snapshot_store import write_scores
from models.analysis_model import SCORE_BINS
from services.analysis_service import bin_distribution
from services.contextualizer_service import ContextualizerService
from services.scoring_service import ScoringService
from routes.common import (
    EXIT_OK,
    add_scoring_overrides,
    add_snapshot_argument,
    command,
    output_dir,
    positive_int,
    read_snapshot,
    scoring_config,
)

logger = logging.getLogger(__name__)


@command
def cmd_score(args: argparse.Namespace, settings: Settings) -> int:
    """Score every in-scope asset; write ranked breakdowns (JSONL) and the bin summary (CSV)."""
    config = scoring_config(args)
    snapshot = read_snapshot(args.snapshot, args.format)

    if args.rules:
        rules = load_rules(args.rules)
        contextualizer = ContextualizerService()
        snapshot = contextualizer.classify_context(contextualizer.apply_severity_rules(snapshot, rules), rules)

    scoring = ScoringService(config, jobs=args.jobs or settings.jobs)
    breakdowns = scoring.score_snapshot(snapshot)
    ranking = scoring.rank(breakdowns)
    distribution = bin_distribution(b.final for b in breakdowns)

    directory = output_dir(args, settings)
    stem = Path(args.snapshot).stem
    scores_path = write_scores(ranking, breakdowns, directory / f"{stem}.scores.jsonl")
    bins_path = export_csv(distribution, directory / f"{stem}.bins.csv")

    print(f"scored {len(breakdowns)} of {len(snapshot.assets)} assets in {snapshot.snapshot_id}")
    for score_bin in SCORE_BINS:
        print(f"  {score_bin.value:<13} {distribution.share(score_bin):8.2%}")
    for ranked in ranking[:args.top]:
        print(f"  #{ranked.rank:<4} {ranked.asset_id}  {ranked.final:.4f}")
    print(f"wrote {scores_path} and {bins_path}")
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("score", help="score and rank a snapshot")
    add_snapshot_argument(parser)
    add_scoring_overrides(parser)
    parser.add_argument("--rules", type=Path, help="rules file applied before scoring")
    parser.add_argument("--top", type=positive_int, default=10, help="ranked assets printed to stdout")
    parser.set_defaults(handler=cmd_score)
