import argparse
import logging
from pathlib import Path

from core.settings import Settings
from database.report_store import export_csv
from models.asset_model import in_scope
from services.analysis_service import AnalysisService
from routes.common import EXIT_OK, add_snapshot_argument, command, output_dir, read_snapshot

logger = logging.getLogger(__name__)


@command
def cmd_validate(args: argparse.Namespace, settings: Settings) -> int:
    snapshot = read_snapshot(args.snapshot, args.format)
    scoped = sum(1 for asset in snapshot.assets if in_scope(asset))
    print(f"valid: {snapshot.snapshot_id} with {len(snapshot.assets)} assets ({scoped} in scope)")
    return EXIT_OK


@command
def cmd_summarize(args: argparse.Namespace, settings: Settings) -> int:
    """Vendor and domain breakdown of a snapshot."""
    snapshot = read_snapshot(args.snapshot, args.format)
    summary = AnalysisService.summarize_snapshot(snapshot)
    target = export_csv(summary, output_dir(args, settings) / f"{Path(args.snapshot).stem}.summary.csv")

    print(f"{'vendor':<20} {'resources':>10} {'share':>8} {'types':>6} {'in scope':>9} {'coverage':>9}")
    for row in summary.vendors:
        print(
            f"{row.name:<20} {row.resources:>10} {row.share:>8.2%} {row.asset_types:>6} "
            f"{row.in_scope:>9} {row.coverage:>9.2%}"
        )
    print(f"{'total':<20} {summary.total_resources:>10} {'':>8} {summary.total_asset_types:>6} {summary.total_in_scope:>9}")
    print()
    for row in summary.domains:
        print(f"{row.name:<24} {row.resources:>10} {row.share:>8.2%}")
    print(f"wrote {target}")
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    validate = subparsers.add_parser("validate", help="validate a snapshot file")
    add_snapshot_argument(validate)
    validate.set_defaults(handler=cmd_validate)

    summarize = subparsers.add_parser("summarize", help="vendor and domain breakdown of a snapshot")
    add_snapshot_argument(summarize)
    summarize.set_defaults(handler=cmd_summarize)
