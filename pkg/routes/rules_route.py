import argparse
import logging
from pathlib import Path

from core.settings import Settings
from database.rules_store import load_rules
from database.snapshot_store import write_snapshot
from services.contextualizer_service import ContextualizerService
from routes.common import EXIT_OK, add_snapshot_argument, command, output_dir, read_snapshot

logger = logging.getLogger(__name__)


@command
def cmd_apply_rules(args: argparse.Namespace, settings: Settings) -> int:
    """Adjust severities and classify criteria, writing the contextualized snapshot."""
    rules = load_rules(args.rules)
    snapshot = read_snapshot(args.snapshot, args.format)

    contextualizer = ContextualizerService()
    adjusted = contextualizer.apply_severity_rules(snapshot, rules)
    contextualized = contextualizer.classify_context(adjusted, rules)

    target = args.output or output_dir(args, settings) / f"{Path(args.snapshot).stem}.contextualized.jsonl"
    write_snapshot(contextualized, target)

    adjusted_findings = sum(
        1 for asset in contextualized.assets for f in asset.findings if f.adjusted_severity is not None
    )
    with_context = sum(1 for asset in contextualized.assets if asset.has_context)
    print(f"applied {len(rules)} rules: {adjusted_findings} adjusted findings, {with_context} assets with context")
    print(f"wrote {target}")
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("apply-rules", help="apply a rules file to a snapshot")
    add_snapshot_argument(parser)
    parser.add_argument("--rules", type=Path, required=True, help="YAML rules file")
    parser.add_argument("--output", type=Path, help="target JSONL (default: <output-dir>/<stem>.contextualized.jsonl)")
    parser.set_defaults(handler=cmd_apply_rules)
