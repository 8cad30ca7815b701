import sys
import argparse
import logging
from pathlib import Path
from typing import List, Optional

from core.exceptions import ConfigurationError
from core.settings import LOG_LEVELS, load_settings
from routes import generate_route, rules_route, score_route, snapshot_route, sweep_route
from routes.common import EXIT_INVALID, positive_int

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asset-scoring",
        description="Context-aware asset risk scoring and sensitivity analysis",
    )
    parser.add_argument("--config", type=Path, help="YAML scoring config (keys mirror ScoringConfig)")
    parser.add_argument("--output-dir", dest="output_dir", type=Path, help="directory for machine-readable outputs")
    parser.add_argument("--seed", type=int, help="seed for every random draw")
    parser.add_argument("--log-level", dest="log_level", type=str.upper, choices=LOG_LEVELS)
    parser.add_argument("--jobs", type=positive_int, help="worker threads (default: available processors)")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    score_route.register(subparsers)
    generate_route.register(subparsers)
    rules_route.register(subparsers)
    sweep_route.register(subparsers)
    snapshot_route.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID

    logging.basicConfig(
        level=args.log_level or settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logger.debug(f"Running {args.command} with {vars(args)}")
    return args.handler(args, settings)


if __name__ == "__main__":
    sys.exit(main())
