"""Shared plumbing for the subcommands: flag parsers, loaders and exit codes."""
import sys
import argparse
import logging
from functools import wraps
from pathlib import Path
from typing import Callable, Dict, List, Optional

from core.exceptions import AssetScoringError, ConfigurationError, ContractViolation, SnapshotValidationError
from core.settings import Settings
from database.config_store import load_scoring_config
from database.snapshot_store import FORMATS, load_snapshot
from models.asset_model import Snapshot
from models.scoring_model import ScoringConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2

Handler = Callable[[argparse.Namespace, Settings], int]


def positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def unit_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {raw!r}")
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0,1], got {value}")
    return value


def positive_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {raw!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def float_list(raw: str) -> List[float]:
    """'3,5,7' -> [3.0, 5.0, 7.0]"""
    try:
        return [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {raw!r}")


def name_list(raw: str) -> List[str]:
    return [part.strip() for part in raw.split(",") if part.strip()]


def mix(raw: str) -> Dict[str, float]:
    """'AWS=0.8,GCP=0.2' -> {'AWS': 0.8, 'GCP': 0.2}"""
    result = {}
    for part in name_list(raw):
        name, sep, share = part.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected NAME=SHARE, got {part!r}")
        try:
            result[name.strip()] = float(share)
        except ValueError:
            raise argparse.ArgumentTypeError(f"share for {name.strip()!r} is not a number: {share!r}")
    return result


def add_snapshot_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("snapshot", type=Path, help="snapshot file (.jsonl or .csv)")
    parser.add_argument("--format", choices=FORMATS, default=None, help="override format detection")


def add_scoring_overrides(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("scoring overrides (take precedence over --config)")
    group.add_argument("--severity-weights", dest="severity_weights", metavar="PRESET")
    group.add_argument("--cap", type=unit_float)
    group.add_argument("--floor", type=unit_float)
    group.add_argument("--tau", type=positive_float)
    group.add_argument("--alpha", metavar="VALUE|PRESET")
    group.add_argument("--use-adjusted", dest="use_adjusted_severity", action="store_true", default=None)


def scoring_config(args: argparse.Namespace) -> ScoringConfig:
    return load_scoring_config(
        getattr(args, "config", None),
        severity_weights=getattr(args, "severity_weights", None),
        cap=getattr(args, "cap", None),
        floor=getattr(args, "floor", None),
        tau=getattr(args, "tau", None),
        alpha=getattr(args, "alpha", None),
        use_adjusted_severity=getattr(args, "use_adjusted_severity", None),
    )


def read_snapshot(path: Path, format: Optional[str] = None) -> Snapshot:
    """Load and validate, raising SnapshotValidationError on rejection."""
    result = load_snapshot(path, format)
    if not isinstance(result, Snapshot):
        raise SnapshotValidationError(result)
    return result


def output_dir(args: argparse.Namespace, settings: Settings) -> Path:
    directory = Path(args.output_dir) if getattr(args, "output_dir", None) else settings.output_dir
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def command(handler: Handler) -> Handler:
    """Map domain failures onto the exit-code contract: 2 invalid input, 1 I/O."""

    @wraps(handler)
    def run(args: argparse.Namespace, settings: Settings) -> int:
        try:
            return handler(args, settings)
        except SnapshotValidationError as e:
            logger.error(f"{handler.__name__}: {e}")
            print(e.report.format(), file=sys.stderr)
            return EXIT_INVALID
        except (ConfigurationError, ContractViolation, ValueError) as e:
            logger.error(f"{handler.__name__}: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INVALID
        except OSError as e:
            logger.error(f"{handler.__name__}: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IO
        except AssetScoringError as e:
            logger.error(f"{handler.__name__}: {e}", exc_info=True)
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INVALID

    return run
