import argparse
import logging
from collections import Counter
from pathlib import Path

from pydantic import ValidationError

from core.exceptions import ConfigurationError
from core.settings import Settings
from database.snapshot_store import write_snapshot
from models.asset_model import in_scope
from models.generator_model import GeneratorConfig
from services.generator_service import GeneratorService
from routes.common import EXIT_OK, command, mix, output_dir, positive_int, unit_float

logger = logging.getLogger(__name__)

_FLAG_FIELDS = (
    "asset_count", "vendor_mix", "domain_mix", "severity_mix", "finding_rate", "attack_vector_rate",
    "context_coverage", "structural_coverage", "mean_findings", "context_skew",
)


@command
def cmd_generate(args: argparse.Namespace, settings: Settings) -> int:
    """Write a seeded synthetic snapshot and print its realized mix."""
    fields = {name: getattr(args, name) for name in _FLAG_FIELDS if getattr(args, name) is not None}
    fields["seed"] = args.seed if args.seed is not None else settings.seed
    fields["vendor_coverage"] = args.vendor_coverage
    try:
        config = GeneratorConfig(**fields)
    except ValidationError as e:
        raise ConfigurationError(f"invalid generator config: {e}")

    snapshot = GeneratorService(config).generate_snapshot()
    target = args.output or output_dir(args, settings) / f"{snapshot.snapshot_id}.jsonl"
    write_snapshot(snapshot, target)

    total = len(snapshot.assets)
    vendors = Counter(asset.vendor for asset in snapshot.assets)
    with_findings = sum(1 for asset in snapshot.assets if asset.findings)
    with_vectors = sum(1 for asset in snapshot.assets if asset.attack_vectors.path_count > 0)
    print(f"generated {total} assets (seed {config.seed})")
    for vendor, count in vendors.most_common():
        print(f"  {vendor:<20} {count:>8} {count / total:8.2%}  (target {config.vendor_mix[vendor]:.2%})")
    print(f"  with findings        {with_findings:>8} {with_findings / total:8.2%}  (target {config.finding_rate:.2%})")
    print(f"  with attack vectors  {with_vectors:>8}")
    print(f"  in scope             {sum(1 for a in snapshot.assets if in_scope(a)):>8}")
    print(f"wrote {target}")
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("generate", help="generate a seeded synthetic snapshot")
    parser.add_argument("--count", dest="asset_count", type=positive_int, default=None, help="number of assets")
    parser.add_argument("--vendor-mix", dest="vendor_mix", type=mix, help="e.g. AWS=0.8,GCP=0.2")
    parser.add_argument("--domain-mix", dest="domain_mix", type=mix)
    parser.add_argument("--severity-mix", dest="severity_mix", type=mix, help="e.g. INFO=0.4,LOW=0.3,...")
    parser.add_argument("--finding-rate", dest="finding_rate", type=unit_float)
    parser.add_argument("--attack-vector-rate", dest="attack_vector_rate", type=unit_float)
    parser.add_argument("--context-coverage", dest="context_coverage", type=unit_float)
    parser.add_argument("--structural-coverage", dest="structural_coverage", type=unit_float)
    parser.add_argument("--mean-findings", dest="mean_findings", type=float)
    parser.add_argument("--context-skew", dest="context_skew", type=float)
    parser.add_argument(
        "--vendor-coverage", dest="vendor_coverage", action="store_true",
        help="draw findings per vendor at the reference coverage instead of --finding-rate",
    )
    parser.add_argument("--output", type=Path, help="target JSONL (default: <output-dir>/<snapshot_id>.jsonl)")
    parser.set_defaults(handler=cmd_generate)
