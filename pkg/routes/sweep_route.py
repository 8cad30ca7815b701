import argparse
import logging
from pathlib import Path

from core.settings import Settings
from database.config_store import parse_alpha, severity_presets
from database.report_store import export_csv, export_curves_csv
from database.rules_store import load_rules
from models.context_model import ALPHA_PRESETS
from models.exposure_model import SEVERITY_PRESETS, TAU_PRESETS
from services.analysis_service import DEFAULT_P_MAX, AnalysisService
from services.contextualizer_service import ContextualizerService
from routes.common import (
    EXIT_OK,
    add_scoring_overrides,
    add_snapshot_argument,
    command,
    float_list,
    name_list,
    output_dir,
    positive_int,
    read_snapshot,
    scoring_config,
)

logger = logging.getLogger(__name__)


def _prepare(args: argparse.Namespace, settings: Settings):
    config = scoring_config(args)
    snapshot = read_snapshot(args.snapshot, args.format)
    analysis = AnalysisService(config, jobs=args.jobs or settings.jobs)
    return snapshot, analysis, output_dir(args, settings), Path(args.snapshot).stem


@command
def cmd_sweep_severity(args: argparse.Namespace, settings: Settings) -> int:
    presets = severity_presets(args.presets)
    snapshot, analysis, directory, stem = _prepare(args, settings)
    result = analysis.severity_sweep(snapshot, presets)

    export_csv(result, directory / f"{stem}.severity_sweep.csv")
    for preset in presets:
        export_curves_csv(result, directory / f"{stem}.severity_curves.{preset.name}.csv", series=preset.name)

    for point in result.points:
        mean = "n/a" if point.mean is None else f"{point.mean:.4f}"
        print(f"  {point.label:<20} mean b_mis {mean}  over {point.resources} resources")
    print(f"wrote {len(presets) + 1} files to {directory}")
    return EXIT_OK


@command
def cmd_sweep_tau(args: argparse.Namespace, settings: Settings) -> int:
    snapshot, analysis, directory, stem = _prepare(args, settings)
    result = analysis.tau_sweep(snapshot, args.values, p_max=args.p_max)

    export_csv(result, directory / f"{stem}.tau_sweep.csv")
    export_curves_csv(result, directory / f"{stem}.tau_curves.csv")
    for point in result.points:
        mean = "n/a" if point.mean is None else f"{point.mean:.4f}"
        print(f"  tau={point.parameter_value:<6g} mean b_vec {mean}  over {point.resources} resources")
    print(f"wrote 2 files to {directory}")
    return EXIT_OK


def _alphas(args: argparse.Namespace) -> list:
    if args.values:
        return args.values
    if args.presets == ["all"]:
        return list(ALPHA_PRESETS.values())
    return [parse_alpha(name) for name in args.presets]


@command
def cmd_sweep_alpha(args: argparse.Namespace, settings: Settings) -> int:
    alphas = _alphas(args)
    presets = severity_presets(args.severity_presets) if args.severity_presets else None
    snapshot, analysis, directory, stem = _prepare(args, settings)
    if presets:
        results = analysis.severity_alpha_grid(snapshot, presets, alphas)
    else:
        results = {None: analysis.alpha_sweep(snapshot, alphas)}

    for preset_name, result in results.items():
        suffix = f".{preset_name}" if preset_name else ""
        export_csv(result, directory / f"{stem}.alpha_sweep{suffix}.csv")
        for point in result.points:
            mean = "n/a" if point.mean is None else f"{point.mean:.4f}"
            label = f" ({point.label})" if point.label else ""
            prefix = f"{preset_name:<20} " if preset_name else ""
            print(f"  {prefix}alpha={point.parameter_value:g}{label} mean final {mean}  over {point.resources} resources")
    print(f"wrote {len(results)} files to {directory}")
    return EXIT_OK


@command
def cmd_sweep_ai_adjust(args: argparse.Namespace, settings: Settings) -> int:
    presets = severity_presets(args.presets)
    snapshot, analysis, directory, stem = _prepare(args, settings)
    if args.rules:
        snapshot = ContextualizerService().apply_severity_rules(snapshot, load_rules(args.rules))

    reports = analysis.adjustment_sweep(snapshot, presets)
    export_csv(reports, directory / f"{stem}.ai_adjust.csv")
    for report in reports:
        print(f"  {report.preset:<20} adjusted subset {report.before.total_resources} resources")
        for delta in report.deltas:
            print(
                f"    {delta.score_bin.value:<13} {delta.share_before:8.2%} -> {delta.share_after:8.2%} "
                f"({delta.delta:+.2%})"
            )
    print(f"wrote 1 file to {directory}")
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    sweep = subparsers.add_parser("sweep", help="sensitivity and ablation sweeps")
    kinds = sweep.add_subparsers(dest="kind", metavar="KIND", required=True)

    severity = kinds.add_parser("severity", help="severity-weight presets")
    add_snapshot_argument(severity)
    add_scoring_overrides(severity)
    severity.add_argument(
        "--presets", type=name_list, default=["all"],
        help=f"'all' or comma-separated names from: {', '.join(SEVERITY_PRESETS)}",
    )
    severity.set_defaults(handler=cmd_sweep_severity)

    tau = kinds.add_parser("tau", help="attack-vector saturation rate")
    add_snapshot_argument(tau)
    add_scoring_overrides(tau)
    tau.add_argument("--values", type=float_list, default=list(TAU_PRESETS), help="e.g. 3,5,7,10,15")
    tau.add_argument("--p-max", dest="p_max", type=positive_int, default=DEFAULT_P_MAX)
    tau.set_defaults(handler=cmd_sweep_tau)

    alpha = kinds.add_parser("alpha", help="contextualization strength")
    add_snapshot_argument(alpha)
    add_scoring_overrides(alpha)
    alpha.add_argument(
        "--presets", type=name_list, default=["all"],
        help=f"'all' or comma-separated names from: {', '.join(ALPHA_PRESETS)}",
    )
    alpha.add_argument("--values", type=float_list, help="explicit alphas; overrides --presets")
    alpha.add_argument(
        "--severity-presets", dest="severity_presets", type=name_list,
        help="repeat the sweep once per severity-weight preset ('all' or names)",
    )
    alpha.set_defaults(handler=cmd_sweep_alpha)

    adjust = kinds.add_parser("ai-adjust", help="original vs adjusted severities")
    add_snapshot_argument(adjust)
    add_scoring_overrides(adjust)
    adjust.add_argument(
        "--presets", type=name_list, default=["baseline"],
        help=f"'all' or comma-separated names from: {', '.join(SEVERITY_PRESETS)}",
    )
    adjust.add_argument("--rules", type=Path, help="severity rules applied before the comparison")
    adjust.set_defaults(handler=cmd_sweep_ai_adjust)
