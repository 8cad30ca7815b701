import json
import os
from datetime import datetime, timezone
from pathlib import Path

import pytest

from core.exceptions import ConfigurationError
from database.config_store import (
    load_scoring_config,
    parse_alpha,
    scoring_config_from_mapping,
    severity_preset,
    severity_presets,
)
from database.report_store import export_csv, export_curves_csv
from database.rules_store import load_rules
from database.snapshot_store import detect_format, load_snapshot, write_scores, write_snapshot
from models.analysis_model import BinDistribution, ScoreBin, SweepResult
from models.asset_model import Severity, Snapshot, ValidationReport
from models.exposure_model import SEVERITY_PRESETS
from services.analysis_service import AnalysisService, bin_distribution
from services.generator_service import GeneratorService
from models.generator_model import GeneratorConfig
from services.scoring_service import ScoringService

DEFAULT_RULES = Path(__file__).resolve().parent.parent / "rules" / "default_rules.yaml"

ASSET_LINE = json.dumps({
    "asset_id": "bucket-1",
    "vendor": "AWS",
    "asset_type": "object_bucket",
    "findings": [{"finding_id": "f1", "control_id": "storage-001", "original_severity": "HIGH"}],
    "metadata_tags": {"env": "prod"},
})


class TestSnapshotStore:
    def test_single_record(self, tmp_path):
        path = tmp_path / "one.jsonl"
        path.write_text(ASSET_LINE + "\n", encoding="utf-8")
        snapshot = load_snapshot(path)
        assert isinstance(snapshot, Snapshot)
        assert snapshot.snapshot_id == "one"
        assert snapshot.assets[0].findings[0].original_severity is Severity.HIGH

    def test_unknown_severity_names_the_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        bad = ASSET_LINE.replace('"HIGH"', '"SEVERE"').replace("bucket-1", "bucket-2")
        path.write_text(ASSET_LINE + "\n\n" + bad + "\n", encoding="utf-8")
        report = load_snapshot(path)
        assert isinstance(report, ValidationReport)
        (issue,) = report.issues
        assert issue.location.startswith("line 3")
        assert "unknown severity 'SEVERE'" in issue.message

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.jsonl"
        path.write_text(ASSET_LINE + "\n{not json\n", encoding="utf-8")
        report = load_snapshot(path)
        assert isinstance(report, ValidationReport)
        assert report.issues[0].location == "line 2"

    def test_invalid_utf8_names_the_line(self, tmp_path):
        path = tmp_path / "binary.jsonl"
        bad = ASSET_LINE.replace("bucket-1", "b\xff").encode("latin-1")
        path.write_bytes(ASSET_LINE.encode("utf-8") + b"\n" + bad + b"\n")
        report = load_snapshot(path)
        assert isinstance(report, ValidationReport)
        (issue,) = report.issues
        assert issue.location == "line 2"
        assert "invalid UTF-8" in issue.message

    def test_byte_order_mark(self, tmp_path):
        path = tmp_path / "bom.jsonl"
        path.write_bytes(b"\xef\xbb\xbf" + ASSET_LINE.encode("utf-8") + b"\n")
        snapshot = load_snapshot(path)
        assert isinstance(snapshot, Snapshot)
        assert snapshot.assets[0].asset_id == "bucket-1"

    def test_created_at_ignores_file_mtime(self, tmp_path):
        first = tmp_path / "a" / "one.jsonl"
        second = tmp_path / "b" / "one.jsonl"
        for path, mtime in ((first, 1_000_000), (second, 2_000_000)):
            path.parent.mkdir()
            path.write_text(ASSET_LINE + "\n", encoding="utf-8")
            os.utime(path, (mtime, mtime))
        assert load_snapshot(first) == load_snapshot(second)
        assert load_snapshot(first).created_at == datetime(1970, 1, 1, tzinfo=timezone.utc)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        snapshot = load_snapshot(path)
        assert isinstance(snapshot, Snapshot)
        assert snapshot.assets == ()

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_snapshot(tmp_path / "absent.jsonl")

    def test_unknown_extension(self):
        with pytest.raises(ValueError):
            detect_format(Path("snapshot.parquet"))

    def test_round_trip(self, tmp_path, small_snapshot):
        path = write_snapshot(small_snapshot, tmp_path / "small.jsonl")
        assert load_snapshot(path) == small_snapshot

    def test_generated_round_trip_is_byte_stable(self, tmp_path):
        snapshot = GeneratorService(GeneratorConfig(seed=3, asset_count=200, context_coverage=1.0)).generate_snapshot()
        first = write_snapshot(snapshot, tmp_path / "a" / "gen.jsonl")
        loaded = load_snapshot(first)
        assert loaded == snapshot
        second = write_snapshot(loaded, tmp_path / "b" / "gen.jsonl")
        assert first.read_bytes() == second.read_bytes()

    def test_csv_projection(self, tmp_path):
        path = tmp_path / "findings.csv"
        path.write_text(
            "asset_id,vendor,asset_type,finding_id,control_id,original_severity,adjusted_severity,path_count\n"
            "vm-1,AWS,compute_instance,f1,compute-001,HIGH,,2\n"
            "vm-1,AWS,compute_instance,f2,compute-002,low,INFO,2\n"
            "role-1,Okta,iam_role,,,,,\n",
            encoding="utf-8",
        )
        snapshot = load_snapshot(path)
        vm, role = snapshot.assets
        assert [f.finding_id for f in vm.findings] == ["f1", "f2"]
        assert vm.findings[1].adjusted_severity is Severity.INFO
        assert vm.attack_vectors.path_count == 2
        assert role.findings == ()

    def test_csv_byte_order_mark(self, tmp_path):
        path = tmp_path / "excel.csv"
        path.write_bytes(
            b"\xef\xbb\xbfasset_id,vendor,asset_type,finding_id,control_id,original_severity\n"
            b"vm-1,AWS,compute_instance,f1,compute-001,HIGH\n"
        )
        snapshot = load_snapshot(path)
        assert isinstance(snapshot, Snapshot)
        assert snapshot.assets[0].asset_id == "vm-1"

    def test_csv_bad_severity_names_the_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "asset_id,vendor,asset_type,finding_id,control_id,original_severity\n"
            "vm-1,AWS,compute_instance,f1,compute-001,HIGH\n"
            "vm-2,AWS,compute_instance,f1,compute-001,SEVERE\n",
            encoding="utf-8",
        )
        report = load_snapshot(path)
        assert isinstance(report, ValidationReport)
        assert report.issues[0].location.startswith("row 3")

    def test_scores_file(self, tmp_path, small_snapshot):
        service = ScoringService()
        breakdowns = service.score_snapshot(small_snapshot)
        path = write_scores(service.rank(breakdowns), breakdowns, tmp_path / "small.scores.jsonl")
        lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert [line["rank"] for line in lines] == [1, 2]
        assert lines[0]["asset_id"] == "bucket-1"
        assert lines[0]["breakdown"]["final"] == lines[0]["final"]


class TestRulesStore:
    def test_file_order(self, tmp_path):
        path = tmp_path / "rules.yaml"
        path.write_text(
            "- match: {tag-equals: {env: dev}}\n"
            "  action: {set_severity: LOW}\n"
            "- action: {set_label: environment, value: production}\n"
            "- name: third\n"
            "  action: {kind: set_label, criterion: data_type, value: internal}\n",
            encoding="utf-8",
        )
        rule_set = load_rules(path)
        assert len(rule_set) == 3
        assert [r.action.kind for r in rule_set] == ["set_severity", "set_label", "set_label"]
        assert rule_set.rules[2].name == "third"

    def test_label_outside_scale(self, tmp_path):
        path = tmp_path / "rules.yaml"
        path.write_text("rules:\n  - action: {set_label: environment, value: staging}\n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="rule 0") as error:
            load_rules(path)
        assert "staging" in str(error.value)
        assert error.value.rule_index == 0

    def test_empty_file(self, tmp_path):
        path = tmp_path / "rules.yaml"
        path.write_text("", encoding="utf-8")
        assert len(load_rules(path)) == 0

    def test_bad_pattern(self, tmp_path):
        path = tmp_path / "rules.yaml"
        path.write_text(
            "- action: {set_severity: LOW}\n"
            "- match: {tag-matches: {env: '[dev'}}\n"
            "  action: {set_severity: LOW}\n",
            encoding="utf-8",
        )
        with pytest.raises(ConfigurationError, match="rule 1"):
            load_rules(path)

    def test_default_rules_load(self):
        rule_set = load_rules(DEFAULT_RULES)
        assert len(rule_set) == 9


class TestConfigStore:
    def test_presets(self):
        assert severity_preset("linear") is SEVERITY_PRESETS["linear"]
        assert len(severity_presets(["all"])) == 6
        assert parse_alpha("aggressive") == 0.30
        assert parse_alpha("0.25") == 0.25

    def test_unknown_preset_lists_valid_names(self):
        with pytest.raises(ConfigurationError, match="baseline, conservative"):
            severity_preset("extreme")
        with pytest.raises(ConfigurationError, match="very-aggressive"):
            parse_alpha("wild")

    def test_mapping_forms(self):
        config = scoring_config_from_mapping({
            "exposure": {"severity_weights": [0, 0.1, 0.2, 0.3, 0.4], "tau": 3},
            "modulation": {"alpha": "moderate"},
        })
        assert config.exposure.severity_weights.as_tuple() == (0, 0.1, 0.2, 0.3, 0.4)
        assert config.exposure.tau == 3.0
        assert config.modulation.alpha == 0.15

    def test_invalid_mapping(self):
        with pytest.raises(ConfigurationError):
            scoring_config_from_mapping({"exposure": {"cap": 2}})

    def test_file_with_overrides(self, tmp_path):
        path = tmp_path / "scoring.yaml"
        path.write_text("exposure:\n  severity_weights: conservative\n  tau: 3\n", encoding="utf-8")
        config = load_scoring_config(path, tau=10.0, alpha="aggressive", cap=None)
        assert config.exposure.severity_weights.name == "conservative"
        assert config.exposure.tau == 10.0
        assert config.modulation.alpha == 0.30

    def test_example_config_loads(self):
        example = Path(__file__).resolve().parent.parent / "scoring.example.yaml"
        assert load_scoring_config(example).exposure.tau == 7.0


class TestReportStore:
    def test_tau_sweep_rows(self, tmp_path, small_snapshot):
        result = AnalysisService().tau_sweep(small_snapshot, [3, 5, 7, 10, 15])
        path = export_csv(result, tmp_path / "tau.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 6
        assert lines[0].startswith("parameter_name,parameter_value,label,mean,resources,INFO_BIN")

    def test_byte_identical(self, tmp_path, small_snapshot):
        result = AnalysisService().tau_sweep(small_snapshot, [3, 7])
        first = export_csv(result, tmp_path / "one.csv").read_bytes()
        second = export_csv(result, tmp_path / "two.csv").read_bytes()
        assert first == second
        assert b"\r" not in first

    def test_empty_sweep(self, tmp_path):
        path = export_csv(SweepResult(parameter_name="tau"), tmp_path / "empty.csv")
        assert len(path.read_text(encoding="utf-8").splitlines()) == 1

    def test_distribution(self, tmp_path):
        path = export_csv(bin_distribution([0.1, 0.1, 0.3, 0.95]), tmp_path / "bins.csv")
        assert path.read_text(encoding="utf-8").splitlines()[1:] == [
            "INFO_BIN,0.500000,2",
            "LOW_BIN,0.250000,1",
            "MEDIUM_BIN,0.000000,0",
            "HIGH_BIN,0.000000,0",
            "CRITICAL_BIN,0.250000,1",
        ]

    def test_empty_distribution(self, tmp_path):
        path = export_csv(BinDistribution(), tmp_path / "bins.csv")
        assert path.read_text(encoding="utf-8").splitlines()[1] == "INFO_BIN,0.000000,0"
        assert BinDistribution().share(ScoreBin.LOW_BIN) == 0.0

    def test_curves(self, tmp_path, small_snapshot):
        result = AnalysisService().tau_sweep(small_snapshot, [3], p_max=4)
        path = export_curves_csv(result, tmp_path / "curves.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "series,group,x,y,resources"
        assert lines[1] == "tau=3,theoretical,1.000000,0.283469,0"
        assert len(lines) == 1 + 4 + 1

    def test_unsupported_type(self, tmp_path):
        with pytest.raises(TypeError):
            export_csv({"not": "a result"}, tmp_path / "x.csv")
