from typing import Optional


class AssetScoringError(Exception):
    """Base class for every error raised by the scoring toolkit"""


class ConfigurationError(AssetScoringError):
    """Bad scoring config, generator config, rule or preset name"""

    def __init__(self, message: str, rule_index: Optional[int] = None):
        self.rule_index = rule_index
        if rule_index is not None:
            message = f"rule {rule_index}: {message}"
        super().__init__(message)


class ContractViolation(AssetScoringError):
    """A caller broke an operation's precondition"""


class SnapshotValidationError(AssetScoringError):
    """Raised when a snapshot is rejected; carries the full report"""

    def __init__(self, report):
        self.report = report
        super().__init__(f"snapshot rejected with {len(report.issues)} issue(s)")
