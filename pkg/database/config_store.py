import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import yaml
from pydantic import ValidationError

from core.exceptions import ConfigurationError
from models.context_model import ALPHA_PRESETS
from models.exposure_model import SEVERITY_PRESETS, SeverityWeightConfig
from models.scoring_model import ScoringConfig

logger = logging.getLogger(__name__)


def severity_preset(name: str) -> SeverityWeightConfig:
    try:
        return SEVERITY_PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown severity preset {name!r}; valid presets: {', '.join(SEVERITY_PRESETS)}"
        )


def alpha_preset(name: str) -> float:
    try:
        return ALPHA_PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown alpha preset {name!r}; valid presets: {', '.join(ALPHA_PRESETS)}")


def severity_presets(names: Sequence[str]) -> list:
    """Resolve preset names in order; "all" expands to every preset."""
    if list(names) == ["all"]:
        return list(SEVERITY_PRESETS.values())
    return [severity_preset(name) for name in names]


def parse_alpha(value: Union[str, float]) -> float:
    """A number or an alpha preset name."""
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(value)
    except ValueError:
        return alpha_preset(value)


def _resolve_presets(document: Dict[str, Any]) -> Dict[str, Any]:
    document = dict(document)
    exposure = document.get("exposure")
    if isinstance(exposure, dict):
        exposure = dict(exposure)
        weights = exposure.get("severity_weights")
        if isinstance(weights, str):
            exposure["severity_weights"] = severity_preset(weights).model_dump()
        elif isinstance(weights, (list, tuple)):
            exposure["severity_weights"] = SeverityWeightConfig.from_tuple("custom", weights).model_dump()
        elif isinstance(weights, dict) and "weights" not in weights:
            exposure["severity_weights"] = {"name": "custom", "weights": weights}
        document["exposure"] = exposure

    modulation = document.get("modulation")
    if isinstance(modulation, dict) and isinstance(modulation.get("alpha"), str):
        document["modulation"] = {**modulation, "alpha": parse_alpha(modulation["alpha"])}
    return document


def scoring_config_from_mapping(document: Optional[Mapping[str, Any]]) -> ScoringConfig:
    if not document:
        return ScoringConfig()
    if not isinstance(document, Mapping):
        raise ConfigurationError("scoring config must be a mapping")
    try:
        return ScoringConfig.model_validate(_resolve_presets(dict(document)))
    except (ValidationError, ValueError) as e:
        raise ConfigurationError(f"invalid scoring config: {e}")


def load_scoring_config(path: Optional[Union[str, Path]] = None, **overrides) -> ScoringConfig:
    """YAML file (keys mirror ScoringConfig) with flag overrides applied on top.

    Overrides use ``ScoringConfig.with_overrides`` names (cap, floor, tau,
    severity_weights, use_adjusted_severity, alpha); None values are ignored.
    """
    document = None
    if path is not None:
        path = Path(path)
        with path.open("r", encoding="utf-8") as f:
            try:
                document = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigurationError(f"{path}: malformed YAML: {e}")
        logger.info(f"Loaded scoring config from {path}")

    config = scoring_config_from_mapping(document)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if isinstance(overrides.get("severity_weights"), str):
        overrides["severity_weights"] = severity_preset(overrides["severity_weights"])
    if "alpha" in overrides:
        overrides["alpha"] = parse_alpha(overrides["alpha"])
    return config.with_overrides(**overrides) if overrides else config
