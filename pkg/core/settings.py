import os
import logging
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from core.exceptions import ConfigurationError

load_dotenv()                         # reads .env

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass(frozen=True)
class Settings:
    output_dir: Path
    jobs: int
    log_level: str
    seed: int


def _int_env(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


def load_settings() -> Settings:
    """Read process settings from the environment (and .env if present)."""
    log_level = os.getenv("ASSET_SCORING_LOG_LEVEL", "INFO").upper()
    if log_level not in LOG_LEVELS:
        raise ConfigurationError(
            f"ASSET_SCORING_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {log_level!r}"
        )

    settings = Settings(
        output_dir=Path(os.getenv("ASSET_SCORING_OUTPUT_DIR", "out")),
        jobs=_int_env("ASSET_SCORING_JOBS", os.cpu_count() or 1, minimum=1),
        log_level=log_level,
        seed=_int_env("ASSET_SCORING_SEED", 42, minimum=0),
    )
    logger.debug(f"Loaded settings: {settings}")
    return settings
