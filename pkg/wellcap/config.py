from __future__ import annotations

import os
from dataclasses import dataclass

from wellcap.errors import ConfigError


@dataclass(frozen=True)
class Settings:
    log_level: str
    database_url: str
    test_point_budget: int
    sample_retry_limit: int
    sample_denominator: int
    epsilon_halvings: int
    default_samples: int
    default_seed: int



def _env_int(name: str, default: int, minimum: int = 0) -> int:
    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    try:
        parsed = int(value.strip())
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {value!r}") from exc
    if parsed < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {parsed}")
    return parsed



def _env_optional_str(name: str, default: str = "") -> str:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip()



def get_settings() -> Settings:
    database_url = _env_optional_str("DATABASE_URL")
    # Archive URLs are plain SQLAlchemy URLs; a bare path is treated as a sqlite file.
    if database_url and "://" not in database_url:
        database_url = f"sqlite:///{database_url}"

    return Settings(
        log_level=os.getenv("LOG_LEVEL", "INFO"),
        database_url=database_url,
        test_point_budget=_env_int("TEST_POINT_BUDGET", 4096, minimum=1),
        sample_retry_limit=_env_int("SAMPLE_RETRY_LIMIT", 25),
        sample_denominator=_env_int("SAMPLE_DENOMINATOR", 64, minimum=1),
        epsilon_halvings=_env_int("EPSILON_HALVINGS", 48, minimum=1),
        default_samples=_env_int("DEFAULT_SAMPLES", 50),
        default_seed=_env_int("DEFAULT_SEED", 0),
    )
