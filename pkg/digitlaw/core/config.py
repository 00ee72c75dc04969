"""Core configuration with Pydantic v2 Settings."""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


class Settings(BaseSettings):
    """Runtime settings with DIGITLAW_* environment overrides."""

    model_config = SettingsConfigDict(env_prefix="DIGITLAW_", env_file=".env", extra="ignore")

    log_level: str = "WARNING"
    log_format: Literal["json", "plain"] = "json"

    # Work caps
    # Max n for the brute-force probability oracle
    oracle_cap: int = 1_000_000
    # Max m for the linear-scan digit counter
    count_oracle_cap: int = 10_000_000
    # Max number of summed terms for the closed form
    direct_cap: int = 10_000_000
    exact_rational_limit: int = 10_000
    # Max n for the O(n) scan fallback used by distribution()
    scan_cap: int = 1_000_000_000

    # Asymptotic tables stop at this digit position
    max_position: int = 6

    # Series emission: every n below dense_scan_limit, then log-spaced samples
    dense_scan_limit: int = 10_000
    log_points_per_decade: int = 200

    # Output
    precision: int = 6

    # Monte Carlo: trials per independently seeded block
    simulation_block: int = 65_536

    @field_validator("log_level")
    @classmethod
    def _normalize_level(cls, value: str) -> str:
        up = value.upper()
        if up not in _LEVELS:
            return "WARNING"
        return up

    @field_validator(
        "oracle_cap",
        "count_oracle_cap",
        "direct_cap",
        "scan_cap",
        "dense_scan_limit",
        "log_points_per_decade",
        "precision",
        "simulation_block",
    )
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be a positive integer")
        return value

    @field_validator("max_position")
    @classmethod
    def _position_floor(cls, value: int) -> int:
        if value < 2:
            raise ValueError("max_position must be at least 2")
        return value

    @model_validator(mode="after")
    def _oracle_cap_overrides(self) -> "Settings":
        # A lone DIGITLAW_ORACLE_CAP governs every evaluation cap.
        if "oracle_cap" in self.model_fields_set:
            if "count_oracle_cap" not in self.model_fields_set:
                self.count_oracle_cap = self.oracle_cap
            if "direct_cap" not in self.model_fields_set:
                self.direct_cap = self.oracle_cap
        return self


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()
