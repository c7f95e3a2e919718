"""
Configuration management using Pydantic settings
"""
from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class LabSettings(BaseSettings):
    """Toolkit configuration, read from PSI_* environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="PSI_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Scalar context
    default_field: str = Field(default="Q", description="Q or F<p>, e.g. F5")
    default_base_point: str = Field(default="0", description="Distinguished point s0")

    # Sampling
    samples: int = Field(default=20, description="Pseudo-random points added to s0 in parity reports")
    seed: int = Field(default=0)
    sample_range: int = Field(default=100, description="Random rational sample points lie in [-range, range]")
    max_sample_attempts: int = Field(default=1000)

    # Generation
    coefficient_bound: int = Field(default=3, description="Random coefficients lie in [-bound, bound]")
    degree_bound: int = Field(default=2)
    max_elementary_ops: int = Field(default=10)
    max_summands: int = Field(default=3, description="Contractible summands inserted by the scrambler")

    # Performance
    max_workers: int = Field(default=4, description="Threads for per-point fiber scans")

    # Output
    report_format: str = Field(default="text")

    # Logging
    log_level: str = Field(default="WARNING")
    log_format: str = Field(default="json")  # json or text

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level"""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Invalid log level: {v}")
        return v.upper()

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v.lower() not in ("json", "text"):
            raise ValueError(f"Invalid log format: {v}")
        return v.lower()

    @field_validator("report_format")
    @classmethod
    def validate_report_format(cls, v: str) -> str:
        if v.lower() not in ("json", "csv", "text"):
            raise ValueError(f"Invalid report format: {v}")
        return v.lower()

    @field_validator("max_workers", "samples", "max_sample_attempts")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        """Ensure counts are positive"""
        if v <= 0:
            raise ValueError("Value must be positive")
        return v

    @field_validator("coefficient_bound", "degree_bound", "max_elementary_ops", "max_summands", "sample_range")
    @classmethod
    def validate_non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("Value must be non-negative")
        return v


@lru_cache()
def get_settings() -> LabSettings:
    """Get cached settings instance"""
    return LabSettings()


# Convenience function to reload settings (useful for testing)
def reload_settings() -> None:
    """Clear settings cache to reload from environment"""
    get_settings.cache_clear()
