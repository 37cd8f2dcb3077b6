"""Application configuration using Pydantic settings."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application configuration with environment variable support."""

    # Output
    output_root: str = Field(default="runs", description="Default root directory for run outputs")
    jobs: int = Field(default=1, ge=1, description="Worker processes for sweeps")

    # Logging
    log_level: str = Field(default="INFO", description="Root log level")

    # Integration
    rtol: float = Field(default=1e-9, gt=0, description="Relative tolerance of the RK45 stepper")
    atol: float = Field(default=1e-11, gt=0, description="Absolute tolerance of the RK45 stepper")
    max_step: float = Field(default=0.01, gt=0, description="Largest integration step (s)")
    event_tolerance: float = Field(
        default=1e-9, gt=0, description="Residual tolerance at located events (natural units)"
    )
    event_time_tolerance: float = Field(
        default=1e-10, gt=0, description="Time tolerance of event bracketing (s)"
    )
    log_interval: float = Field(default=1e-3, gt=0, description="Trace sample spacing (s)")

    model_config = SettingsConfigDict(
        env_prefix="WALKER_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


def get_settings() -> Settings:
    """Get application settings (can be used for dependency injection)."""
    return Settings()
