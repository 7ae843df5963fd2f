"""Simulator settings.

Reads configuration ONLY from the .env file, not from the system environment.
Every knob carries the ``MACROBELL_`` prefix, e.g. ``MACROBELL_TAIL_TOL=1e-12``.
"""

from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SimulatorSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="MACROBELL_",
        extra="ignore",
        case_sensitive=False,
    )

    # Truncation and windows
    tail_tol: float = Field(default=1e-14, gt=0.0, le=1e-6)
    window_sigmas: float = Field(default=8.0, gt=0.0)
    max_alpha: float = Field(default=12.0, gt=0.0)

    # Quadrature grid (cell-centred, bounds are cell edges)
    grid_bound: float = Field(default=8.0, ge=8.0)
    grid_step: float = Field(default=1.0 / 32.0, gt=0.0, le=1.0 / 32.0)

    # Noise-cutoff search
    cutoff_tol: float = Field(default=1e-4, gt=0.0, le=1e-3)
    scan_steps_per_scale: int = Field(default=8, ge=1)
    scan_max_scales: float = Field(default=6.0, gt=0.0)
    monotone_tol: float = Field(default=1e-9, ge=0.0)

    # Angle optimisation
    psi_scan_points: int = Field(default=200, ge=3)
    psi_tol: float = Field(default=1e-6, gt=0.0)

    # Execution
    jobs: int = Field(default=1, ge=1)
    mc_batch: int = Field(default=1_000_000, ge=1)

    # Logging
    log_level: str = Field(default="INFO")
    enable_logfire: bool = Field(default=False)
    logfire_token: Optional[str] = Field(default=None)

    @classmethod
    def settings_customise_sources(
        cls, settings_cls, init_settings, env_settings, dotenv_settings, file_secret_settings,
    ):
        return (init_settings, dotenv_settings, file_secret_settings)


@lru_cache(maxsize=1)
def get_settings() -> SimulatorSettings:
    """Process-wide settings singleton."""
    return SimulatorSettings()
