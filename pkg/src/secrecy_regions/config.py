"""
Configuration management using Pydantic Settings.

Configuration is loaded from, in increasing priority: field defaults, a
``secrecy.toml`` file in the working directory, ``.env``, ``SECRECY_*``
environment variables, an explicit ``--config`` TOML file, and finally
command-line flags. Configuration is immutable once loaded.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from pydantic import Field, field_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)


class Config(BaseSettings):
    """
    Resolved run configuration.

    All fields are immutable after initialization.
    """

    model_config = SettingsConfigDict(
        env_prefix="SECRECY_",
        env_file=".env",
        env_file_encoding="utf-8",
        toml_file="secrecy.toml",
        extra="ignore",
        frozen=True,
    )

    # Runtime
    log_level: Literal["debug", "info", "warning", "error"] = Field(
        default="info",
        description="Logging level",
    )
    workers: int = Field(default=1, ge=1, description="Worker threads for enumeration")
    seed: int = Field(default=0, ge=0, description="Base random seed")

    # Probability numerics
    probability_tolerance: float = Field(
        default=1e-12,
        gt=0,
        description="Tolerance for pmf normalization and marginal consistency",
    )
    degradation_tolerance: float = Field(
        default=1e-9,
        gt=0,
        description="Residual norm below which a degrading kernel is accepted",
    )

    # Degraded-region search
    grid_resolution: int = Field(default=16, ge=1, description="Simplex grid denominator")
    random_samples: int = Field(default=2000, ge=0, description="Dirichlet samples")
    refine_iters: int = Field(default=50, ge=0, description="Hill-climb refinement passes")
    mu_grid: list[float] = Field(
        default=[1.0, 1.5, 2.0, 4.0, 8.0],
        description="Trade-off weights for R1 + mu R2",
    )

    # Fading broadcast
    quadrature_tolerance: float = Field(
        default=1e-9,
        gt=0,
        description="Absolute tolerance of adaptive Simpson quadrature",
    )
    tail_mass: float = Field(
        default=1e-6,
        gt=0,
        lt=1,
        description="Gain axis is truncated where 1 - F(s) drops below this",
    )
    optimizer_max_iter: int = Field(default=20000, ge=1, description="Projected ascent cap")

    # Exact enumeration budgets
    max_output_bits: float = Field(
        default=24.0,
        gt=0,
        description="Largest n*log2|alphabet| enumerated exactly",
    )
    max_codewords: int = Field(default=65536, ge=1, description="Codebook size cap")

    # Output
    csv_digits: int = Field(default=12, ge=1, le=17, description="CSV significant digits")
    units: Literal["bits", "nats"] = Field(default="bits", description="Rate units on output")

    @field_validator("mu_grid")
    @classmethod
    def _mu_at_least_one(cls, value: list[float]) -> list[float]:
        if not value or any(mu < 1.0 for mu in value):
            raise ValueError("mu_grid must be non-empty with every mu >= 1")
        return value

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            TomlConfigSettingsSource(settings_cls),
        )


def load_config(path: Path | None = None, **overrides: Any) -> Config:
    """
    Load configuration, layering an optional TOML file and explicit overrides.

    ``None`` overrides are ignored so unset CLI flags fall through to lower
    layers.
    """
    values: dict[str, Any] = {}
    if path is not None:
        values.update(TomlConfigSettingsSource(Config, toml_file=path)())
    values.update({key: value for key, value in overrides.items() if value is not None})
    return Config(**values)
