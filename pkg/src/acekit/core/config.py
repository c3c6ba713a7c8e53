"""Configuration management using TOML files, environment variables and platformdirs."""

from __future__ import annotations

from pathlib import Path

import platformdirs
from pydantic import BaseModel, Field
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

APP_NAME = "acekit"


def config_dir() -> Path:
    return Path(platformdirs.user_config_dir(APP_NAME))


def data_dir() -> Path:
    return Path(platformdirs.user_data_dir(APP_NAME))


class NumericsConfig(BaseModel):
    irls_tol: float = 1e-10
    irls_max_iter: int = 100
    separation_bound: float = 1e4
    clip_ps: bool = False
    clip_bounds: tuple[float, float] = (1e-6, 1 - 1e-6)
    enumerate_max_p: int = 20


class HarnessConfig(BaseModel):
    workers: int = 1
    master_seed: int = 20240101
    output_dir: Path = Field(default_factory=lambda: Path.cwd())
    csv_decimals: int = 4


class DensityConfig(BaseModel):
    grid_points: int = 201


class Config(BaseSettings):
    """Settings read from ``acekit.toml`` and ``ACEKIT_*`` environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="ACEKIT_",
        env_nested_delimiter="__",
        toml_file=config_dir() / "acekit.toml",
    )

    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    harness: HarnessConfig = Field(default_factory=HarnessConfig)
    density: DensityConfig = Field(default_factory=DensityConfig)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings, env_settings, TomlConfigSettingsSource(settings_cls))

    @classmethod
    def load(cls) -> Config:
        """Load config from the TOML file and environment, falling back to defaults."""
        return cls()
