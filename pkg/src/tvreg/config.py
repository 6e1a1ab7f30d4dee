"""Configuration management for the TV reconstruction benchmark."""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Worker threads for matrix assembly and independent experiment cells
    threads: int = Field(default=1, ge=1, alias="TVREG_THREADS")

    # Reference solutions dominate runtime, so they are cached on disk
    cache_dir: Path = Field(default=Path(".cache/references"), alias="TVREG_CACHE_DIR")
    output_dir: Path = Field(default=Path("./results"), alias="TVREG_OUTPUT_DIR")

    # Logging
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")


# Global settings instance
settings = Settings()
