"""
Configuration management for the Church synthesis toolkit
"""
from contextlib import contextmanager
from typing import Iterator, Optional

from pydantic import validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Toolkit settings with validation"""

    # Application
    APP_NAME: str = "Church Synthesis Toolkit"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = "INFO"

    # Automata construction limits
    STATE_CAP: int = 100000
    MAX_TRACKS: int = 8
    MAX_INTERNAL_TRACKS: int = 14
    """Bounds auxiliary tracks of quantified variables only; free variables stay under MAX_TRACKS"""

    # Solver
    BRUTE_FORCE_LIMIT: int = 14

    # Sampling and reproducibility
    DEFAULT_SEED: int = 0
    SAMPLE_LASSO_COUNT: int = 20

    # Artifacts
    OUTPUT_DIR: str = "./synth_out"

    @validator("LOG_LEVEL")
    def validate_log_level(cls, v):
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"LOG_LEVEL must be a logging level name, got {v}")
        return level

    @validator("STATE_CAP")
    def validate_state_cap(cls, v):
        if v < 1:
            raise ValueError("STATE_CAP must be positive")
        return v

    @validator("MAX_TRACKS")
    def validate_max_tracks(cls, v):
        if not 0 <= v <= 8:
            raise ValueError("MAX_TRACKS must lie between 0 and 8")
        return v

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


# Global settings instance
settings = Settings()


@contextmanager
def override_state_cap(limit: Optional[int]) -> Iterator[None]:
    """Temporarily replace STATE_CAP; None keeps the current value"""
    saved = settings.STATE_CAP
    if limit is not None:
        settings.STATE_CAP = limit
    try:
        yield
    finally:
        settings.STATE_CAP = saved
