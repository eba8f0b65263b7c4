from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    # Output
    QSSA_OUT_DIR: Path = Path("qssa_out")

    # Logging
    QSSA_LOG_LEVEL: str = "INFO"
    QSSA_LOG_FORMAT: str = "json"

    # Integration defaults
    QSSA_REL_TOL: float = 1e-10
    QSSA_ABS_TOL_SCALE: float = 1e-12
    QSSA_MAX_STEPS: int = 2_000_000

    # Verification
    QSSA_DENSE_SAMPLES: int = 8
    QSSA_SLACK_FACTOR: float = 10.0
    QSSA_DEFAULT_Q: float = 0.97

    # Sweeps and figure batches
    QSSA_MAX_WORKERS: int = 4


settings = Settings()
