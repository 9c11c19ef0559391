from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # POP_SEED is the default seed for every seeded command
    seed: int = 0
    width_alphabet: list[int] = Field(default_factory=lambda: [64, 128, 256, 512, 1024])
    stem_widths: tuple[int, int] = (32, 64)
    resolution: int = Field(224, gt=0)
    num_classes: int = Field(1000, gt=0)
    max_blocks_per_stage: int = Field(32, gt=0)
    patience: int = 20
    max_evaluations: int | None = None
    # Rejection-sampling attempts per draw when the space is not materialized
    sample_retries: int = 1000
    evaluator_timeout_s: float = 3600.0
    log_level: str = "INFO"

    model_config = SettingsConfigDict(env_prefix="POP_", env_file=".env", extra="ignore")
