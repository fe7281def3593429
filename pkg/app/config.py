from pathlib import Path
from typing import List, Union

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    output_dir: Path = Path("results")
    log_level: str = "INFO"
    workers: int = 1
    progress: bool = True

    warmup_fraction: float = 0.1
    min_transmissions: int = 30
    confidence: float = 0.95
    stat_bins: int = 100
    batch_count: int = 20

    solver_tol: float = 1e-9
    solver_max_iter: int = 10_000
    solver_damping: float = 0.5

    oracle_queue_cap: int = 4
    oracle_overflow_mass: float = 1e-9

    strict_scenarios: bool = True
    mandatory_quantities: Union[List[str], str] = Field(
        default_factory=lambda: ["adf", "idle_probability", "frame_length", "collision_probability"]
    )

    model_config = SettingsConfigDict(
        env_prefix="MSCS_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    @field_validator("mandatory_quantities", mode="before")
    @classmethod
    def parse_quantities(cls, v):
        if isinstance(v, str):
            return [x.strip() for x in v.split(",") if x.strip()]
        return v

    @field_validator("warmup_fraction")
    @classmethod
    def check_warmup(cls, v):
        if not 0.0 <= v < 1.0:
            raise ValueError("warmup_fraction must lie in [0, 1)")
        return v


config = Settings()
