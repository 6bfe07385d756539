import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, field_validator


DEFAULT_FIXTURE_DIR = Path(__file__).resolve().parent / "data"


class Settings(BaseModel):
    """Runtime limits and paths, read from the environment."""

    lattice_cap: int = Field(512, description="Largest group order for full subgroup lattices")
    matrix_element_cap: int = Field(10000, description="Largest closure size for matrix groups")
    embed_budget: int = Field(200000, description="Node budget for embedding searches")
    conductor_cap: int = Field(256, description="Largest cyclotomic conductor")
    random_seed: int = Field(20240601, description="Seed for randomized splitting and sampling")
    fixture_dir: Path = Field(DEFAULT_FIXTURE_DIR, description="Directory holding the TSV fixtures")
    log_level: str = Field("INFO", description="Root logging level")

    @field_validator("lattice_cap", "matrix_element_cap", "embed_budget", "conductor_cap")
    @classmethod
    def positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("limits must be positive")
        return v

    @field_validator("log_level")
    @classmethod
    def known_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level: {v}")
        return level


def load_settings() -> Settings:
    return Settings(
        lattice_cap=int(os.getenv("EXCOMP_LATTICE_CAP", "512")),
        matrix_element_cap=int(os.getenv("EXCOMP_MATRIX_ELEMENT_CAP", "10000")),
        embed_budget=int(os.getenv("EXCOMP_EMBED_BUDGET", "200000")),
        conductor_cap=int(os.getenv("EXCOMP_CONDUCTOR_CAP", "256")),
        random_seed=int(os.getenv("EXCOMP_RANDOM_SEED", "20240601")),
        fixture_dir=Path(os.getenv("EXCOMP_FIXTURE_DIR", str(DEFAULT_FIXTURE_DIR))),
        log_level=os.getenv("LOG_LEVEL", "INFO"),
    )


_settings: Optional[Settings] = None


def get_settings(refresh: bool = False) -> Settings:
    global _settings
    if _settings is None or refresh:
        _settings = load_settings()
    return _settings
