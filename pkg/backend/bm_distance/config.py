"""
bm_distance/config.py
─────────────────────────────────────────────────────────────────────────────
Runtime settings. Environment (and a .env file next to the process) supplies
defaults; TOML config files and CLI flags override them.
"""

from __future__ import annotations

import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


class Settings(BaseModel):
    jobs:                int  = Field(1, ge=1)
    log_level:           str  = "WARNING"
    output_dir:          Path = Path("output")
    sampler_attempts:    int  = Field(100_000, ge=1)
    sampler_denominator: int  = Field(10_000, ge=1)
    search_restarts:     int  = Field(200, ge=1)
    search_max_iters:    int  = Field(5000, ge=1)
    denominator_bound:   int  = Field(1_000_000, ge=1)


_ENV = {
    "jobs":                "BM_JOBS",
    "log_level":           "BM_LOG_LEVEL",
    "output_dir":          "BM_OUTPUT_DIR",
    "sampler_attempts":    "BM_SAMPLER_ATTEMPTS",
    "sampler_denominator": "BM_SAMPLER_DENOMINATOR",
    "search_restarts":     "BM_SEARCH_RESTARTS",
    "search_max_iters":    "BM_SEARCH_MAX_ITERS",
    "denominator_bound":   "BM_DENOMINATOR_BOUND",
}


def get_settings() -> Settings:
    """Read BM_* variables at call time so tests can monkeypatch the environment."""
    raw = {field: os.getenv(var) for field, var in _ENV.items()}
    return Settings(**{k: v for k, v in raw.items() if v not in (None, "")})


def load_toml(path: Union[str, Path]) -> dict[str, Any]:
    with open(path, "rb") as f:
        return tomllib.load(f)
