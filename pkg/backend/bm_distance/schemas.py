"""
bm_distance/schemas.py
─────────────────────────────────────────────────────────────────────────────
Pydantic models for everything that crosses a file boundary: search config,
equidistance sweep grids and the per-run manifest.
"""

from __future__ import annotations

import hashlib
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field, field_validator

from .exact import parse_rational

TOOL_VERSION = "1.0.0"


def _rational_text(v: Any) -> str:
    if isinstance(v, float):
        raise ValueError("rationals must be written as 'p/q' strings, not floats")
    return str(v)


class SearchConfig(BaseModel):
    n:                 int   = Field(3, ge=2, le=8)
    restarts:          int   = Field(200, ge=1)
    max_iters:         int   = Field(5000, ge=1)
    seed:              int   = 42
    denominator_bound: int   = Field(1_000_000, ge=1)
    det_guard:         float = Field(1e-9, gt=0)
    regression_slack:  float = Field(1e-3, gt=0)
    certify_top:       int   = Field(5, ge=1)


class SweepGrid(BaseModel):
    """
    TOML layout:
        r = ["7/4", "9/5", "15/8"]
        k_per_r = 3                 # or: k = ["1/3", "5/18"]
        bodies = ["square", "hexagon", "octagon"]
        random_bodies = 10
        seed = 7
        explore = false
    """
    r:             list[str]
    k:             Optional[list[str]] = None
    k_per_r:       int = Field(3, ge=1)
    bodies:        list[str] = Field(default_factory=lambda: ["square", "hexagon", "octagon"])
    random_bodies: int = Field(0, ge=0)
    seed:          int = 0
    explore:       bool = False

    @field_validator("r", "k", mode="before")
    @classmethod
    def _no_floats(cls, v):
        if v is None:
            return v
        out = [_rational_text(x) for x in v]
        for x in out:
            parse_rational(x)
        return out

    def rs(self) -> list[Fraction]:
        return [parse_rational(x) for x in self.r]

    def ks(self) -> Optional[list[Fraction]]:
        return None if self.k is None else [parse_rational(x) for x in self.k]


class RunManifest(BaseModel):
    command:      str
    arguments:    dict[str, Any]
    seeds:        list[int] = Field(default_factory=list)
    tool_version: str = TOOL_VERSION
    input_hashes: dict[str, str] = Field(default_factory=dict)
    output_hash:  Optional[str] = None
    exit_code:    int = 0
    outcome:      dict[str, Any] = Field(default_factory=dict)
    started_at:   str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
