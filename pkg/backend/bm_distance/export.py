"""
bm_distance/export.py
─────────────────────────────────────────────────────────────────────────────
JSON / CSV writers and run manifests.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable

from .schemas import RunManifest

log = logging.getLogger("bm_distance.export")


def export_json(payload: Any, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
    log.info(f"JSON → {path}")


def csv_text(rows: Iterable[dict]) -> str:
    dicts = [r.to_dict() if hasattr(r, "to_dict") else r for r in rows]
    if not dicts: return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(dicts[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(dicts)
    return buf.getvalue()


def export_csv(rows: Iterable[dict], path: Path) -> None:
    text = csv_text(rows)
    if not text: return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(text)
    log.info(f"CSV  → {path}  ({text.count(chr(10)) - 1} records)")


def timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S_%f")


def write_manifest(manifest: RunManifest, directory: Path) -> Path:
    path = directory / f"{manifest.command}_{timestamp()}.json"
    export_json(manifest.model_dump(), path)
    return path
