"""
bm_distance/codec.py
─────────────────────────────────────────────────────────────────────────────
JSON encodings. Rationals travel as "p/q" strings only.

  QMatrix    → {"n": int, "entries": [["p/q", ...], ...]}
  VPolytope  → {"n": int, "vertices": [["p/q", ...], ...]}
  HPolytope  → {"n": int, "halfspaces": [{"normal": [...], "offset": "p/q"}, ...]}
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Union

from .errors import DimensionMismatch
from .exact import HPolytope, QMatrix, QVector, VPolytope, format_rational, parse_rational


def _rat_in(x: Any) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ValueError(f"rationals must be 'p/q' strings or integers, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    return parse_rational(str(x))


def encode_vector(v: Iterable[Fraction]) -> list[str]:
    return [format_rational(x) for x in v]


def decode_vector(raw: Iterable[Any]) -> QVector:
    return tuple(_rat_in(x) for x in raw)


def encode_matrix(M: QMatrix) -> dict:
    return {"n": M.n, "entries": [encode_vector(row) for row in M.entries]}


def decode_matrix(raw: Union[dict, list]) -> QMatrix:
    # A bare list of rows is accepted for hand-written input files.
    rows = raw["entries"] if isinstance(raw, dict) else raw
    M = QMatrix.from_rows([decode_vector(r) for r in rows])
    if isinstance(raw, dict) and raw.get("n", M.n) != M.n:
        raise DimensionMismatch(f"declared n={raw['n']} but entries are {M.n}×{M.n}")
    return M


def encode_vpolytope(V: VPolytope) -> dict:
    return {"n": V.n, "vertices": [encode_vector(v) for v in V.vertices]}


def decode_vpolytope(raw: Union[dict, list]) -> VPolytope:
    verts = raw["vertices"] if isinstance(raw, dict) else raw
    V = VPolytope.from_points(decode_vector(v) for v in verts)
    if isinstance(raw, dict) and raw.get("n", V.n) != V.n:
        raise DimensionMismatch(f"declared n={raw['n']} but vertices have length {V.n}")
    return V


def encode_hpolytope(H: HPolytope) -> dict:
    return {
        "n": H.n,
        "halfspaces": [{"normal": encode_vector(a), "offset": format_rational(b)} for a, b in H.halfspaces],
    }


def decode_hpolytope(raw: dict) -> HPolytope:
    hs = tuple((decode_vector(h["normal"]), _rat_in(h["offset"])) for h in raw["halfspaces"])
    return HPolytope(int(raw["n"]), hs)


def load_json(path: Union[str, Path]) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False)
