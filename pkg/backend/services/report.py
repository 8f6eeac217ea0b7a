from typing import Dict, List, Optional
from fractions import Fraction
import math

from bm_distance.exact import format_rational


def search_table(report: Dict) -> str:
    """Plain-text summary of one search report, for humans on stderr."""
    rows = [
        ("dimension", str(report["n"])),
        ("restarts", str(report["restarts"])),
        ("seed", str(report["seed"])),
        ("best float ratio", f"{report['best_float_ratio']:.12f}"),
        ("exact ratio", report["exact_ratio"]),
        ("winning candidate", f"{report['winner']} (restart {report['winner_restart']})"),
        ("known optimum", report["theorem_value"] or "unknown"),
        ("sqrt(n/2)", f"{report['conjecture_constant']:.6f}"),
    ]
    if report.get("nice") is not None:
        rows.append(("nice octahedron", "yes" if report["nice"] else "no"))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def markdown_report(entries: List[Dict]) -> str:
    """
    One row per dimension:
    | n | best exact ratio | known optimum | sqrt(n/2) |
    """
    lines = [
        "| n | best exact ratio | ≈ | known optimum | sqrt(n/2) |",
        "|---|------------------|---|---------------|-----------|",
    ]
    for e in entries:
        exact: Fraction = e["exact_ratio"]
        known: Optional[Fraction] = e.get("theorem_value")
        lines.append(
            f"| {e['n']} | {format_rational(exact)} | {float(exact):.6f} | "
            f"{format_rational(known) if known is not None else '—'} | {math.sqrt(e['n'] / 2):.6f} |"
        )
    return "\n".join(lines) + "\n"
