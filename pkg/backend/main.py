"""
backend/main.py — Banach–Mazur toolkit command line
Batch CLI: exit 0 certified, 1 certificate/property failure (witness JSON on
stdout), 2 invalid input or usage (diagnostic on stderr).
"""
from __future__ import annotations
import argparse, json, logging, sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional

from pydantic import ValidationError

from bm_distance.asymmetry import asymmetry, polygon_asymmetry, verify_contact_points
from bm_distance.certify import certify_sandwich, enumerate_nice_octahedra, OperatorT
from bm_distance.codec import (
    decode_hpolytope,
    decode_matrix,
    decode_vpolytope,
    dumps,
    encode_hpolytope,
    encode_vector,
    encode_vpolytope,
    load_json,
)
from bm_distance.config import Settings, get_settings, load_toml
from bm_distance.equidistant import (
    STANDARD_BODIES, PentagonParams, certify_equidistance, construction_conditions, grid_ks, pentagon,
    random_symmetric_polygon, sweep_job,
)
from bm_distance.errors import BMError, FAILURE_ERRORS
from bm_distance.exact import format_rational, parse_rational, polygon_to_h, convex_hull_2d
from bm_distance.export import csv_text, export_csv, export_json, write_manifest
from bm_distance.lemma import (
    LEMMA_RADIUS, claim3d_report, corner_classify, find_lemma_counterexample, nice_member_record, run_lemma_trial,
)
from bm_distance.runner import run_batch
from bm_distance.schemas import RunManifest, SearchConfig, SweepGrid, sha256_file, sha256_text
from bm_distance.search import optimize
from services.report import markdown_report, search_table

log = logging.getLogger("bm_distance.cli")


@dataclass
class CommandResult:
    code:    int
    payload: str
    outcome: dict[str, Any] = field(default_factory=dict)
    seeds:   list[int] = field(default_factory=list)
    inputs:  list[Path] = field(default_factory=list)


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational 'p/q', got {text!r}")


def _dims(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected '2..4' or '2,3,4', got {text!r}")


# ── commands ──────────────────────────────────────────────────────────────────

def cmd_certify(args, settings: Settings) -> CommandResult:
    if args.r <= 0:
        raise ValueError("r must be positive")
    M = decode_matrix(load_json(args.matrix))
    cert = certify_sandwich(OperatorT.of(M), args.r)
    return CommandResult(0, dumps(cert.to_dict()), {"ratio": format_rational(cert.ratio)}, inputs=[args.matrix])


def cmd_enum_nice(args, settings: Settings) -> CommandResult:
    family = enumerate_nice_octahedra()
    records = run_batch(nice_member_record, family, jobs=args.jobs, label="enum-nice")
    out: Path = args.out
    index = []
    for i, rec in enumerate(records):
        name = f"nice_{i:03d}.json"
        export_json(rec, out / name)
        index.append({"file": name, "r_inner": rec["r_inner"], "certified": rec["certified"],
                      "claim3d": rec["claim3d"]["holds"], "occupied_cubes": rec["claim3d"]["occupied_cubes"]})
    export_json({"count": len(records), "matrices": index}, out / "manifest.json")
    ok = all(r["certified"] and r["claim3d"]["holds"] and r["claim3d"]["occupied_cubes"] == 6 for r in records)
    summary = {"count": len(records), "all_certified": ok, "out": str(out)}
    return CommandResult(0 if ok else 1, dumps(summary), summary)


def _search_config(args, settings: Settings, n: Optional[int] = None) -> SearchConfig:
    base: dict[str, Any] = {
        "restarts": settings.search_restarts,
        "max_iters": settings.search_max_iters,
        "denominator_bound": settings.denominator_bound,
    }
    if getattr(args, "config", None):
        base.update(load_toml(args.config))
    for key in ("n", "restarts", "max_iters", "seed", "denominator_bound"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    if n is not None:
        base["n"] = n
    return SearchConfig(**base)


def cmd_search(args, settings: Settings) -> CommandResult:
    config = _search_config(args, settings)
    report = optimize(config, jobs=args.jobs).to_dict()
    print(search_table(report), file=sys.stderr)
    inputs = [args.config] if args.config else []
    return CommandResult(0, dumps(report), {"exact_ratio": report["exact_ratio"]}, [config.seed], inputs)


def cmd_report(args, settings: Settings) -> CommandResult:
    entries, seeds = [], []
    for n in args.dims:
        config = _search_config(args, settings, n=n)
        seeds.append(config.seed)
        rep = optimize(config, jobs=args.jobs)
        entries.append({"n": n, "exact_ratio": rep.exact_ratio, "theorem_value": rep.theorem_value})
    outcome = {str(e["n"]): format_rational(e["exact_ratio"]) for e in entries}
    return CommandResult(0, markdown_report(entries), outcome, sorted(set(seeds)))


def cmd_asym(args, settings: Settings) -> CommandResult:
    raw = load_json(args.polygon)
    V = decode_vpolytope(raw)
    if isinstance(raw, dict) and "halfspaces" in raw:
        H = decode_hpolytope(raw)
        res = asymmetry(V, H)
    else:
        V = convex_hull_2d(V.vertices)
        H = polygon_to_h(V)
        res = polygon_asymmetry(V.vertices)
    payload = res.to_dict()
    payload["contacts"] = verify_contact_points(V, H, res)
    payload["body"] = {**encode_vpolytope(V), **encode_hpolytope(H)}
    return CommandResult(0, dumps(payload), {"as": payload["as"]}, inputs=[args.polygon])


def cmd_pentagon(args, settings: Settings) -> CommandResult:
    params = PentagonParams(args.r, args.k)
    K = pentagon(params)
    if args.json:
        payload = dumps({"params": params.to_dict(), "vertices": [encode_vector(v) for v in K.vertices],
                         "conditions": construction_conditions(K, params).to_dict()})
    else:
        payload = "\n".join(" ".join(encode_vector(v)) for v in K.vertices)
    return CommandResult(0, payload, {"vertices": len(K)})


def _body(args):
    if args.body is not None:
        return decode_vpolytope(load_json(args.body)), [args.body]
    return STANDARD_BODIES[args.standard](), []


def cmd_equidist(args, settings: Settings) -> CommandResult:
    params = PentagonParams(args.r, args.k)
    L, inputs = _body(args)
    cert = certify_equidistance(params, L)
    return CommandResult(0, dumps(cert.to_dict()), {"certified": True, **params.to_dict()}, inputs=inputs)


def sweep_jobs(grid: SweepGrid) -> list:
    bodies = []
    for name in grid.bodies:
        if name not in STANDARD_BODIES:
            raise ValueError(f"unknown body {name!r}; expected one of {sorted(STANDARD_BODIES)}")
        bodies.append((name, STANDARD_BODIES[name]()))
    for i in range(grid.random_bodies):
        bodies.append((f"random{grid.seed + i}", random_symmetric_polygon(grid.seed + i)))
    jobs = []
    for r in grid.rs():
        ks = grid.ks() if grid.ks() is not None else grid_ks(r, grid.k_per_r)
        for k in ks:
            params = PentagonParams(r, k, explore=grid.explore)
            jobs.extend((params, name, body) for name, body in bodies)
    return jobs


def cmd_equidist_sweep(args, settings: Settings) -> CommandResult:
    grid = SweepGrid(**load_toml(args.grid))
    rows = run_batch(sweep_job, sweep_jobs(grid), jobs=args.jobs, label="equidist-sweep")
    if args.out:
        export_csv(rows, args.out)
    failed = sum(1 for r in rows if r["verdict"] == "failed")
    errors = sum(1 for r in rows if r["verdict"] == "error")
    if errors:
        log.warning(f"[equidist] {errors} sweep rows raised; see the detail column")
    outcome = {"rows": len(rows), "failed": failed, "errors": errors}
    return CommandResult(1 if failed or errors else 0, csv_text(rows), outcome, [grid.seed], [args.grid])


def cmd_lemma2d(args, settings: Settings) -> CommandResult:
    attempts = args.attempts or settings.sampler_attempts
    if args.find_counterexample:
        P = find_lemma_counterexample(args.r, args.seed, attempts, settings.sampler_denominator, jobs=args.jobs)
        payload = {"r": format_rational(args.r), "seed": args.seed, "attempts": attempts, "found": P is not None}
        if P is not None:
            payload.update(parallelogram=P.to_dict(), corners=corner_classify(P).to_dict())
        code = 1 if P is not None and args.r >= LEMMA_RADIUS else 0
        return CommandResult(code, dumps(payload), {"found": P is not None}, [args.seed])

    jobs = [(args.seed + i, args.r, attempts, settings.sampler_denominator) for i in range(args.trials)]
    rows = run_batch(run_lemma_trial, jobs, jobs=args.jobs, label="lemma2d")
    violations = sum(1 for r in rows if r["verdict"] == "violation")
    code = 1 if violations and args.r >= LEMMA_RADIUS else 0
    outcome = {"trials": len(rows), "violations": violations,
               "exhausted": sum(1 for r in rows if r["verdict"] == "exhausted")}
    return CommandResult(code, csv_text(rows), outcome, [args.seed])


def cmd_claim3d(args, settings: Settings) -> CommandResult:
    M = decode_matrix(load_json(args.matrix))
    rep = claim3d_report(OperatorT.of(M))
    return CommandResult(0 if rep.holds else 1, dumps(rep.to_dict()), {"holds": rep.holds}, inputs=[args.matrix])


# ── parser ────────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=None, help="parallel workers (default BM_JOBS)")
    common.add_argument("--verbose", action="store_true", help="log at INFO to stderr")
    common.add_argument("--no-manifest", action="store_true", help="do not write a run manifest")
    common.add_argument("--manifest-dir", type=Path, default=None)

    parser = argparse.ArgumentParser(prog="bm", description="Exact Banach–Mazur distance toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(handler=fn)
        return p

    p = add("certify", cmd_certify, "certify r·C_n ⊆ T(C_n*) ⊆ C_n")
    p.add_argument("--matrix", type=Path, required=True)
    p.add_argument("--r", type=_rational, required=True)

    p = add("enum-nice", cmd_enum_nice, "write the 192 extremal 3×3 matrices")
    p.add_argument("--out", type=Path, required=True)

    p = add("search", cmd_search, "float search with exact re-certification")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--denominator-bound", type=int, default=None)
    p.add_argument("--config", type=Path, default=None)

    p = add("report", cmd_report, "Markdown table of search results per dimension")
    p.add_argument("--dims", type=_dims, default=[2, 3, 4])
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = add("asym", cmd_asym, "asymmetry constant and Minkowski center")
    p.add_argument("--polygon", type=Path, required=True)

    p = add("pentagon", cmd_pentagon, "vertices of the pentagon K(r, k)")
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--k", type=_rational, required=True)
    p.add_argument("--json", action="store_true")

    p = add("equidist", cmd_equidist, "certify K(r, k) ⊆ L₀ ⊆ K′ for one symmetric body")
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--k", type=_rational, required=True)
    body = p.add_mutually_exclusive_group(required=True)
    body.add_argument("--body", type=Path)
    body.add_argument("--standard", choices=sorted(STANDARD_BODIES))

    p = add("equidist-sweep", cmd_equidist_sweep, "certify a TOML grid of (r, k, body)")
    p.add_argument("--grid", type=Path, required=True)
    p.add_argument("--out", type=Path, default=None)

    p = add("lemma2d", cmd_lemma2d, "corner-square lemma trials")
    p.add_argument("--r", type=_rational, default=LEMMA_RADIUS)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attempts", type=int, default=None)
    p.add_argument("--find-counterexample", action="store_true")

    p = add("claim3d", cmd_claim3d, "vertex localisation of T(C₃*) in the corner cubes")
    p.add_argument("--matrix", type=Path, required=True)
    return parser


# ── dispatch ──────────────────────────────────────────────────────────────────

def _manifest(args, result: CommandResult, settings: Settings) -> None:
    arguments = {k: (str(v) if isinstance(v, (Path, Fraction)) else v)
                 for k, v in vars(args).items() if k != "handler"}
    manifest = RunManifest(
        command=args.command,
        arguments=json.loads(json.dumps(arguments, default=str)),
        seeds=result.seeds,
        input_hashes={str(p): sha256_file(p) for p in result.inputs if p and Path(p).exists()},
        output_hash=sha256_text(result.payload),
        exit_code=result.code,
        outcome=result.outcome,
    )
    path = write_manifest(manifest, args.manifest_dir or settings.output_dir / "manifests")
    log.info(f"[cli] manifest → {path}")


def dispatch(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = get_settings()
    except ValidationError as e:
        print(f"bm: invalid BM_* environment: {e}", file=sys.stderr)
        return 2
    level = logging.INFO if args.verbose else getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s — %(message)s")
    logging.getLogger("bm_distance").setLevel(level)
    if args.jobs is None:
        args.jobs = settings.jobs

    try:
        result = args.handler(args, settings)
    except FAILURE_ERRORS as e:
        result = CommandResult(1, dumps(e.to_dict()), {"error": type(e).__name__})
    except (BMError, ValueError, KeyError, OSError, ValidationError, tomllib.TOMLDecodeError,
            json.JSONDecodeError, ZeroDivisionError) as e:
        print(f"bm {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 2

    if result.payload:
        print(result.payload)
    if not args.no_manifest:
        try:
            _manifest(args, result, settings)
        except OSError as e:
            log.warning(f"[cli] manifest not written: {e}")
    return result.code


if __name__ == "__main__":
    sys.exit(dispatch())
