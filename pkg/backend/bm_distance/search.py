"""
bm_distance/search.py
─────────────────────────────────────────────────────────────────────────────
Float search for operators with a small cube / cross-polytope sandwich ratio,
followed by exact re-certification.

Per restart: random start in [−1, 1]^{n²}, Nelder–Mead on the column-
normalised objective max_v ‖T⁻¹v‖₁, re-run from its own optimum until it stops
improving. The best restarts are rationalised along a ladder of denominator
bounds and every rational candidate is certified exactly. No exact ratio may
fall below the known optimum for its dimension.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .certify import (
    as_operator,
    canonical_key,
    enumerate_nice_octahedra,
    is_nice,
    normalize_columns,
    ratio,
)
from .codec import encode_matrix
from .errors import CertificationRegression, DimensionMismatch, SingularMatrix, TheoremViolation, ZeroColumn
from .exact import QMatrix, format_rational
from .runner import run_batch
from .schemas import SearchConfig

log = logging.getLogger("bm_distance.search")

# Known optima of d_BM(C_n, C_n*).
THEOREM_BOUNDS: dict[int, Fraction] = {2: Fraction(1), 3: Fraction(9, 5), 4: Fraction(2)}
SNAP_RADIUS = 0.05
_POLISH_ROUNDS = 3


# ── float objective ───────────────────────────────────────────────────────────

def _sign_matrix(n: int) -> np.ndarray:
    return np.array(list(itertools.product((-1.0, 1.0), repeat=n)))


def float_ratio(T: np.ndarray, det_guard: float = 1e-9) -> float:
    """max_i ‖T e_i‖_∞ · max_v ‖T⁻¹v‖₁, or +inf when |det T| is below the guard."""
    T = np.asarray(T, dtype=float)
    if abs(np.linalg.det(T)) < det_guard:
        return math.inf
    Tinv = np.linalg.inv(T)
    outer = np.abs(T).max(axis=0).max()
    inner = np.abs(_sign_matrix(T.shape[0]) @ Tinv.T).sum(axis=1).max()
    return float(outer * inner)


def normalize_columns_float(T: np.ndarray) -> Optional[np.ndarray]:
    norms = np.abs(T).max(axis=0)
    if np.any(norms == 0):
        return None
    return T / norms


def _objective(x: np.ndarray, n: int, det_guard: float) -> float:
    T = normalize_columns_float(x.reshape(n, n))
    if T is None:
        return math.inf
    return float_ratio(T, det_guard)


# ── one restart ───────────────────────────────────────────────────────────────

@dataclass
class RestartTrace:
    index:       int
    float_ratio: float
    evaluations: int
    matrix:      list[list[float]] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {"index": self.index, "float_ratio": self.float_ratio, "evaluations": self.evaluations}


def run_restart(job: tuple[int, np.random.SeedSequence, int, int, float]) -> RestartTrace:
    index, seq, n, max_iters, det_guard = job
    rng = np.random.default_rng(seq)
    x = rng.uniform(-1.0, 1.0, n * n)
    while _objective(x, n, det_guard) == math.inf:
        x = rng.uniform(-1.0, 1.0, n * n)

    options = {"maxiter": max_iters, "xatol": 1e-9, "fatol": 1e-12, "adaptive": True}
    res = minimize(_objective, x, args=(n, det_guard), method="Nelder-Mead", options=options)
    x, best, evals = res.x, float(res.fun), res.nfev
    # Restarting the simplex at its own optimum shakes it out of stalls.
    for _ in range(_POLISH_ROUNDS):
        res = minimize(_objective, x, args=(n, det_guard), method="Nelder-Mead", options=options)
        evals += res.nfev
        if res.fun >= best - 1e-12:
            break
        x, best = res.x, float(res.fun)
    T = normalize_columns_float(x.reshape(n, n))
    return RestartTrace(index, best, evals, T.tolist())


# ── rationalisation ───────────────────────────────────────────────────────────

def ladder(bound: int) -> list[int]:
    """10, 100, ... up to `bound`, with `bound` itself last."""
    steps, b = [], 10
    while b < bound:
        steps.append(b)
        b *= 10
    return steps + [bound]


def rationalize(T_float: np.ndarray, bound: int) -> QMatrix:
    """Continued-fraction rounding of every entry of the column-normalised matrix."""
    T = normalize_columns_float(np.asarray(T_float, dtype=float))
    if T is None:
        raise ZeroColumn("float matrix has a zero column")
    return QMatrix.from_rows([[Fraction(float(x)).limit_denominator(bound) for x in row] for row in T])


def snap_to_nice(T_float: np.ndarray) -> Optional[QMatrix]:
    """Nearest member of the 192-family in entrywise max-distance, if within 0.05."""
    T = np.asarray(T_float, dtype=float)
    if T.shape != (3, 3):
        raise DimensionMismatch("snap_to_nice is defined for 3×3 matrices")
    T = normalize_columns_float(T)
    if T is None:
        return None
    best, best_d = None, math.inf
    for M in enumerate_nice_octahedra():
        d = float(np.abs(T - np.array(M.to_float_rows())).max())
        if d < best_d:
            best, best_d = M, d
    if best_d <= SNAP_RADIUS:
        return best
    log.info(f"[search] no nice matrix within {SNAP_RADIUS} (nearest at {best_d:.4f})")
    return None


@dataclass
class Candidate:
    label:       str
    matrix:      QMatrix
    exact_ratio: Fraction
    float_ratio: float
    restart:     int

    def sort_key(self, order: int) -> tuple:
        return (self.exact_ratio, self.float_ratio, order, canonical_key(self.matrix))


def _check_theorem(n: int, value: Fraction, M: QMatrix) -> None:
    bound = THEOREM_BOUNDS.get(n)
    if bound is not None and value < bound:
        raise TheoremViolation(
            f"exact ratio {format_rational(value)} beats the optimum {format_rational(bound)} for n={n}",
            {"matrix": encode_matrix(M), "ratio": format_rational(value)},
        )


def certify_restart(job: tuple[RestartTrace, int, int]) -> list[Candidate]:
    """All exact candidates derived from one float optimum."""
    trace, n, bound = job
    T = np.array(trace.matrix)
    out: list[Candidate] = []
    pool: list[tuple[str, QMatrix]] = []
    if n == 3:
        snapped = snap_to_nice(T)
        if snapped is not None:
            pool.append(("snap", snapped))
    for b in ladder(bound):
        try:
            pool.append((f"cf{b}", normalize_columns(rationalize(T, b)).T))
        except (SingularMatrix, ZeroColumn):
            continue
    for label, M in pool:
        try:
            value = ratio(M)
        except SingularMatrix:
            continue
        _check_theorem(n, value, M)
        out.append(Candidate(label, M, value, trace.float_ratio, trace.index))
    return out


# ── driver ────────────────────────────────────────────────────────────────────

@dataclass
class SearchReport:
    config:           SearchConfig
    best_float_ratio: float
    best_matrix:      QMatrix
    exact_ratio:      Fraction
    winner:           str
    winner_restart:   int
    nice:             Optional[bool]
    trace:            list[RestartTrace]

    @property
    def theorem_value(self) -> Optional[Fraction]:
        return THEOREM_BOUNDS.get(self.config.n)

    @property
    def conjecture_constant(self) -> float:
        return math.sqrt(self.config.n / 2)

    def to_dict(self) -> dict:
        tv = self.theorem_value
        return {
            "n": self.config.n,
            "seed": self.config.seed,
            "restarts": self.config.restarts,
            "best_float_ratio": self.best_float_ratio,
            "exact_ratio": format_rational(self.exact_ratio),
            "matrix": encode_matrix(self.best_matrix),
            "winner": self.winner,
            "winner_restart": self.winner_restart,
            "nice": self.nice,
            "theorem_value": format_rational(tv) if tv is not None else None,
            "conjecture_constant": self.conjecture_constant,
            "trace": [t.to_dict() for t in self.trace],
        }


def optimize(config: SearchConfig, jobs: int = 1) -> SearchReport:
    n = config.n
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    restart_jobs = [(i, s, n, config.max_iters, config.det_guard) for i, s in enumerate(children)]
    trace = run_batch(run_restart, restart_jobs, jobs=jobs, label="search")

    finite = [t for t in trace if math.isfinite(t.float_ratio)]
    if not finite:
        raise SingularMatrix("every restart ended on a singular matrix")
    # (float ratio, matrix entries) is a total order, so the shortlist is reproducible.
    ranked = sorted(finite, key=lambda t: (t.float_ratio, t.matrix))
    shortlist = ranked[: config.certify_top]
    log.info(f"[search] n={n} best float ratio {ranked[0].float_ratio:.12f} over {len(trace)} restarts")

    batches = run_batch(certify_restart, [(t, n, config.denominator_bound) for t in shortlist],
                        jobs=jobs, label="certify")
    candidates = [(order, c) for order, c in enumerate(itertools.chain.from_iterable(batches))]
    if not candidates:
        raise SingularMatrix("no rationalised candidate was invertible")
    order, best = min(candidates, key=lambda oc: oc[1].sort_key(oc[0]))

    best_float = ranked[0].float_ratio
    if float(best.exact_ratio) > best_float * (1 + config.regression_slack):
        raise CertificationRegression(
            f"exact ratio {format_rational(best.exact_ratio)} exceeds float {best_float:.9f} beyond slack",
            {"matrix": encode_matrix(best.matrix), "exact": format_rational(best.exact_ratio),
             "float": best_float},
        )

    nice: Optional[bool] = None
    if n == 3:
        nice = is_nice(as_operator(best.matrix))
        if best.exact_ratio == THEOREM_BOUNDS[3] and not nice:
            raise TheoremViolation("ratio 9/5 attained by an operator outside the nice family",
                                   {"matrix": encode_matrix(best.matrix)})

    log.info(f"[search] n={n} exact {format_rational(best.exact_ratio)} via {best.label} (restart {best.restart})")
    return SearchReport(config, best_float, best.matrix, best.exact_ratio, best.label, best.restart, nice, trace)
