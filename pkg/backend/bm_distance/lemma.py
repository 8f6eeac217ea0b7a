"""
bm_distance/lemma.py
─────────────────────────────────────────────────────────────────────────────
Corner-square lemma in the plane and vertex localisation in 3D.

  2D: if (5/9)·C₂ ⊆ P ⊆ C₂ for a 0-symmetric parallelogram P, then each
      closed corner square W_(ε₁,ε₂) = {1/3 ≤ ε₁x, ε₂y ≤ 1} holds exactly one
      vertex of P. 5/9 is sharp.
  3D: under a 5/9 sandwich every vertex of T(C₃*) sits in one of the eight
      cubes V_ε = {1/3 ≤ ε_i x_i ≤ 1}, at most one per cube.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .certify import (
    NICE_INNER_RADIUS,
    OperatorLike,
    as_operator,
    canonical_key,
    certify_sandwich,
    inner_radius,
    ratio,
)
from .codec import encode_matrix, encode_vector
from .errors import CertificationFailure, Degenerate, DimensionMismatch, PreconditionViolated, SamplingExhausted
from .exact import (
    HPolytope,
    QMatrix,
    QVector,
    VPolytope,
    cross2,
    format_rational,
    norm_1,
    norm_inf,
    operator_image_vrep,
    polygon_to_h,
    vadd,
    vneg,
    vsub,
)
from .runner import run_batch

log = logging.getLogger("bm_distance.lemma")

THIRD = Fraction(1, 3)
LEMMA_RADIUS = Fraction(5, 9)
COUNTEREXAMPLE_CHUNK = 50_000
CORNERS_2D: tuple[tuple[int, int], ...] = tuple(itertools.product((1, -1), repeat=2))
CORNERS_3D: tuple[tuple[int, ...], ...] = tuple(itertools.product((1, -1), repeat=3))


# ── parallelograms ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Parallelogram2D:
    p: QVector
    q: QVector

    def __post_init__(self):
        if len(self.p) != 2 or len(self.q) != 2:
            raise DimensionMismatch("parallelogram vertices must be planar")
        if cross2(self.p, self.q) == 0:
            raise Degenerate("p and q are linearly dependent")

    def vertices(self) -> tuple[QVector, ...]:
        """±p, ±q in counterclockwise order starting at p."""
        if cross2(self.p, self.q) > 0:
            return (self.p, self.q, vneg(self.p), vneg(self.q))
        return (self.p, vneg(self.q), vneg(self.p), self.q)

    def to_vpolytope(self) -> VPolytope:
        return VPolytope(2, self.vertices())

    def to_dict(self) -> dict:
        return {"p": encode_vector(self.p), "q": encode_vector(self.q)}


def parallelogram_hrep(P: Parallelogram2D) -> HPolytope:
    return polygon_to_h(P.to_vpolytope())


def check_square_sandwich(P: Parallelogram2D, r: Fraction) -> bool:
    """
    r·C₂ ⊆ conv{±p, ±q} ⊆ C₂, both checked exactly.

    The edges of P run along q − p and q + p and sit at |p × q| from the
    origin in the matching normal; the corners (±r, ±r) reach r·‖e‖₁ there.
    """
    r = Fraction(r)
    if not 0 < r <= 1:
        raise ValueError(f"r must lie in (0, 1], got {format_rational(r)}")
    if norm_inf(P.p) > 1 or norm_inf(P.q) > 1:
        return False
    offset = abs(cross2(P.p, P.q))
    return all(r * norm_1(e) <= offset for e in (vsub(P.q, P.p), vadd(P.q, P.p)))


# ── corner classification ─────────────────────────────────────────────────────

@dataclass
class CornerCount:
    counts:  dict[tuple[int, int], int] = field(default_factory=dict)
    outside: int = 0

    @property
    def all_ones(self) -> bool:
        return self.outside == 0 and all(self.counts.get(c, 0) == 1 for c in CORNERS_2D)

    def to_dict(self) -> dict:
        return {
            "counts": {f"{e1:+d},{e2:+d}": self.counts.get((e1, e2), 0) for e1, e2 in CORNERS_2D},
            "outside": self.outside,
        }


def in_corner_box(x: QVector, signs: tuple[int, ...]) -> bool:
    """Closed box {1/3 ≤ ε_i x_i ≤ 1}."""
    return all(THIRD <= s * xi <= 1 for s, xi in zip(signs, x))


def corner_classify(P: Parallelogram2D) -> CornerCount:
    result = CornerCount({c: 0 for c in CORNERS_2D})
    for v in P.vertices():
        home = next((c for c in CORNERS_2D if in_corner_box(v, c)), None)
        if home is None:
            result.outside += 1
        else:
            result.counts[home] += 1
    return result


# ── samplers ──────────────────────────────────────────────────────────────────

def _rat(rng: random.Random, lo: Fraction, hi: Fraction, denominator: int) -> Fraction:
    """Uniform on the grid (1/denominator)·ℤ ∩ [lo, hi]; lo/hi are rounded inward."""
    a = -((-lo.numerator * denominator) // lo.denominator)
    b = (hi.numerator * denominator) // hi.denominator
    return Fraction(rng.randint(a, b), denominator)


def _band_point(rng: random.Random, r: Fraction, denominator: int) -> QVector:
    """A rational point with ‖x‖_∞ ∈ [r, 1]."""
    big = _rat(rng, r, Fraction(1), denominator) * rng.choice((1, -1))
    small = _rat(rng, -abs(big), abs(big), denominator)
    return (big, small) if rng.random() < 0.5 else (small, big)


def _try_parallelogram(p: QVector, q: QVector) -> Optional[Parallelogram2D]:
    if cross2(p, q) == 0:
        return None
    return Parallelogram2D(p, q)


def sample_valid_parallelogram(
    seed: int,
    r: Fraction,
    attempts: int = 100_000,
    denominator: int = 10_000,
) -> Parallelogram2D:
    """Rejection sampling from the band; deterministic for a given seed."""
    r = Fraction(r)
    if not 0 < r < 1:
        raise ValueError(f"r must lie in (0, 1), got {format_rational(r)}")
    rng = random.Random(seed)
    for attempt in range(attempts):
        P = _try_parallelogram(_band_point(rng, r, denominator), _band_point(rng, r, denominator))
        if P is not None and check_square_sandwich(P, r):
            log.debug(f"[lemma2d] seed={seed} accepted after {attempt + 1} draws")
            return P
    raise SamplingExhausted(
        f"no valid parallelogram for r = {format_rational(r)} in {attempts} draws",
        {"seed": seed, "r": format_rational(r), "attempts": attempts},
    )


def _rotated_square_proposal(rng: random.Random, denominator: int) -> tuple[QVector, QVector]:
    # p on ∂C₂, q = p turned by 90°, sometimes nudged off the exact square.
    t = _rat(rng, Fraction(-1), Fraction(1), denominator)
    p: QVector = (Fraction(1), t)
    for _ in range(rng.randrange(4)):
        p = (-p[1], p[0])
    q: QVector = (-p[1], p[0])
    if rng.random() < 0.5:
        jitter = Fraction(1, 100)
        q = tuple(max(Fraction(-1), min(Fraction(1), x + _rat(rng, -jitter, jitter, denominator))) for x in q)
    return p, q


def _counterexample_chunk(job: tuple[Fraction, str, int, int]) -> Optional[tuple[int, Parallelogram2D]]:
    """First violating parallelogram in one seeded chunk, with its draw index."""
    r, chunk_seed, attempts, denominator = job
    rng = random.Random(chunk_seed)
    for attempt in range(attempts):
        if attempt % 2:
            p, q = _band_point(rng, r, denominator), _band_point(rng, r, denominator)
        else:
            p, q = _rotated_square_proposal(rng, denominator)
        P = _try_parallelogram(p, q)
        if P is None or not check_square_sandwich(P, r):
            continue
        if not corner_classify(P).all_ones:
            return attempt, P
    return None


def find_lemma_counterexample(
    r: Fraction,
    seed: int,
    attempts: int = 100_000,
    denominator: int = 10_000,
    jobs: int = 1,
    chunk: int = COUNTEREXAMPLE_CHUNK,
) -> Optional[Parallelogram2D]:
    """
    Look for r·C₂ ⊆ P ⊆ C₂ whose corner classification is not all-ones.
    Returns None when the attempt cap is reached. Never succeeds for r ≥ 5/9.

    The attempts are cut into chunks seeded "<seed>:<i>" and run `jobs` at a
    time; the earliest chunk with a hit wins, so the answer does not depend
    on `jobs`.
    """
    r = Fraction(r)
    if not 0 < r < 1:
        raise ValueError(f"r must lie in (0, 1), got {format_rational(r)}")
    chunks = [(r, f"{seed}:{i}", min(chunk, attempts - start), denominator)
              for i, start in enumerate(range(0, attempts, chunk))]
    wave = max(1, jobs)
    for first in range(0, len(chunks), wave):
        hits = run_batch(_counterexample_chunk, chunks[first:first + wave], jobs=jobs, label="lemma2d")
        for i, hit in enumerate(hits):
            if hit is not None:
                draw = (first + i) * chunk + hit[0] + 1
                log.info(f"[lemma2d] counterexample for r={format_rational(r)} after {draw} draws")
                return hit[1]
    log.info(f"[lemma2d] no counterexample for r={format_rational(r)} in {attempts} draws")
    return None


def run_lemma_trial(job: tuple[int, Fraction, int, int]) -> dict:
    """One CSV row: sample with `seed`, classify, report the verdict."""
    seed, r, attempts, denominator = job
    try:
        P = sample_valid_parallelogram(seed, r, attempts, denominator)
    except SamplingExhausted:
        return {"seed": seed, "verdict": "exhausted", "p": "", "q": "",
                **{f"W{e1:+d}{e2:+d}": "" for e1, e2 in CORNERS_2D}, "outside": ""}
    cc = corner_classify(P)
    return {
        "seed": seed,
        "verdict": "one-per-corner" if cc.all_ones else "violation",
        "p": " ".join(encode_vector(P.p)),
        "q": " ".join(encode_vector(P.q)),
        **{f"W{e1:+d}{e2:+d}": cc.counts[(e1, e2)] for e1, e2 in CORNERS_2D},
        "outside": cc.outside,
    }


# ── 3D vertex localisation ────────────────────────────────────────────────────

@dataclass
class Claim3DReport:
    holds:          bool
    occupied_cubes: int
    counts:         dict[tuple[int, ...], int]
    outside:        int

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "occupied_cubes": self.occupied_cubes,
            "counts": {",".join(f"{s:+d}" for s in c): self.counts[c] for c in CORNERS_3D},
            "outside": self.outside,
        }


def claim3d_report(T: OperatorLike) -> Claim3DReport:
    op = as_operator(T)
    if op.n != 3:
        raise DimensionMismatch("claim3d_check is defined for n = 3")
    try:
        certify_sandwich(op, NICE_INNER_RADIUS)
    except CertificationFailure as e:
        raise PreconditionViolated("operator does not certify at r = 5/9", e.witness) from e

    counts = {c: 0 for c in CORNERS_3D}
    outside = 0
    for v in operator_image_vrep(op.T).vertices:
        home = next((c for c in CORNERS_3D if in_corner_box(v, c)), None)
        if home is None:
            outside += 1
        else:
            counts[home] += 1
    holds = outside == 0 and max(counts.values()) <= 1
    occupied = sum(1 for c in counts.values() if c)
    log.info(f"[claim3d] holds={holds} occupied={occupied}/8")
    return Claim3DReport(holds, occupied, counts, outside)


def claim3d_check(T: OperatorLike) -> bool:
    return claim3d_report(T).holds


def nice_member_record(M: QMatrix) -> dict:
    """Certificate plus corner-cube occupancy for one member of the 3D family."""
    op = as_operator(M)
    try:
        cert = certify_sandwich(op, NICE_INNER_RADIUS)
    except CertificationFailure:
        return {"matrix": encode_matrix(M), "key": canonical_key(M), "certified": False,
                "r_inner": format_rational(inner_radius(op)), "ratio": format_rational(ratio(op)),
                "claim3d": {"holds": False, "occupied_cubes": 0}}
    return {
        "matrix": encode_matrix(M),
        "key": canonical_key(M),
        "certified": True,
        "r_inner": format_rational(cert.r_inner),
        "ratio": format_rational(cert.ratio),
        "claim3d": claim3d_report(op).to_dict(),
    }
