"""
bm_distance/equidistant.py
─────────────────────────────────────────────────────────────────────────────
Planar pentagons at the same Banach–Mazur distance r from every symmetric
convex body, and the per-body certificate  K ⊆ L₀ ⊆ K′.

Basis: the equilateral triple is replaced by its rational linear image
u1 = (0, 2), u2 = (−3, −1), u3 = (3, −1). Every quantity certified here
(as, d_BM, containments) is invariant under invertible linear maps, so this
keeps the whole pipeline in exact arithmetic.

Pipeline for a symmetric polygon L:
  max-area inscribed triangle (a, b, c) → cyclic relabel so the symmetry
  center of L lies in conv{g, b, c} (g the centroid) → affine T with
  T(a, b, c) = (u1, u2, u3) → L₀ = T(L) → exact K ⊆ L₀ and L₀ ⊆ K′,
  where K′ is K scaled by −r about its Minkowski center ((r−2)/(r+1))·u1.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .asymmetry import AsymmetryResult, asymmetry
from .codec import encode_matrix, encode_vector, encode_vpolytope
from .errors import (
    BMError,
    Degenerate,
    InclusionFailure,
    InvalidParams,
    MultiplePairs,
    NoContainingSubtriangle,
    NoParallelPair,
    NotSymmetric,
    TheoremViolation,
)
from .exact import (
    QMatrix,
    QVector,
    VPolytope,
    convex_hull_2d,
    cross2,
    dot,
    first_violation,
    format_rational,
    homothety,
    is_centrally_symmetric,
    mat_inverse,
    mat_mul,
    mat_vec,
    orient,
    polygon_to_h,
    symmetry_center,
    triangle_area2,
    vadd,
    vec,
    vneg,
    vscale,
    vsub,
)

log = logging.getLogger("bm_distance.equidistant")

R_MIN, R_MAX = Fraction(7, 4), Fraction(2)


# ── parameters ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class UBasis:
    u1: QVector = vec(0, 2)
    u2: QVector = vec(-3, -1)
    u3: QVector = vec(3, -1)

    def __post_init__(self):
        if vadd(vadd(self.u1, self.u2), self.u3) != (0, 0):
            raise InvalidParams("u1 + u2 + u3 must vanish")
        if cross2(self.u1, self.u2) == 0:
            raise InvalidParams("u1, u2 are collinear")

    def triangle(self) -> tuple[QVector, QVector, QVector]:
        return (self.u1, self.u2, self.u3)

    def axis_reflection(self) -> QMatrix:
        """Linear map fixing u1 and swapping u2 ↔ u3."""
        src = QMatrix(2, tuple(zip(self.u1, self.u2)))
        dst = QMatrix(2, tuple(zip(self.u1, self.u3)))
        return mat_mul(dst, mat_inverse(src))


DEFAULT_BASIS = UBasis()


def k_range(r: Fraction) -> tuple[Fraction, Fraction]:
    r = Fraction(r)
    return 1 / (2 * r), 2 - 3 / r


@dataclass(frozen=True)
class PentagonParams:
    r: Fraction
    k: Fraction
    explore: bool = False   # skip the range checks (sweeps below 7/4)

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "k", Fraction(self.k))
        if self.r <= 0:
            raise InvalidParams("r must be positive")
        if self.explore:
            return
        lo, hi = k_range(self.r)
        if not R_MIN <= self.r <= R_MAX:
            raise InvalidParams(f"r = {format_rational(self.r)} outside [7/4, 2]", self.to_dict())
        if not lo <= self.k <= hi:
            raise InvalidParams(
                f"k = {format_rational(self.k)} outside [{format_rational(lo)}, {format_rational(hi)}]",
                self.to_dict(),
            )

    def to_dict(self) -> dict:
        return {"r": format_rational(self.r), "k": format_rational(self.k)}


def grid_ks(r: Fraction, count: int = 3) -> list[Fraction]:
    """`count` evenly spaced valid k, endpoints included; one value when the range is a point."""
    lo, hi = k_range(r)
    if hi < lo:
        return []
    if hi == lo or count <= 1:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


# ── the pentagon ──────────────────────────────────────────────────────────────

def segment_endpoints(params: PentagonParams, basis: UBasis = DEFAULT_BASIS) -> tuple[QVector, QVector]:
    a = (params.r - 3) / params.r + params.k
    left = vadd(vscale(a, basis.u1), vscale(2 * params.k, basis.u2))
    right = vadd(vscale(a, basis.u1), vscale(2 * params.k, basis.u3))
    return left, right


def pentagon(params: PentagonParams, basis: UBasis = DEFAULT_BASIS) -> VPolytope:
    """conv{u1, u2, u3, x, y}, ccw, starting at u1. A triangle when x, y fall on [u2, u3]."""
    x, y = segment_endpoints(params, basis)
    hull = convex_hull_2d([basis.u1, basis.u2, basis.u3, x, y])
    verts = list(hull.vertices)
    start = verts.index(basis.u1) if basis.u1 in verts else 0
    return VPolytope(2, tuple(verts[start:] + verts[:start]))


def minkowski_center_formula(params: PentagonParams, basis: UBasis = DEFAULT_BASIS) -> QVector:
    return vscale((params.r - 2) / (params.r + 1), basis.u1)


def opposite_homothet(params: PentagonParams, basis: UBasis = DEFAULT_BASIS) -> VPolytope:
    """K′: K scaled by −r about its Minkowski center."""
    return homothety(pentagon(params, basis), minkowski_center_formula(params, basis), -params.r)


@dataclass
class ConstructionConditions:
    triangle_inside:       bool
    inside_quadrilateral:  bool
    segment_on_boundary:   bool
    segment_position:      str
    symmetric_about_axis:  bool
    u1_maps_to_minus_2u1:  bool
    parallelogram_in_kprime: bool

    @property
    def all_hold(self) -> bool:
        return all([self.triangle_inside, self.inside_quadrilateral, self.segment_on_boundary,
                    self.symmetric_about_axis, self.u1_maps_to_minus_2u1, self.parallelogram_in_kprime])

    def to_dict(self) -> dict:
        return {**self.__dict__, "all_hold": self.all_hold}


def construction_conditions(
    K: VPolytope,
    params: PentagonParams,
    basis: UBasis = DEFAULT_BASIS,
) -> ConstructionConditions:
    H = polygon_to_h(K)
    S = basis.triangle()
    quad = convex_hull_2d([vneg(basis.u1), *S])
    quad_h = polygon_to_h(quad)

    x, y = segment_endpoints(params, basis)
    on_boundary = any(dot(a, x) == b and dot(a, y) == b for a, b in H.halfspaces)
    touches_quad = any(s == 0 for p in (x, y) for s in quad_h.slacks(p))

    R = basis.axis_reflection()
    verts = set(K.vertices)

    z = minkowski_center_formula(params, basis)
    image_u1 = vadd(z, vscale(-params.r, vsub(basis.u1, z)))
    Kp_h = polygon_to_h(opposite_homothet(params, basis))
    parallelogram = convex_hull_2d([vscale(-2, basis.u1), *S])

    return ConstructionConditions(
        triangle_inside=all(H.contains(u) for u in S),
        inside_quadrilateral=all(quad_h.contains(v) for v in K.vertices),
        segment_on_boundary=on_boundary,
        segment_position="boundary" if touches_quad else "interior",
        symmetric_about_axis=all(mat_vec(R, v) in verts for v in K.vertices),
        u1_maps_to_minus_2u1=image_u1 == vscale(-2, basis.u1),
        parallelogram_in_kprime=first_violation(parallelogram, Kp_h) is None,
    )


def parallel_pair_ratio(P: VPolytope) -> Fraction:
    """
    Squared length ratio |side|² / |diagonal|² of the unique parallel
    (side, diagonal) pair. Affine maps preserve it.
    """
    vs = P.vertices
    m = len(vs)
    sides = [(i, (i + 1) % m) for i in range(m)]
    diagonals = [(i, j) for i, j in itertools.combinations(range(m), 2) if (j - i) % m not in (1, m - 1)]
    found = []
    for (i, j) in sides:
        s = vsub(vs[j], vs[i])
        for (p, q) in diagonals:
            d = vsub(vs[q], vs[p])
            if cross2(s, d) == 0:
                found.append(((i, j), (p, q), s, d))
    if not found:
        raise NoParallelPair(f"no side of this {m}-gon is parallel to a diagonal")
    if len(found) > 1:
        raise MultiplePairs(f"{len(found)} parallel side/diagonal pairs",
                            {"pairs": [[list(f[0]), list(f[1])] for f in found]})
    _, _, s, d = found[0]
    t = s[0] / d[0] if d[0] != 0 else s[1] / d[1]
    return t * t


# ── max-area triangle and normalisation ───────────────────────────────────────

def max_area_triangle(L: VPolytope) -> tuple[QVector, QVector, QVector]:
    """Brute force over vertex triples; ties go to the lexicographically smallest index triple."""
    if len(L.vertices) < 3:
        raise Degenerate("need at least 3 vertices")
    best: Optional[tuple[Fraction, tuple[int, int, int]]] = None
    for idx in itertools.combinations(range(len(L.vertices)), 3):
        area2 = triangle_area2(*(L.vertices[i] for i in idx))
        if best is None or area2 > best[0]:
            best = (area2, idx)
    if best[0] == 0:
        raise Degenerate("all vertices are collinear")
    i, j, k = best[1]
    return L.vertices[i], L.vertices[j], L.vertices[k]


def _in_triangle(p: QVector, a: QVector, b: QVector, c: QVector) -> bool:
    """Closed triangle test by exact orientation signs."""
    d1, d2, d3 = orient(a, b, p), orient(b, c, p), orient(c, a, p)
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


@dataclass(frozen=True)
class AffineMap:
    A: QMatrix
    t: QVector

    def __call__(self, x: QVector) -> QVector:
        return vadd(mat_vec(self.A, x), self.t)

    def to_dict(self) -> dict:
        return {"A": encode_matrix(self.A), "t": encode_vector(self.t)}


def affine_map_to_basis(triangle: Sequence[QVector], basis: UBasis = DEFAULT_BASIS) -> AffineMap:
    a, b, c = triangle
    src = QMatrix(2, tuple(zip(vsub(b, a), vsub(c, a))))
    dst = QMatrix(2, tuple(zip(vsub(basis.u2, basis.u1), vsub(basis.u3, basis.u1))))
    A = mat_mul(dst, mat_inverse(src))
    return AffineMap(A, vsub(basis.u1, mat_vec(A, a)))


def normalize_to_basis(
    L: VPolytope,
    triangle: Sequence[QVector],
    basis: UBasis = DEFAULT_BASIS,
) -> tuple[VPolytope, AffineMap, tuple[QVector, QVector, QVector]]:
    """Returns (L₀, T, relabelled triangle)."""
    if not is_centrally_symmetric(L):
        raise NotSymmetric("L is not centrally symmetric")
    s = symmetry_center(L)
    a, b, c = triangle
    g = vscale(Fraction(1, 3), vadd(vadd(a, b), c))
    for labels in ((a, b, c), (b, c, a), (c, a, b)):
        if _in_triangle(s, g, labels[1], labels[2]):
            T = affine_map_to_basis(labels, basis)
            L0 = convex_hull_2d([T(v) for v in L.vertices])
            return L0, T, labels
    raise NoContainingSubtriangle("symmetry center lies in none of the three subtriangles",
                                  {"center": encode_vector(s)})


# ── certificate ───────────────────────────────────────────────────────────────

@lru_cache(maxsize=256)
def pentagon_asymmetry(params: PentagonParams, basis: UBasis = DEFAULT_BASIS) -> AsymmetryResult:
    K = pentagon(params, basis)
    return asymmetry(K, polygon_to_h(K))


@dataclass
class EquidistanceCertificate:
    params:   PentagonParams
    L_input:  VPolytope
    triangle: tuple[QVector, QVector, QVector]
    map:      AffineMap
    L0:       VPolytope
    K:        VPolytope
    K_prime:  VPolytope
    as_check: AsymmetryResult
    inclusions: dict[str, bool] = field(default_factory=dict)

    @property
    def ratio(self) -> Fraction:
        return self.params.r

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "L_input": encode_vpolytope(self.L_input),
            "triangle": [encode_vector(v) for v in self.triangle],
            "map": self.map.to_dict(),
            "L0": encode_vpolytope(self.L0),
            "K": encode_vpolytope(self.K),
            "K_prime": encode_vpolytope(self.K_prime),
            "inclusions": self.inclusions,
            "as_check": self.as_check.to_dict(),
            "ratio": format_rational(self.ratio),
        }


def certify_equidistance(
    params: PentagonParams,
    L: VPolytope,
    basis: UBasis = DEFAULT_BASIS,
) -> EquidistanceCertificate:
    K = pentagon(params, basis)
    K_prime = opposite_homothet(params, basis)
    L_hull = convex_hull_2d(L.vertices)

    tri = max_area_triangle(L_hull)
    L0, T, labels = normalize_to_basis(L_hull, tri, basis)

    bad = first_violation(K, polygon_to_h(L0))
    if bad is not None:
        raise InclusionFailure("K ⊄ L₀", {"inclusion": "K in L0", "point": encode_vector(K.vertices[bad[0]]),
                                         "edge_index": bad[1], **params.to_dict()})
    bad = first_violation(L0, polygon_to_h(K_prime))
    if bad is not None:
        raise InclusionFailure("L₀ ⊄ K′", {"inclusion": "L0 in K'", "point": encode_vector(L0.vertices[bad[0]]),
                                          "edge_index": bad[1], **params.to_dict()})

    as_check = pentagon_asymmetry(params, basis)
    if as_check.as_value != params.r or as_check.center != minkowski_center_formula(params, basis):
        raise TheoremViolation("asymmetry of K differs from r or its center from the closed form",
                               {**params.to_dict(), "as": format_rational(as_check.as_value)})

    log.info(f"[equidist] r={format_rational(params.r)} k={format_rational(params.k)} |L|={len(L_hull)} certified")
    return EquidistanceCertificate(params, L_hull, labels, T, L0, K, K_prime, as_check,
                                   {"K in L0": True, "L0 in K'": True})


# ── symmetric test bodies ─────────────────────────────────────────────────────

def square() -> VPolytope:
    return convex_hull_2d([(1, 1), (-1, 1), (-1, -1), (1, -1)])


def hexagon() -> VPolytope:
    """Affinely regular hexagon with rational vertices."""
    return convex_hull_2d([(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)])


def octagon() -> VPolytope:
    pts = [(3, 1), (1, 3), (-1, 3), (-3, 1)]
    return convex_hull_2d(pts + [(-x, -y) for x, y in pts])


STANDARD_BODIES = {"square": square, "hexagon": hexagon, "octagon": octagon}


def random_symmetric_polygon(seed: int, points: int = 4, denominator: int = 100) -> VPolytope:
    """Hull of ±p_i for random rational p_i in [−1, 1]²; redraws degenerate picks."""
    rng = random.Random(seed)
    while True:
        ps = [(Fraction(rng.randint(-denominator, denominator), denominator),
               Fraction(rng.randint(-denominator, denominator), denominator)) for _ in range(points)]
        try:
            return convex_hull_2d(ps + [vneg(p) for p in ps])
        except Degenerate:
            continue


def sweep_job(job: tuple[PentagonParams, str, VPolytope]) -> dict:
    """One CSV row of an equidistance sweep."""
    params, name, body = job
    row = {"r": format_rational(params.r), "k": format_rational(params.k), "body": name}
    try:
        cert = certify_equidistance(params, body)
        return {**row, "verdict": "certified", "as": format_rational(cert.as_check.as_value), "detail": ""}
    except (InclusionFailure, TheoremViolation) as e:
        return {**row, "verdict": "failed", "as": e.witness.get("as", ""), "detail": str(e)}
    except BMError as e:
        return {**row, "verdict": "error", "as": "", "detail": f"{type(e).__name__}: {e}"}
