"""
bm_distance/asymmetry.py
─────────────────────────────────────────────────────────────────────────────
Asymmetry constant and Minkowski center by one exact LP.

as(K) is the least r with K − z ⊆ −r(K − z) for some z. Writing λ = 1/r and
w = (1 + λ)z turns "z − λ(v_j − z) ∈ K for every vertex v_j" into

    maximise λ   s.t.   ⟨a_i, w⟩ − λ⟨a_i, v_j⟩ ≤ b_i   for all facets i, vertices j
                        λ ≥ 0

so as = 1/λ* and z = w*/(1 + λ*).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .codec import encode_vector
from .errors import DegenerateBody, InconsistentRepresentations
from .exact import (
    HPolytope,
    QMatrix,
    QVector,
    VPolytope,
    affine_image,
    affine_rank,
    convex_hull_2d,
    dot,
    first_violation,
    format_rational,
    mat_vec,
    polygon_to_h,
    vadd,
    vscale,
    vsub,
)
from .lp import lp_max, lp_min

log = logging.getLogger("bm_distance.asymmetry")


@dataclass(frozen=True)
class AsymmetryResult:
    as_value:      Fraction
    center:        QVector
    lam:           Fraction
    tight_pairs:   tuple[tuple[int, int], ...]
    center_unique: Optional[bool] = None
    vertices:      tuple[QVector, ...] = field(default_factory=tuple)

    @property
    def is_symmetric(self) -> bool:
        return self.as_value == 1

    @property
    def contact_vertices(self) -> tuple[int, ...]:
        return tuple(sorted({j for j, _ in self.tight_pairs}))

    def to_dict(self) -> dict:
        return {
            "as": format_rational(self.as_value),
            "lambda": format_rational(self.lam),
            "center": encode_vector(self.center),
            "center_unique": self.center_unique,
            "contacts": len(self.contact_vertices),
            "tight_pairs": [list(p) for p in self.tight_pairs],
        }


# ── representation checks ─────────────────────────────────────────────────────

def _check_bounded(H: HPolytope) -> None:
    for i in range(H.n):
        e = [Fraction(int(j == i)) for j in range(H.n)]
        for direction in (e, [-x for x in e]):
            res = lp_max(direction, H)
            if not res.is_optimal:
                raise InconsistentRepresentations(f"H-representation is {res.status}", {"axis": i})


def cross_validate(K_v: VPolytope, K_h: HPolytope) -> None:
    """
    V and H must describe the same full-dimensional bounded polytope: V ⊆ H,
    every halfspace is a facet of conv V and every point of V is a vertex of H.
    In the plane the facet count must also equal the hull's edge count.
    """
    n = K_v.n
    if K_h.n != n:
        raise InconsistentRepresentations(f"V is {n}-dimensional, H is {K_h.n}-dimensional")
    if affine_rank(list(K_v.vertices)) < n:
        raise DegenerateBody(f"vertices span an affine subspace of dimension < {n}")
    bad = first_violation(K_v, K_h)
    if bad is not None:
        raise InconsistentRepresentations("a vertex violates a halfspace",
                                          {"vertex_index": bad[0], "halfspace_index": bad[1]})
    for hi, (a, b) in enumerate(K_h.halfspaces):
        touching = [v for v in K_v.vertices if dot(a, v) == b]
        if affine_rank(touching) != n - 1:
            raise InconsistentRepresentations("halfspace is not facet-defining for conv V",
                                              {"halfspace_index": hi})
    for vi, v in enumerate(K_v.vertices):
        normals = [a for a, b in K_h.halfspaces if dot(a, v) == b]
        if affine_rank([tuple(Fraction(0) for _ in range(n))] + normals) < n:
            raise InconsistentRepresentations("point of V is not a vertex of H", {"vertex_index": vi})
    if n == 2 and len(convex_hull_2d(K_v.vertices)) != len(K_h):
        raise InconsistentRepresentations("facet count differs from the hull's edge count")
    _check_bounded(K_h)


# ── the LP ────────────────────────────────────────────────────────────────────

def _constraints(K_v: VPolytope, K_h: HPolytope, lam: Optional[Fraction] = None):
    """Rows over (w, λ); with `lam` fixed the rows are over w only."""
    rows = []
    for v in K_v.vertices:
        for a, b in K_h.halfspaces:
            av = dot(a, v)
            if lam is None:
                rows.append((tuple(a) + (-av,), b))
            else:
                rows.append((tuple(a), b + lam * av))
    if lam is None:
        rows.append((tuple(Fraction(0) for _ in range(K_v.n)) + (Fraction(-1),), Fraction(0)))
    return rows


def reflected_copy_fits(K_v: VPolytope, K_h: HPolytope, lam: Fraction) -> bool:
    """Is there a z with z − λ(v − z) ∈ K for every vertex v?"""
    res = lp_max([Fraction(0)] * K_v.n, _constraints(K_v, K_h, Fraction(lam)))
    return res.is_optimal


def _tight_pairs(K_v: VPolytope, K_h: HPolytope, w: QVector, lam: Fraction) -> tuple[tuple[int, int], ...]:
    out = []
    for j, v in enumerate(K_v.vertices):
        for i, (a, b) in enumerate(K_h.halfspaces):
            if dot(a, w) - lam * dot(a, v) == b:
                out.append((j, i))
    return tuple(out)


def _center_unique(K_v: VPolytope, K_h: HPolytope, lam: Fraction) -> bool:
    rows = _constraints(K_v, K_h, lam)
    for k in range(K_v.n):
        e = [Fraction(int(j == k)) for j in range(K_v.n)]
        hi, lo = lp_max(e, rows), lp_min(e, rows)
        if not (hi.is_optimal and lo.is_optimal) or hi.objective != lo.objective:
            return False
    return True


def asymmetry(K_v: VPolytope, K_h: HPolytope, validate: bool = True) -> AsymmetryResult:
    if validate:
        cross_validate(K_v, K_h)
    n = K_v.n
    objective = [Fraction(0)] * n + [Fraction(1)]
    res = lp_max(objective, _constraints(K_v, K_h))
    if not res.is_optimal or res.objective <= 0:
        raise DegenerateBody(f"asymmetry LP is {res.status}")

    lam = res.objective
    w = tuple(res.witness[:n])
    z = vscale(1 / (1 + lam), w)
    as_value = 1 / lam

    # z − (v − z)/as ∈ K for every vertex, checked once more on the final numbers.
    for j, v in enumerate(K_v.vertices):
        if not K_h.contains(vsub(z, vscale(lam, vsub(v, z)))):
            raise InconsistentRepresentations("reflected copy escapes K at the LP optimum", {"vertex_index": j})

    unique = _center_unique(K_v, K_h, lam)
    if not unique:
        log.info(f"[asym] Minkowski center is not unique (n={n})")
    result = AsymmetryResult(as_value, z, lam, _tight_pairs(K_v, K_h, w, lam), unique, K_v.vertices)
    log.info(f"[asym] as={format_rational(as_value)} center={encode_vector(z)}")
    return result


def polygon_asymmetry(points: Sequence[QVector]) -> AsymmetryResult:
    """Planar convenience: hull the points, derive H from edges, solve."""
    V = convex_hull_2d(points)
    return asymmetry(V, polygon_to_h(V))


def center_is_unique(K_v: VPolytope, K_h: HPolytope, result: AsymmetryResult) -> bool:
    """Each coordinate of w has max = min over the optimal face."""
    return _center_unique(K_v, K_h, result.lam)


def verify_contact_points(K_v: VPolytope, K_h: HPolytope, result: AsymmetryResult) -> int:
    """Vertices of the reflected copy z − λ(K − z) lying on ∂K."""
    count = 0
    for v in K_v.vertices:
        p = vsub(result.center, vscale(result.lam, vsub(v, result.center)))
        if any(s == 0 for s in K_h.slacks(p)):
            count += 1
    return count


def asymmetry_affine_invariance_check(
    K_v: VPolytope,
    K_h: HPolytope,
    A: QMatrix,
    t: Sequence[Fraction],
) -> bool:
    before = asymmetry(K_v, K_h)
    img_v, img_h = affine_image(K_v, K_h, A, t)
    after = asymmetry(img_v, img_h)
    if after.as_value != before.as_value:
        return False
    if before.center_unique and after.center_unique:
        return vadd(mat_vec(A, before.center), tuple(Fraction(x) for x in t)) == after.center
    return True


def sandwich_lower_bound_holds(K_v: VPolytope, K_h: HPolytope, ratio: Fraction) -> bool:
    """Any sandwich ratio against a symmetric body is at least as(K)."""
    return Fraction(ratio) >= asymmetry(K_v, K_h).as_value
