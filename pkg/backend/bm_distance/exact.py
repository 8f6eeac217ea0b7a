"""
bm_distance/exact.py
─────────────────────────────────────────────────────────────────────────────
Exact core: rational scalars, small dense linear algebra, V-/H-polytopes and
the 2D hull/edge-normal routines every other module builds on.

No floats and no tolerances anywhere in this module. Rational is
`fractions.Fraction`, which is always in lowest terms with a positive
denominator.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import Degenerate, DimensionMismatch, NotConvex, SingularMatrix

log = logging.getLogger("bm_distance.exact")

Rational = Fraction
QVector = tuple[Fraction, ...]
Number = Union[int, Fraction, str]

MIN_DIM, MAX_DIM = 2, 8


# ── scalars ───────────────────────────────────────────────────────────────────

def q(x: Number) -> Fraction:
    """Coerce an int, Fraction or "p/q" string. Floats are refused."""
    if isinstance(x, float):
        raise TypeError(f"float {x!r} cannot enter exact arithmetic; use a 'p/q' string")
    return Fraction(x)


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", "-p/q" or an integer literal. Decimal points are rejected."""
    s = text.strip()
    if not s or any(ch in s for ch in ".eE"):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(s)


def format_rational(x: Fraction) -> str:
    """Canonical "p/q" form; integers come out as "p/1"."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ── vectors ───────────────────────────────────────────────────────────────────

def vec(*xs: Number) -> QVector:
    return tuple(q(x) for x in xs)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def vadd(a: QVector, b: QVector) -> QVector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: QVector, b: QVector) -> QVector:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c: Number, a: QVector) -> QVector:
    c = q(c)
    return tuple(c * x for x in a)


def vneg(a: QVector) -> QVector:
    return tuple(-x for x in a)


def norm_inf(a: Sequence[Fraction]) -> Fraction:
    return max((abs(x) for x in a), default=Fraction(0))


def norm_1(a: Sequence[Fraction]) -> Fraction:
    return sum((abs(x) for x in a), Fraction(0))


def sign_vectors(n: int) -> list[QVector]:
    """All of {±1}ⁿ in lexicographic order (−1 before +1)."""
    return [tuple(Fraction(s) for s in signs) for signs in itertools.product((-1, 1), repeat=n)]


# ── matrices ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class QMatrix:
    n: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise DimensionMismatch(f"QMatrix entries are not {self.n}×{self.n}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Number]]) -> "QMatrix":
        grid = tuple(tuple(q(x) for x in row) for row in rows)
        return cls(len(grid), grid)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, values: Sequence[Number]) -> "QMatrix":
        n = len(values)
        return cls(n, tuple(tuple(q(values[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n)))

    def row(self, i: int) -> QVector:
        return self.entries[i]

    def col(self, j: int) -> QVector:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> list[QVector]:
        return [self.col(j) for j in range(self.n)]

    def transpose(self) -> "QMatrix":
        return QMatrix(self.n, tuple(self.columns()))

    def scaled(self, c: Number) -> "QMatrix":
        c = q(c)
        return QMatrix(self.n, tuple(tuple(c * x for x in row) for row in self.entries))

    def to_float_rows(self) -> list[list[float]]:
        return [[float(x) for x in row] for row in self.entries]


def mat_vec(M: QMatrix, v: Sequence[Fraction]) -> QVector:
    if len(v) != M.n:
        raise DimensionMismatch(f"vector of length {len(v)} against {M.n}×{M.n} matrix")
    return tuple(dot(row, v) for row in M.entries)


def mat_mul(A: QMatrix, B: QMatrix) -> QMatrix:
    if A.n != B.n:
        raise DimensionMismatch(f"{A.n}×{A.n} times {B.n}×{B.n}")
    cols = B.columns()
    return QMatrix(A.n, tuple(tuple(dot(row, c) for c in cols) for row in A.entries))


def determinant(M: QMatrix) -> Fraction:
    """Fraction-free Bareiss elimination; every division below is exact."""
    a = [list(row) for row in M.entries]
    n, sign, prev = M.n, 1, Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return Fraction(0)
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def mat_inverse(M: QMatrix) -> QMatrix:
    """Gauss–Jordan on [M | I] with exact pivots; M · M⁻¹ = I holds exactly."""
    n = M.n
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M.entries)]
    for k in range(n):
        pivot = next((i for i in range(k, n) if a[i][k] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular", {"column": k})
        a[k], a[pivot] = a[pivot], a[k]
        inv_p = 1 / a[k][k]
        a[k] = [x * inv_p for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return QMatrix(n, tuple(tuple(row[n:]) for row in a))


# ── polytopes ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class VPolytope:
    n: int
    vertices: tuple[QVector, ...]

    def __post_init__(self):
        if not self.vertices:
            raise Degenerate("VPolytope needs at least one vertex")
        if any(len(v) != self.n for v in self.vertices):
            raise DimensionMismatch(f"vertex of wrong length in {self.n}-dimensional VPolytope")

    @classmethod
    def from_points(cls, points: Iterable[Iterable[Number]]) -> "VPolytope":
        verts = tuple(tuple(q(x) for x in p) for p in points)
        if not verts:
            raise Degenerate("VPolytope needs at least one vertex")
        return cls(len(verts[0]), verts)

    def scaled(self, c: Number) -> "VPolytope":
        return VPolytope(self.n, tuple(vscale(c, v) for v in self.vertices))

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class HPolytope:
    """Intersection of halfspaces ⟨a, x⟩ ≤ b."""
    n: int
    halfspaces: tuple[tuple[QVector, Fraction], ...] = field(default_factory=tuple)

    def __post_init__(self):
        for a, _ in self.halfspaces:
            if len(a) != self.n:
                raise DimensionMismatch(f"normal of wrong length in {self.n}-dimensional HPolytope")
            if all(x == 0 for x in a):
                raise Degenerate("zero normal in HPolytope")

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(dot(a, x) <= b for a, b in self.halfspaces)

    def slacks(self, x: Sequence[Fraction]) -> list[Fraction]:
        return [b - dot(a, x) for a, b in self.halfspaces]

    def __len__(self) -> int:
        return len(self.halfspaces)


def _check_dim(n: int) -> None:
    if not MIN_DIM <= n <= MAX_DIM:
        raise DimensionMismatch(f"dimension {n} outside {MIN_DIM}..{MAX_DIM}")


def cube(n: int) -> tuple[VPolytope, HPolytope]:
    """C_n = {‖x‖_∞ ≤ 1}: vertices {±1}ⁿ, facets ±⟨e_i, x⟩ ≤ 1."""
    _check_dim(n)
    verts = tuple(sign_vectors(n))
    halfspaces = []
    for i in range(n):
        for s in (1, -1):
            a = tuple(Fraction(s if j == i else 0) for j in range(n))
            halfspaces.append((a, Fraction(1)))
    return VPolytope(n, verts), HPolytope(n, tuple(halfspaces))


def cross_polytope(n: int) -> tuple[VPolytope, HPolytope]:
    """C_n* = {‖x‖₁ ≤ 1}: vertices ±e_i, facets ⟨ε, x⟩ ≤ 1."""
    _check_dim(n)
    verts = []
    for i in range(n):
        for s in (1, -1):
            verts.append(tuple(Fraction(s if j == i else 0) for j in range(n)))
    halfspaces = tuple((eps, Fraction(1)) for eps in sign_vectors(n))
    return VPolytope(n, tuple(verts)), HPolytope(n, halfspaces)


def hrep_of_operator_image(T: QMatrix, Tinv: Optional[QMatrix] = None) -> HPolytope:
    """H-rep of T(C_n*): the 2ⁿ halfspaces ⟨(T⁻¹)ᵀε, x⟩ ≤ 1, unreduced."""
    if Tinv is None:
        Tinv = mat_inverse(T)
    TinvT = Tinv.transpose()
    return HPolytope(Tinv.n, tuple((mat_vec(TinvT, eps), Fraction(1)) for eps in sign_vectors(Tinv.n)))


def operator_image_vrep(T: QMatrix) -> VPolytope:
    """Vertices ±T e_i of T(C_n*), in the order T e_1, −T e_1, T e_2, ..."""
    verts = []
    for c in T.columns():
        verts.extend([c, vneg(c)])
    return VPolytope(T.n, tuple(verts))


def first_violation(inner: VPolytope, outer: HPolytope) -> Optional[tuple[int, int]]:
    """Lexicographically first (vertex index, halfspace index) with ⟨a, v⟩ > b."""
    if inner.n != outer.n:
        raise DimensionMismatch(f"{inner.n}-dimensional vertices against {outer.n}-dimensional halfspaces")
    for vi, v in enumerate(inner.vertices):
        for hi, (a, b) in enumerate(outer.halfspaces):
            if dot(a, v) > b:
                return vi, hi
    return None


def v_in_h(inner: VPolytope, outer: HPolytope) -> bool:
    """True iff every vertex satisfies every halfspace with exact ≤."""
    return first_violation(inner, outer) is None


# ── planar routines ───────────────────────────────────────────────────────────

def orient(a: QVector, b: QVector, c: QVector) -> Fraction:
    """Twice the signed area of (a, b, c); > 0 means counterclockwise."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def cross2(u: QVector, v: QVector) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def triangle_area2(a: QVector, b: QVector, c: QVector) -> Fraction:
    return abs(orient(a, b, c))


def polygon_area2(P: VPolytope) -> Fraction:
    """Twice the signed area (shoelace); positive for ccw order."""
    vs = P.vertices
    return sum((cross2(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))), Fraction(0))


def convex_hull_2d(points: Iterable[Sequence[Number]]) -> VPolytope:
    """
    Monotone-chain hull with exact orientation tests. Output is ccw, starts at
    the lexicographically smallest point and drops interior, duplicate and
    collinear boundary points.
    """
    pts = sorted({tuple(q(x) for x in p) for p in points})
    if any(len(p) != 2 for p in pts):
        raise DimensionMismatch("convex_hull_2d expects planar points")
    if len(pts) < 3:
        raise Degenerate(f"need 3 non-collinear points, got {len(pts)} distinct")

    def half(seq):
        chain: list[QVector] = []
        for p in seq:
            while len(chain) >= 2 and orient(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower, upper = half(pts), half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise Degenerate("all points are collinear")
    return VPolytope(2, tuple(hull))


def polygon_to_h(P: VPolytope) -> HPolytope:
    """
    One halfspace per edge of a ccw convex polygon. Each vertex must be tight
    on exactly its two incident edges and strictly inside the others.
    """
    if P.n != 2:
        raise DimensionMismatch("polygon_to_h expects a planar polygon")
    vs = P.vertices
    m = len(vs)
    if m < 3:
        raise NotConvex(f"polygon with {m} vertices")
    halfspaces = []
    for i in range(m):
        a, b = vs[i], vs[(i + 1) % m]
        if orient(a, b, vs[(i + 2) % m]) <= 0:
            raise NotConvex("vertices are not in strictly counterclockwise convex position",
                            {"at": i})
        normal = (b[1] - a[1], a[0] - b[0])
        halfspaces.append((normal, dot(normal, a)))
    H = HPolytope(2, tuple(halfspaces))
    # A star-shaped walk can turn left everywhere and still wind twice.
    for vi, v in enumerate(vs):
        for hi, (a, b) in enumerate(H.halfspaces):
            s = b - dot(a, v)
            incident = hi == vi or hi == (vi - 1) % m
            if (incident and s != 0) or (not incident and s <= 0):
                raise NotConvex("vertex order does not describe a simple convex polygon",
                                {"vertex": vi, "edge": hi})
    return H


# ── affine maps and symmetry ──────────────────────────────────────────────────

def affine_map_points(A: QMatrix, t: Sequence[Fraction], points: Iterable[QVector]) -> tuple[QVector, ...]:
    return tuple(vadd(mat_vec(A, p), tuple(t)) for p in points)


def affine_image(V: VPolytope, H: HPolytope, A: QMatrix, t: Sequence[Number]) -> tuple[VPolytope, HPolytope]:
    """Image of both representations under x ↦ Ax + t."""
    if not (V.n == H.n == A.n == len(t)):
        raise DimensionMismatch("affine_image: dimensions disagree")
    t = tuple(q(x) for x in t)
    AinvT = mat_inverse(A).transpose()
    new_v = VPolytope(V.n, affine_map_points(A, t, V.vertices))
    new_h = []
    for a, b in H.halfspaces:
        a2 = mat_vec(AinvT, a)
        new_h.append((a2, b + dot(a2, t)))
    return new_v, HPolytope(H.n, tuple(new_h))


def homothety(V: VPolytope, center: Sequence[Number], ratio: Number) -> VPolytope:
    """x ↦ c + λ(x − c)."""
    c = tuple(q(x) for x in center)
    lam = q(ratio)
    return VPolytope(V.n, tuple(vadd(c, vscale(lam, vsub(v, c))) for v in V.vertices))


def symmetry_center(V: VPolytope) -> QVector:
    """Vertex centroid; for a centrally symmetric polytope this is the center."""
    m = len(V.vertices)
    return tuple(sum((v[i] for v in V.vertices), Fraction(0)) / m for i in range(V.n))


def is_centrally_symmetric(V: VPolytope) -> bool:
    s = symmetry_center(V)
    pts = set(V.vertices)
    return all(vsub(vscale(2, s), v) in pts for v in V.vertices)


def affine_rank(points: Sequence[QVector]) -> int:
    """Dimension of the affine hull."""
    if not points:
        return -1
    base = points[0]
    rows = [list(vsub(p, base)) for p in points[1:]]
    rank, n = 0, len(base)
    for col in range(n):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank
