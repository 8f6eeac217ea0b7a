"""
bm_distance/certify.py
─────────────────────────────────────────────────────────────────────────────
Exact cube / cross-polytope sandwiches  r·C_n ⊆ T(C_n*) ⊆ C_n.

  outer radius  = max_i ‖T e_i‖_∞            (T(C*) ⊆ ρ·C iff ρ ≥ this)
  inner radius  = 1 / max_v ‖T⁻¹ v‖₁, v ∈ {±1}ⁿ
  ratio         = outer / inner  ≥ d_BM(C_n, C_n*)

Also home to the 3D extremal family (192 matrices, four octahedra) and the
three 4D operators attaining ratio 2.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .codec import encode_matrix, encode_vector
from .errors import CertificationFailure, DimensionMismatch, SingularMatrix, ZeroColumn
from .exact import (
    QMatrix,
    QVector,
    cube,
    first_violation,
    format_rational,
    hrep_of_operator_image,
    mat_inverse,
    mat_mul,
    mat_vec,
    norm_1,
    norm_inf,
    operator_image_vrep,
    sign_vectors,
    vscale,
)

log = logging.getLogger("bm_distance.certify")

_T = Fraction(1, 3)

EXTREMAL_3D_MATRIX = QMatrix.from_rows([
    [_T, -1, -1],
    [-1, _T, -1],
    [-1, -1, _T],
])

EXTREMAL_4D_MATRICES: tuple[QMatrix, ...] = (
    QMatrix.from_rows([[1, 1, 1, 0], [1, 1, -1, 0], [1, -1, 0, 1], [1, -1, 0, -1]]),
    QMatrix.from_rows([[1, 1, 1, 0], [1, -1, 0, 1], [1, 0, -1, -1], [0, 1, -1, 1]]),
    QMatrix.from_rows([[1, 1, 1, -1], [-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1]]),
)

NICE_INNER_RADIUS = Fraction(5, 9)
NICE_FAMILY_SIZE = 192


# ── operator ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class OperatorT:
    T: QMatrix
    Tinv: QMatrix

    @property
    def n(self) -> int:
        return self.T.n

    @classmethod
    def of(cls, T: QMatrix) -> "OperatorT":
        """Raises SingularMatrix when det T = 0."""
        return cls(T, mat_inverse(T))

    def __post_init__(self):
        if mat_mul(self.T, self.Tinv) != QMatrix.identity(self.T.n):
            raise SingularMatrix("Tinv is not the inverse of T")


OperatorLike = Union[OperatorT, QMatrix]


def as_operator(T: OperatorLike) -> OperatorT:
    return T if isinstance(T, OperatorT) else OperatorT.of(T)


@dataclass(frozen=True)
class SandwichCertificate:
    operator: OperatorT
    r: Fraction
    r_inner: Fraction
    r_outer: Fraction
    ratio: Fraction
    inner_vertex: QVector
    outer_column: int

    def to_dict(self) -> dict:
        return {
            "matrix": encode_matrix(self.operator.T),
            "r": format_rational(self.r),
            "r_inner": format_rational(self.r_inner),
            "r_outer": format_rational(self.r_outer),
            "ratio": format_rational(self.ratio),
            "witnesses": {
                "inner_vertex": encode_vector(self.inner_vertex),
                "outer_column": self.outer_column,
            },
        }


# ── radii ─────────────────────────────────────────────────────────────────────

def outer_witness(T: OperatorLike) -> tuple[Fraction, int]:
    op = as_operator(T)
    norms = [norm_inf(c) for c in op.T.columns()]
    best = max(norms)
    return best, norms.index(best)


def inner_witness(T: OperatorLike) -> tuple[Fraction, QVector]:
    """(max ‖T⁻¹v‖₁, first maximising cube vertex in lexicographic order)."""
    op = as_operator(T)
    best: Optional[Fraction] = None
    arg: QVector = ()
    for v in sign_vectors(op.n):
        val = norm_1(mat_vec(op.Tinv, v))
        if best is None or val > best:
            best, arg = val, v
    return best, arg


def outer_radius(T: OperatorLike) -> Fraction:
    return outer_witness(T)[0]


def _inner_violation(op: OperatorT, r: Fraction) -> Optional[dict]:
    """Witness for the first corner of r·C_n outside T(C_n*), or None."""
    bad = first_violation(cube(op.n)[0].scaled(r), hrep_of_operator_image(op.T, op.Tinv))
    if bad is None:
        return None
    vi, hi = bad
    return {
        "inclusion": "inner",
        "vertex": encode_vector(vscale(r, sign_vectors(op.n)[vi])),
        "vertex_index": vi,
        "halfspace_index": hi,
        "sign_vector": encode_vector(sign_vectors(op.n)[hi]),
    }


def inner_radius(T: OperatorLike) -> Fraction:
    """1 / max_v ‖T⁻¹v‖₁, re-checked corner against facet before it is returned."""
    op = as_operator(T)
    r = 1 / inner_witness(op)[0]
    witness = _inner_violation(op, r)
    if witness is not None:
        raise CertificationFailure(f"inner radius {format_rational(r)} does not re-verify", witness)
    return r


def ratio(T: OperatorLike) -> Fraction:
    op = as_operator(T)
    return outer_radius(op) * inner_witness(op)[0]


def certify_sandwich(T: OperatorLike, r: Fraction) -> SandwichCertificate:
    """
    Verify r·C_n ⊆ T(C_n*) ⊆ C_n vertex-against-halfspace in both directions.
    Raises CertificationFailure with the first violating pair.
    """
    op = as_operator(T)
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    cube_h = cube(op.n)[1]

    inner = _inner_violation(op, r)
    if inner is not None:
        raise CertificationFailure(f"r·C_{op.n} ⊄ T(C_{op.n}*) at r = {format_rational(r)}", inner)

    image = operator_image_vrep(op.T)
    outer = first_violation(image, cube_h)
    if outer is not None:
        vi, hi = outer
        raise CertificationFailure(
            f"T(C_{op.n}*) ⊄ C_{op.n}",
            {
                "inclusion": "outer",
                "vertex": encode_vector(image.vertices[vi]),
                "vertex_index": vi,
                "halfspace_index": hi,
            },
        )

    r_outer, col = outer_witness(op)
    m, v = inner_witness(op)
    cert = SandwichCertificate(op, r, 1 / m, r_outer, r_outer * m, v, col)
    log.info(f"[certify] n={op.n} r={format_rational(r)} ratio={format_rational(cert.ratio)}")
    return cert


# ── symmetries and the 3D family ──────────────────────────────────────────────

def canonical_key(M: QMatrix) -> str:
    return ";".join(",".join(format_rational(x) for x in row) for row in M.entries)


def apply_symmetry(
    T: QMatrix,
    row_perm: Sequence[int],
    col_perm: Sequence[int],
    row_signs: Sequence[int],
    col_signs: Sequence[int],
) -> QMatrix:
    """result[i][j] = row_signs[i] · col_signs[j] · T[row_perm[i]][col_perm[j]]"""
    n = T.n
    return QMatrix(n, tuple(
        tuple(row_signs[i] * col_signs[j] * T.entries[row_perm[i]][col_perm[j]] for j in range(n))
        for i in range(n)
    ))


def symmetry_group(n: int):
    """Every (row_perm, col_perm, row_signs, col_signs) in a fixed order."""
    perms = list(itertools.permutations(range(n)))
    signs = list(itertools.product((1, -1), repeat=n))
    return itertools.product(perms, perms, signs, signs)


@lru_cache(maxsize=1)
def _nice_index() -> dict[str, QMatrix]:
    found: dict[str, QMatrix] = {}
    for rp, cp, rs, cs in symmetry_group(3):
        M = apply_symmetry(EXTREMAL_3D_MATRIX, rp, cp, rs, cs)
        found.setdefault(canonical_key(M), M)
    log.info(f"[certify] nice family: {len(found)} distinct matrices")
    return dict(sorted(found.items()))


def enumerate_nice_octahedra() -> tuple[QMatrix, ...]:
    """All row/column permutations and sign flips of the base 3×3 matrix, deduplicated."""
    return tuple(_nice_index().values())


@lru_cache(maxsize=1)
def nice_octahedra() -> tuple[frozenset, ...]:
    """Vertex sets {±(a/3 + 2b_i/3)}, one per antipodal pair {a, −a}."""
    out: dict[frozenset, None] = {}
    for a in sign_vectors(3):
        pts = set()
        for i in range(3):
            b = tuple(-x if j == i else x for j, x in enumerate(a))
            p = tuple(x / 3 + 2 * y / 3 for x, y in zip(a, b))
            pts.add(p)
            pts.add(tuple(-x for x in p))
        out.setdefault(frozenset(pts), None)
    return tuple(out)


def is_nice(T: OperatorLike) -> bool:
    """Vertex set of T(C₃*) equals one of the four nice octahedra."""
    op = as_operator(T)
    if op.n != 3:
        raise DimensionMismatch("is_nice is defined for n = 3")
    return frozenset(operator_image_vrep(op.T).vertices) in nice_octahedra()


def is_nice_member(T: OperatorLike) -> bool:
    M = T.T if isinstance(T, OperatorT) else T
    return M.n == 3 and canonical_key(M) in _nice_index()


def normalize_columns(T: OperatorLike) -> OperatorT:
    """Scale each column by 1/‖column‖_∞."""
    M = T.T if isinstance(T, OperatorT) else T
    cols = M.columns()
    for j, c in enumerate(cols):
        if norm_inf(c) == 0:
            raise ZeroColumn(f"column {j} is zero", {"column": j})
    scaled = [vscale(1 / norm_inf(c), c) for c in cols]
    return OperatorT.of(matrix_from_columns(scaled))


def matrix_from_columns(cols: Sequence[QVector]) -> QMatrix:
    return QMatrix(len(cols), tuple(zip(*cols)))
