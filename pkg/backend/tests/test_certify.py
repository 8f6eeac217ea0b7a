import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bm_distance.certify import (
    NICE_FAMILY_SIZE,
    EXTREMAL_3D_MATRIX,
    EXTREMAL_4D_MATRICES,
    OperatorT,
    apply_symmetry,
    canonical_key,
    certify_sandwich,
    enumerate_nice_octahedra,
    inner_radius,
    is_nice,
    is_nice_member,
    matrix_from_columns,
    normalize_columns,
    outer_radius,
    ratio,
)
from bm_distance.errors import CertificationFailure, DimensionMismatch, SingularMatrix, ZeroColumn
from bm_distance.exact import QMatrix, cube, determinant, hrep_of_operator_image, norm_inf, operator_image_vrep, v_in_h
from bm_distance.lemma import claim3d_report

from conftest import fuzz_trials

FIVE_NINTHS = Fraction(5, 9)


def _random_matrix(rng: random.Random, n: int) -> QMatrix:
    while True:
        M = QMatrix.from_rows([[Fraction(rng.randint(-12, 12), rng.randint(1, 12)) for _ in range(n)]
                               for _ in range(n)])
        if determinant(M) != 0:
            return M


# ── radii ─────────────────────────────────────────────────────────────────────

def test_outer_radius_examples():
    assert outer_radius(QMatrix.identity(3)) == 1
    assert outer_radius(EXTREMAL_3D_MATRIX) == 1
    assert outer_radius(QMatrix.diag([Fraction(1, 2), 1, 1])) == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_identity_radii(n):
    assert inner_radius(QMatrix.identity(n)) == Fraction(1, n)
    assert ratio(QMatrix.identity(n)) == n


def test_rotated_square_is_optimal_in_the_plane():
    M = QMatrix.from_rows([[1, 1], [1, -1]])
    assert inner_radius(M) == 1
    assert ratio(M) == 1
    certify_sandwich(M, Fraction(1))


def test_base_3d_matrix():
    assert inner_radius(EXTREMAL_3D_MATRIX) == FIVE_NINTHS
    assert ratio(EXTREMAL_3D_MATRIX) == Fraction(9, 5)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_inner_radius_is_exact_on_random_operators(n):
    rng = random.Random(70 + n)
    for _ in range(max(20, fuzz_trials() // 20)):
        op = normalize_columns(_random_matrix(rng, n))
        r = inner_radius(op)
        assert certify_sandwich(op, r).r_inner == r
        with pytest.raises(CertificationFailure) as info:
            certify_sandwich(op, r + Fraction(1, 10**6))
        assert info.value.witness["inclusion"] == "inner"


# ── certify_sandwich ──────────────────────────────────────────────────────────

def test_certify_3d_at_five_ninths():
    cert = certify_sandwich(EXTREMAL_3D_MATRIX, FIVE_NINTHS)
    assert cert.ratio == Fraction(9, 5)
    assert cert.r_inner == FIVE_NINTHS and cert.r_outer == 1
    d = cert.to_dict()
    assert d["ratio"] == "9/5"
    assert d["witnesses"]["inner_vertex"] == ["-1/1", "-1/1", "-1/1"]
    # independent re-check in both directions
    cv, ch = cube(3)
    assert v_in_h(cv.scaled(FIVE_NINTHS), hrep_of_operator_image(EXTREMAL_3D_MATRIX))
    assert v_in_h(operator_image_vrep(EXTREMAL_3D_MATRIX), ch)


@pytest.mark.parametrize("eps", [Fraction(1, 1000), Fraction(1, 10**6)])
def test_certify_3d_fails_above_five_ninths(eps):
    with pytest.raises(CertificationFailure) as info:
        certify_sandwich(EXTREMAL_3D_MATRIX, FIVE_NINTHS + eps)
    w = info.value.witness
    assert w["inclusion"] == "inner"
    assert w["vertex_index"] == 0
    assert len(w["sign_vector"]) == 3


def test_certify_outer_failure():
    with pytest.raises(CertificationFailure) as info:
        certify_sandwich(EXTREMAL_3D_MATRIX.scaled(2), Fraction(1, 100))
    assert info.value.witness["inclusion"] == "outer"


def test_certify_rejects_bad_input():
    with pytest.raises(ValueError):
        certify_sandwich(EXTREMAL_3D_MATRIX, Fraction(0))
    with pytest.raises(SingularMatrix):
        certify_sandwich(QMatrix.from_rows([[1, 1], [1, 1]]), Fraction(1, 2))
    with pytest.raises(SingularMatrix):
        OperatorT(EXTREMAL_3D_MATRIX, QMatrix.identity(3))


@pytest.mark.parametrize("M", EXTREMAL_4D_MATRICES)
def test_4d_matrices(M):
    cert = certify_sandwich(M, Fraction(1, 2))
    assert cert.ratio == 2
    assert ratio(M) == 2
    with pytest.raises(CertificationFailure):
        certify_sandwich(M, Fraction(1, 2) + Fraction(1, 10**6))


# ── the 192-family ────────────────────────────────────────────────────────────

def test_nice_family():
    family = enumerate_nice_octahedra()
    assert len(family) == NICE_FAMILY_SIZE == 192
    assert len({canonical_key(M) for M in family}) == 192
    assert canonical_key(EXTREMAL_3D_MATRIX) in {canonical_key(M) for M in family}
    for M in family:
        assert certify_sandwich(M, FIVE_NINTHS).ratio == Fraction(9, 5)
        assert is_nice(M)
        rep = claim3d_report(M)
        assert rep.holds and rep.occupied_cubes == 6


def test_is_nice_examples():
    assert is_nice(EXTREMAL_3D_MATRIX)
    assert is_nice_member(EXTREMAL_3D_MATRIX)
    assert not is_nice(QMatrix.identity(3))
    rows = [list(r) for r in EXTREMAL_3D_MATRIX.entries]
    rows[0][0] += Fraction(1, 100)
    perturbed = QMatrix.from_rows(rows)
    assert not is_nice(perturbed)
    assert not is_nice_member(perturbed)
    with pytest.raises(DimensionMismatch):
        is_nice(QMatrix.identity(2))


def test_perturbed_family_members_do_not_certify():
    # 9/5 is only reached on the family, so any nudge loses the 5/9 sandwich
    for M in enumerate_nice_octahedra()[::24]:
        for (i, j), delta in itertools.product(itertools.product(range(3), repeat=2),
                                               (Fraction(1, 1000), Fraction(-1, 1000))):
            rows = [list(r) for r in M.entries]
            rows[i][j] += delta
            perturbed = QMatrix.from_rows(rows)
            assert not is_nice_member(perturbed)
            with pytest.raises(CertificationFailure):
                certify_sandwich(perturbed, FIVE_NINTHS)


# ── normalisation and invariances ─────────────────────────────────────────────

def test_normalize_columns_examples():
    assert normalize_columns(QMatrix.diag([Fraction(1, 2), Fraction(1, 3), 1, 1])).T == QMatrix.identity(4)
    assert normalize_columns(EXTREMAL_3D_MATRIX.scaled(2)).T == EXTREMAL_3D_MATRIX
    assert matrix_from_columns(EXTREMAL_3D_MATRIX.columns()) == EXTREMAL_3D_MATRIX
    with pytest.raises(ZeroColumn):
        normalize_columns(QMatrix.from_rows([[1, 0], [1, 0]]))


def test_normalize_columns_random():
    rng = random.Random(5)
    for _ in range(200):
        M = _random_matrix(rng, 3)
        N = normalize_columns(M)
        assert all(norm_inf(c) == 1 for c in N.T.columns())
        assert ratio(N) <= ratio(M)


@given(
    seed=st.integers(0, 10**6),
    lam=st.fractions(min_value=-7, max_value=7, max_denominator=9).filter(lambda x: x != 0),
)
@settings(max_examples=40, deadline=None)
def test_ratio_is_scale_invariant(seed, lam):
    M = _random_matrix(random.Random(seed), 3)
    assert ratio(M.scaled(lam)) == ratio(M)


@given(seed=st.integers(0, 10**6), data=st.data())
@settings(max_examples=40, deadline=None)
def test_ratio_is_invariant_under_signed_permutations(seed, data):
    n = 3
    M = _random_matrix(random.Random(seed), n)
    perm = st.permutations(list(range(n)))
    signs = st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n)
    N = apply_symmetry(M, data.draw(perm), data.draw(perm), data.draw(signs), data.draw(signs))
    assert ratio(N) == ratio(M)


# ── theorem-as-oracle ─────────────────────────────────────────────────────────

@pytest.mark.parametrize("n, bound", [(3, Fraction(9, 5)), (4, Fraction(2))])
def test_no_random_operator_beats_the_optimum(n, bound):
    rng = random.Random(1000 + n)
    trials = fuzz_trials()
    worst = min(ratio(_random_matrix(rng, n)) for _ in range(trials))
    print(f"n={n}: best of {trials} random ratios = {worst} ({float(worst):.4f})")
    assert worst >= bound
