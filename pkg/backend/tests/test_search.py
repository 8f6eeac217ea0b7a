import os
from fractions import Fraction

import numpy as np
import pytest

from bm_distance.certify import EXTREMAL_3D_MATRIX, EXTREMAL_4D_MATRICES, is_nice_member, ratio
from bm_distance.errors import DimensionMismatch, TheoremViolation
from bm_distance.exact import QMatrix
from bm_distance.schemas import SearchConfig
from bm_distance.search import (
    RestartTrace,
    certify_restart,
    float_ratio,
    ladder,
    optimize,
    rationalize,
    snap_to_nice,
    _check_theorem,
)

from conftest import slow


def test_float_ratio_examples():
    assert float_ratio(np.eye(3)) == pytest.approx(3.0, abs=1e-12)
    assert float_ratio(np.array(EXTREMAL_3D_MATRIX.to_float_rows())) == pytest.approx(1.8, abs=1e-12)
    assert float_ratio(np.array(EXTREMAL_4D_MATRICES[0].to_float_rows())) == pytest.approx(2.0, abs=1e-12)
    assert float_ratio(np.array([[1.0, 1.0], [1.0, 1.0]])) == float("inf")


def test_float_ratio_agrees_with_exact():
    rng = np.random.default_rng(4)
    for _ in range(100):
        M = QMatrix.from_rows([[Fraction(int(rng.integers(-999, 1000)), int(rng.integers(1, 1000)))
                                for _ in range(3)] for _ in range(3)])
        exact = ratio(M)
        assert float_ratio(np.array(M.to_float_rows())) == pytest.approx(float(exact), rel=1e-9)


def test_ladder():
    assert ladder(1000) == [10, 100, 1000]
    assert ladder(10) == [10]
    assert ladder(5) == [5]


def test_rationalize_normalises_columns():
    M = rationalize(np.array([[2.0, 0.5], [0.6666666667, -1.0]]), 10)
    assert M == QMatrix.from_rows([[1, Fraction(1, 2)], [Fraction(1, 3), -1]])


def test_snap_to_nice():
    rng = np.random.default_rng(0)
    noisy = np.array(EXTREMAL_3D_MATRIX.to_float_rows()) + rng.uniform(-0.01, 0.01, (3, 3))
    assert snap_to_nice(noisy) == EXTREMAL_3D_MATRIX
    assert snap_to_nice(np.eye(3)) is None
    with pytest.raises(DimensionMismatch):
        snap_to_nice(np.eye(2))


def test_certify_restart_prefers_exact_snap():
    noisy = np.array(EXTREMAL_3D_MATRIX.to_float_rows()) + 1e-4
    trace = RestartTrace(0, 1.8001, 1, noisy.tolist())
    cands = certify_restart((trace, 3, 1000))
    assert cands[0].label == "snap"
    assert cands[0].exact_ratio == Fraction(9, 5)
    assert [c.label for c in cands[1:]] == ["cf10", "cf100", "cf1000"]


def test_theorem_guard():
    with pytest.raises(TheoremViolation):
        _check_theorem(3, Fraction(17, 10), EXTREMAL_3D_MATRIX)
    _check_theorem(3, Fraction(9, 5), EXTREMAL_3D_MATRIX)
    _check_theorem(5, Fraction(1), QMatrix.identity(5))


def test_planar_search_finds_the_rotated_square():
    report = optimize(SearchConfig(n=2, restarts=20, seed=1))
    assert report.exact_ratio == 1
    assert report.best_float_ratio == pytest.approx(1.0, abs=1e-3)
    d = report.to_dict()
    assert d["exact_ratio"] == "1/1" and d["theorem_value"] == "1/1"
    assert len(d["trace"]) == 20


def test_search_is_deterministic():
    config = SearchConfig(n=2, restarts=3, max_iters=400, seed=9)
    a, b = optimize(config), optimize(config)
    assert a.to_dict() == b.to_dict()


def test_search_does_not_depend_on_jobs():
    config = SearchConfig(n=2, restarts=4, max_iters=400, seed=9)
    assert optimize(config).to_dict() == optimize(config, jobs=2).to_dict()


@slow
def test_search_3d_reaches_nine_fifths():
    report = optimize(SearchConfig(n=3, restarts=200, seed=42), jobs=os.cpu_count() or 1)
    assert Fraction(9, 5) <= report.exact_ratio <= Fraction(9, 5) + Fraction(1, 1000)
    if report.exact_ratio == Fraction(9, 5):
        assert report.nice and is_nice_member(report.best_matrix)


@slow
def test_search_4d_reaches_two():
    report = optimize(SearchConfig(n=4, restarts=200, seed=42), jobs=os.cpu_count() or 1)
    assert 2 <= report.exact_ratio <= 2 + Fraction(1, 1000)
