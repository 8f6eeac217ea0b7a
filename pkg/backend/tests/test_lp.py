from fractions import Fraction

from hypothesis import given, settings, strategies as st

from bm_distance.exact import cross_polytope, cube, dot
from bm_distance.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, lp_max, lp_min


def test_max_x1_over_square():
    _, H = cube(2)
    res = lp_max([1, 0], H)
    assert res.status == OPTIMAL
    assert res.objective == 1
    assert res.witness[0] == 1
    assert 0 in res.tight
    assert len(res.tight) >= 2


def test_l1_ball_support():
    _, H = cross_polytope(2)
    assert lp_max([1, 1], H).objective == 1
    assert lp_min([1, 1], H).objective == -1


def test_statuses():
    assert lp_max([1], [([1], -1), ([-1], -1)]).status == INFEASIBLE
    assert lp_max([1], [([-1], 0)]).status == UNBOUNDED
    assert lp_max([1, 0], []).status == UNBOUNDED
    res = lp_max([0, 0], [])
    assert res.is_optimal and res.objective == 0


def test_negative_offsets_need_phase_one():
    # 1 ≤ x ≤ 3, 2 ≤ y ≤ 5, maximise x + y
    cons = [([1, 0], 3), ([-1, 0], -1), ([0, 1], 5), ([0, -1], -2)]
    res = lp_max([1, 1], cons)
    assert res.objective == 8
    assert res.witness == (3, 5)
    assert lp_min([1, 1], cons).objective == 3


def test_redundant_equalities_are_dropped():
    # x + y = 1 written twice, plus x ≥ 0, y ≥ 0
    cons = [([1, 1], 1), ([-1, -1], -1), ([2, 2], 2), ([-2, -2], -2), ([-1, 0], 0), ([0, -1], 0)]
    res = lp_max([1, 0], cons)
    assert res.objective == 1
    assert res.witness == (1, 0)


def test_triangle_asymmetry_lp():
    # rows over (w, λ) for the triangle (0,2), (−3,−1), (3,−1)
    verts = [(0, 2), (-3, -1), (3, -1)]
    facets = [((-3, 3), 6), ((0, -6), 6), ((3, 3), 6)]
    rows = []
    for v in verts:
        for a, b in facets:
            rows.append((a + (-dot(a, v),), b))
    rows.append(((0, 0, -1), 0))
    res = lp_max([0, 0, 1], rows)
    assert res.objective == Fraction(1, 2)


@given(
    st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=6),
    st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
)
@settings(max_examples=60)
def test_witness_is_feasible_and_a_vertex(extra, c):
    # box plus random cuts through it: bounded and full-dimensional whenever feasible
    cons = [([1, 0], 2), ([-1, 0], 2), ([0, 1], 2), ([0, -1], 2)]
    cons += [(list(a), Fraction(1)) for a in extra if a != (0, 0)]
    res = lp_max(list(c), cons)
    assert res.status == OPTIMAL
    assert all(dot(a, res.witness) <= b for a, b in cons)
    assert len(res.tight) >= 2
    assert res.objective == dot(c, res.witness)
    assert lp_min([-x for x in c], cons).objective == -res.objective
