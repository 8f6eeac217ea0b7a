"""
bm_distance/lp.py
─────────────────────────────────────────────────────────────────────────────
Exact linear programming over Fractions.

    maximise ⟨c, x⟩  subject to  ⟨a_i, x⟩ ≤ b_i,   x free

Dense two-phase tableau simplex with Bland's rule. Free variables are split
as x = x⁺ − x⁻ and every row gets a slack; rows with b_i < 0 start on an
artificial. An optimal witness is then pushed along the optimal face until
it is a vertex (tight on a rank-n set) whenever the feasible region allows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .exact import HPolytope, QVector, dot

log = logging.getLogger("bm_distance.lp")

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

Constraint = tuple[Sequence[Fraction], Fraction]


@dataclass(frozen=True)
class LPResult:
    status: str
    objective: Optional[Fraction] = None
    witness: Optional[QVector] = None
    tight: tuple[int, ...] = field(default_factory=tuple)

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


# ── tableau ───────────────────────────────────────────────────────────────────

class _Tableau:
    """Rows are [coefficients..., rhs]; `obj` is the reduced-cost row."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.obj: list[Fraction] = []
        self.pivots = 0

    @property
    def width(self) -> int:
        return len(self.rows[0]) - 1 if self.rows else 0

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        inv = 1 / row[c]
        row[:] = [x * inv for x in row]
        for i, other in enumerate(self.rows):
            if i != r and other[c]:
                f = other[c]
                other[:] = [x - f * y for x, y in zip(other, row)]
        if self.obj[c]:
            f = self.obj[c]
            self.obj = [x - f * y for x, y in zip(self.obj, row)]
        self.basis[r] = c
        self.pivots += 1

    def set_objective(self, cost: Sequence[Fraction]) -> None:
        """Maximise ⟨cost, ·⟩: start from −cost, then price out the basis."""
        self.obj = [-Fraction(x) for x in cost] + [Fraction(0)]
        for r, b in enumerate(self.basis):
            if self.obj[b]:
                f = self.obj[b]
                self.obj = [x - f * y for x, y in zip(self.obj, self.rows[r])]

    def optimise(self, allowed: int) -> bool:
        """Bland's rule over columns < allowed. False means unbounded."""
        while True:
            entering = next((j for j in range(allowed) if self.obj[j] < 0), None)
            if entering is None:
                return True
            best: Optional[tuple[Fraction, int, int]] = None
            for r, row in enumerate(self.rows):
                if row[entering] > 0:
                    key = (row[-1] / row[entering], self.basis[r], r)
                    if best is None or key < best:
                        best = key
            if best is None:
                return False
            self.pivot(best[2], entering)

    def values(self) -> list[Fraction]:
        out = [Fraction(0)] * self.width
        for r, b in enumerate(self.basis):
            out[b] = self.rows[r][-1]
        return out


# ── crossover to a vertex ─────────────────────────────────────────────────────

def _null_vector(rows: list[Sequence[Fraction]], n: int) -> Optional[list[Fraction]]:
    """A nonzero d with ⟨row, d⟩ = 0 for every row, or None if the rows span ℝⁿ."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(n):
        p = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        pivots.append(col)
        rank += 1
    free = next((j for j in range(n) if j not in pivots), None)
    if free is None:
        return None
    d = [Fraction(0)] * n
    d[free] = Fraction(1)
    for i, col in enumerate(pivots):
        d[col] = -m[i][free]
    return d


def _tight(constraints: list[Constraint], x: Sequence[Fraction]) -> list[int]:
    return [i for i, (a, b) in enumerate(constraints) if dot(a, x) == b]


def _crossover(constraints: list[Constraint], x: list[Fraction], n: int) -> list[Fraction]:
    # Any direction inside the tight set's nullspace keeps the objective fixed
    # at an optimum, so walking along it until a new facet blocks is free.
    while True:
        tight = _tight(constraints, x)
        d = _null_vector([constraints[i][0] for i in tight], n)
        if d is None:
            return x
        moved = False
        for direction in (d, [-v for v in d]):
            step: Optional[Fraction] = None
            for a, b in constraints:
                rate = dot(a, direction)
                if rate > 0:
                    t = (b - dot(a, x)) / rate
                    if step is None or t < step:
                        step = t
            if step is not None:
                x = [xi + step * di for xi, di in zip(x, direction)]
                moved = True
                break
        if not moved:
            return x


# ── public entry points ───────────────────────────────────────────────────────

def _as_constraints(constraints: Union[HPolytope, Sequence[Constraint]]) -> list[Constraint]:
    if isinstance(constraints, HPolytope):
        return list(constraints.halfspaces)
    return [(tuple(Fraction(x) for x in a), Fraction(b)) for a, b in constraints]


def lp_max(objective: Sequence[Fraction], constraints: Union[HPolytope, Sequence[Constraint]]) -> LPResult:
    """Exact optimum of ⟨objective, x⟩ over {⟨a_i, x⟩ ≤ b_i}; statuses instead of exceptions."""
    cons = _as_constraints(constraints)
    c = [Fraction(x) for x in objective]
    n, m = len(c), len(cons)
    if any(len(a) != n for a, _ in cons):
        raise ValueError("constraint normals must match the objective length")
    if m == 0:
        if any(c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, Fraction(0), tuple(Fraction(0) for _ in range(n)))

    # Columns: x⁺ (n) | x⁻ (n) | slacks (m) | artificials (k)
    negative = [i for i, (_, b) in enumerate(cons) if b < 0]
    k = len(negative)
    width = 2 * n + m + k
    rows: list[list[Fraction]] = []
    basis: list[int] = []
    for i, (a, b) in enumerate(cons):
        row = [Fraction(0)] * (width + 1)
        for j in range(n):
            row[j], row[n + j] = Fraction(a[j]), -Fraction(a[j])
        row[2 * n + i] = Fraction(1)
        row[-1] = Fraction(b)
        if b < 0:
            row = [-x for x in row]
            art = 2 * n + m + negative.index(i)
            row[art] = Fraction(1)
            basis.append(art)
        else:
            basis.append(2 * n + i)
        rows.append(row)

    tab = _Tableau(rows, basis)
    real = 2 * n + m

    if k:
        tab.set_objective([Fraction(0)] * real + [Fraction(-1)] * k)
        tab.optimise(width)
        if tab.obj[-1] != 0:
            log.debug(f"[lp] infeasible after phase 1 ({tab.pivots} pivots)")
            return LPResult(INFEASIBLE)
        # Drive zero-valued artificials out of the basis; drop redundant rows.
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= real:
                col = next((j for j in range(real) if tab.rows[r][j] != 0), None)
                if col is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, col)
            r += 1
        tab.rows = [row[:real] + [row[-1]] for row in tab.rows]

    tab.set_objective(c + [-x for x in c] + [Fraction(0)] * m)
    if not tab.optimise(real):
        log.debug(f"[lp] unbounded ({tab.pivots} pivots)")
        return LPResult(UNBOUNDED)

    vals = tab.values()
    x = [vals[j] - vals[n + j] for j in range(n)]
    x = _crossover(cons, x, n)
    value = dot(c, x)
    log.debug(f"[lp] optimal {value} after {tab.pivots} pivots, {m} constraints")
    return LPResult(OPTIMAL, value, tuple(x), tuple(_tight(cons, x)))


def lp_min(objective: Sequence[Fraction], constraints: Union[HPolytope, Sequence[Constraint]]) -> LPResult:
    res = lp_max([-Fraction(x) for x in objective], constraints)
    if res.is_optimal:
        return LPResult(OPTIMAL, -res.objective, res.witness, res.tight)
    return res
