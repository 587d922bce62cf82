"""
Exact rational linear programming by vertex enumeration.

Constraints are affine forms g(x) = sum_i coeffs[i] * x_i + const, read as
g(x) >= 0 (inequalities) or g(x) = 0 (equalities). A vertex is the unique
solution of d linearly independent active constraints satisfying all others.
Everything is Fraction arithmetic; results are exact.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]


@dataclass(frozen=True)
class Affine:
    """sum_i coeffs[i] * x_i + const, with an optional label for certificates."""

    coeffs: Tuple[Fraction, ...]
    const: Fraction = Fraction(0)
    label: str = ""

    def __call__(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * xi for c, xi in zip(self.coeffs, x)), Fraction(0)) + self.const


def solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[Point]:
    """Unique solution of a square system by Gauss-Jordan pivoting, or None if singular."""
    n = len(rows)
    m = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        piv = m[col][col]
        m[col] = [v / piv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [list(map(Fraction, row)) for row in rows]
    if not m:
        return 0
    r = 0
    for col in range(len(m[0])):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col] / m[r][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def vertices(
    dimension: int,
    inequalities: Sequence[Affine],
    equalities: Sequence[Affine] = (),
) -> List[Point]:
    """All vertices of {x : g(x) >= 0, h(x) = 0}, sorted lexicographically."""
    eq_rows = [e.coeffs for e in equalities]
    free = dimension - rank(eq_rows)
    found = set()
    for active in combinations(range(len(inequalities)), free):
        rows = eq_rows + [inequalities[i].coeffs for i in active]
        rhs = [-e.const for e in equalities] + [-inequalities[i].const for i in active]
        if rank(rows) < dimension:
            continue
        # square up: pick an independent subset of the rows
        chosen_rows, chosen_rhs = [], []
        for row, b in zip(rows, rhs):
            if rank(chosen_rows + [row]) > len(chosen_rows):
                chosen_rows.append(row)
                chosen_rhs.append(b)
        point = solve_exact(chosen_rows, chosen_rhs)
        if point is None:
            continue
        if all(g(point) >= 0 for g in inequalities) and all(h(point) == 0 for h in equalities):
            found.add(point)
    logger.debug("vertex enumeration in dimension %d: %d vertices", dimension, len(found))
    return sorted(found)


@dataclass(frozen=True)
class LPResult:
    optimum: Fraction
    point: Point
    tight: Tuple[str, ...]
    vertex_count: int
    optimal_vertices: int


def maximize(
    objective: Affine,
    dimension: int,
    inequalities: Sequence[Affine],
    equalities: Sequence[Affine] = (),
) -> LPResult:
    """
    Maximize an affine objective over a bounded polytope.

    The returned point is the lexicographically least vertex of the optimal
    face, so results are deterministic.
    """
    verts = vertices(dimension, inequalities, equalities)
    if not verts:
        raise ValueError("infeasible or unbounded polytope: no vertices")
    best = max(objective(v) for v in verts)
    optimal = [v for v in verts if objective(v) == best]
    point = min(optimal)
    tight = tuple(g.label for g in inequalities if g(point) == 0)
    return LPResult(best, point, tight, len(verts), len(optimal))
