from fractions import Fraction
from itertools import combinations

import pytest

from padicbench.optimal import optimal_point, sigma
from padicbench.rootdata import build_root_system, fundamental_alcove

A2 = [[2, -1], [-1, 2]]


def alcove_grid(alcove, max_denominator=24):
    """Closure points of the A2 alcove whose coordinates have denominator at most max_denominator."""
    points = set()
    for d in range(1, max_denominator + 1):
        for i in range(d + 1):
            for j in range(d + 1 - i):
                points.add((Fraction(i, d), Fraction(j, d)))
    assert all(alcove.contains(point) for point in points)
    return sorted(points)


def objective(subset, point):
    return min(psi(point) for psi in subset)


@pytest.fixture(scope="module")
def a2():
    rs = build_root_system(A2)
    alcove = fundamental_alcove(rs)
    return rs, alcove, alcove_grid(alcove)


def test_sigma_of_a2(a2):
    rs, alcove, _ = a2
    assert len(sigma(rs, alcove)) == 6


@pytest.mark.slow
def test_no_grid_point_beats_the_optimum(a2):
    rs, alcove, grid = a2
    roots = sigma(rs, alcove)
    for size in range(1, len(roots) + 1):
        for subset in combinations(roots, size):
            report = optimal_point(subset, alcove)
            assert alcove.contains(report.point)
            assert objective(subset, report.point) == report.optimum
            best = max(objective(subset, point) for point in grid)
            assert best <= report.optimum
            # vertices solve 3x3 systems with entries in {0, 1, -1}: denominators are at most 4
            assert best == report.optimum


@pytest.mark.slow
def test_tau_restricted_optimum_beats_the_diagonal(a2):
    rs, alcove, grid = a2
    diagonal = [point for point in grid if point[0] == point[1]]
    roots = sigma(rs, alcove)
    for size in range(1, len(roots) + 1):
        for subset in combinations(roots, size):
            report = optimal_point(subset, alcove, tau=[1, 0])
            assert report.point[0] == report.point[1]
            assert max(objective(subset, point) for point in diagonal) <= report.optimum
