from collections import Counter
from fractions import Fraction

import pytest

from padicbench.errors import NotFiniteType
from padicbench.optimal import optimal_point, optimal_points_all, sigma
from padicbench.rootdata import AffineRoot, affine_roots, build_root_system, fundamental_alcove

A1 = [[2]]
A2 = [[2, -1], [-1, 2]]
B2 = [[2, -2], [-1, 2]]
G2 = [[2, -1], [-3, 2]]
A1xA1 = [[2, 0], [0, 2]]


@pytest.mark.parametrize(
    "cartan, count, label",
    [(A1, 2, "A1"), (A2, 6, "A2"), (B2, 8, "B2"), (G2, 12, "G2"), (A1xA1, 4, "A1xA1")],
)
def test_root_counts(cartan, count, label):
    rs = build_root_system(cartan)
    assert len(rs.roots) == count
    assert len(rs.positive_roots()) == count // 2
    assert rs.dynkin_type() == label


def test_rank_one_roots():
    rs = build_root_system(A1)
    assert sorted(rs.roots) == [(-1,), (1,)]
    assert rs.highest_roots() == [(1,)]


def test_affine_cartan_is_not_finite_type():
    with pytest.raises(NotFiniteType):
        build_root_system([[2, -2], [-2, 2]])


def test_invalid_cartan_matrix():
    with pytest.raises(ValueError):
        build_root_system([[2, 1], [-1, 2]])


@pytest.mark.parametrize("cartan, bound, count", [(A1, 1, 6), (A2, 0, 6), (A1, 2, 10)])
def test_affine_root_counts(cartan, bound, count):
    assert len(affine_roots(build_root_system(cartan), bound)) == count


def test_rank_one_alcove():
    alcove = fundamental_alcove(build_root_system(A1))
    assert alcove.vertices == [(Fraction(0),), (Fraction(1),)]
    assert Counter(face.dimension for face in alcove.faces) == {0: 2, 1: 1}
    assert alcove.contains((Fraction(1, 2),), closed=False)
    assert not alcove.contains((Fraction(3, 2),))


def test_triangle_alcove():
    alcove = fundamental_alcove(build_root_system(A2))
    dims = Counter(face.dimension for face in alcove.faces)
    assert dims == {0: 3, 1: 3, 2: 1}
    assert dims[0] - dims[1] + dims[2] == 1


def test_face_of_edge_midpoint():
    alcove = fundamental_alcove(build_root_system(A1))
    face = alcove.face_of((Fraction(1, 2),))
    assert face.dimension == 1
    assert alcove.face_of((Fraction(0),)).dimension == 0


def test_sigma_rank_one():
    assert {str(psi) for psi in sigma(build_root_system(A1))} == {"a0", "-a0+1"}


def test_sigma_values_lie_in_unit_interval():
    rs = build_root_system(A2)
    alcove = fundamental_alcove(rs)
    for psi in sigma(rs, alcove):
        for v in alcove.vertices:
            assert 0 <= psi(v) <= 1


def test_single_root_optimum():
    rs = build_root_system(A1)
    alcove = fundamental_alcove(rs)
    report = optimal_point([AffineRoot((1,), 0)], alcove)
    assert report.point == (Fraction(1),)
    assert report.optimum == 1


def test_pair_optimum_is_midpoint():
    rs = build_root_system(A1)
    alcove = fundamental_alcove(rs)
    report = optimal_point([AffineRoot((1,), 0), AffineRoot((-1,), 1)], alcove)
    assert report.point == (Fraction(1, 2),)
    assert report.optimum == Fraction(1, 2)


def test_optimal_points_rank_one():
    points, reports = optimal_points_all(build_root_system(A1))
    assert points == [(Fraction(0),), (Fraction(1, 2),), (Fraction(1),)]
    assert len(reports) == 3


def test_optimal_points_are_tau_symmetric():
    points, _ = optimal_points_all(build_root_system(A1xA1), tau=[1, 0])
    assert points == [
        (Fraction(0), Fraction(0)),
        (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(1), Fraction(1)),
    ]


def test_tau_must_preserve_cartan():
    with pytest.raises(ValueError):
        optimal_points_all(build_root_system(B2), tau=[1, 0])


@pytest.mark.slow
def test_optimal_points_triangle_contains_barycenter():
    points, _ = optimal_points_all(build_root_system(A2))
    assert (Fraction(1, 3), Fraction(1, 3)) in points
    alcove = fundamental_alcove(build_root_system(A2))
    assert all(alcove.contains(point) for point in points)
