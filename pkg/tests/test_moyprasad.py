from fractions import Fraction
from itertools import product

import pytest

from padicbench.config import settings
from padicbench.errors import PointOutsideAlcove
from padicbench.moyprasad import (
    chevalley_model,
    depth,
    dual_lattice,
    group_member,
    group_member_by_generators,
    in_depth_domain,
    lattice_member,
    lattice_volume,
    mp_lattice,
    sl2_model,
)

HALF = [Fraction(1, 2)]
VERTEX = [Fraction(0)]


def coords(field, a, b, c):
    return [field.from_int(a), field.from_int(b), field.from_int(c)]


def matrix(field, rows):
    return [[field.from_int(v) for v in row] for row in rows]


@pytest.mark.parametrize(
    "point, r, strict, shifts",
    [
        (HALF, Fraction(0), False, {"H": 0, "E": 0, "F": 1}),
        (HALF, Fraction(1, 2), False, {"H": 1, "E": 0, "F": 1}),
        (VERTEX, Fraction(0), False, {"H": 0, "E": 0, "F": 0}),
        (VERTEX, Fraction(0), True, {"H": 1, "E": 1, "F": 1}),
        (HALF, Fraction(0), True, {"H": 1, "E": 0, "F": 1}),
    ],
)
def test_sl2_shifts(point, r, strict, shifts):
    lattice = mp_lattice(sl2_model(), point, r, strict)
    assert dict(lattice.shifts) == shifts


def test_point_outside_alcove():
    with pytest.raises(PointOutsideAlcove):
        mp_lattice(sl2_model(), [Fraction(3, 2)], 0)


def test_membership(q5):
    lattice = mp_lattice(sl2_model(), HALF, 0)
    assert lattice_member(coords(q5, 0, 1, 0), lattice)
    assert not lattice_member(coords(q5, 0, 0, 1), lattice)
    assert lattice_member(coords(q5, 0, 0, 5), lattice)
    assert lattice_member([q5.zero()] * 3, lattice)


def test_membership_of_matrix(f5):
    lattice = mp_lattice(sl2_model(), HALF, 0)
    assert lattice_member(matrix(f5, [[1, 0], [0, -1]]), lattice)
    assert not lattice_member(matrix(f5, [[0, 0], [1, 0]]), lattice)


def test_filtration_is_decreasing():
    model = sl2_model()
    outer = mp_lattice(model, HALF, 0)
    inner = mp_lattice(model, HALF, Fraction(1, 2))
    assert outer.contains_lattice(inner)
    assert not inner.contains_lattice(outer)


@pytest.mark.parametrize("point, r", [(HALF, Fraction(0)), (VERTEX, Fraction(1, 2)), (HALF, Fraction(1))])
def test_dual_is_opposite_strict_lattice(point, r):
    model = sl2_model()
    lattice = mp_lattice(model, point, r)
    assert dual_lattice(lattice, model) == mp_lattice(model, point, -r, strict=True)


def test_lattice_volume():
    model = sl2_model()
    assert lattice_volume(mp_lattice(model, VERTEX, 0), 5) == 1
    assert lattice_volume(mp_lattice(model, HALF, 0), 5) == Fraction(1, 5)
    assert lattice_volume(mp_lattice(model, HALF, Fraction(1, 2)), 3) == Fraction(1, 9)


def test_sl3_vertex_lattice():
    model = chevalley_model(3)
    lattice = mp_lattice(model, [Fraction(0), Fraction(0)], 0)
    assert model.dimension == 8
    assert all(shift == 0 for _, shift in lattice.shifts)


def test_group_identity(q5):
    identity = matrix(q5, [[1, 0], [0, 1]])
    for r in (Fraction(1, 2), Fraction(1), Fraction(2)):
        assert group_member(identity, HALF, r, sl2_model())


def test_group_unipotent(q5):
    model = sl2_model()
    assert group_member(matrix(q5, [[1, 5], [0, 1]]), HALF, 1, model)
    assert not group_member(matrix(q5, [[1, 1], [0, 1]]), HALF, 1, model)


def test_group_routes_agree(q5):
    for rows in ([[1, 5], [0, 1]], [[1, 1], [0, 1]], [[1, 0], [5, 1]], [[6, 5], [25, 21]]):
        g = matrix(q5, rows)
        assert group_member(g, HALF, 1, sl2_model()) == group_member_by_generators(g, HALF, 1)


def test_group_rejects_non_positive_depth(q5):
    with pytest.raises(ValueError):
        group_member(matrix(q5, [[1, 0], [0, 1]]), HALF, 0, sl2_model())


def test_depth_of_semisimple(q5):
    assert depth(coords(q5, 1, 0, 0)).value == 0
    assert depth(coords(q5, 5, 0, 0)).value == 1
    assert depth(coords(q5, 0, 25, 1)).value == 1


def test_depth_of_nilpotent(q5):
    d = depth(coords(q5, 0, 1, 0))
    assert not d.exact
    assert d.value == settings.depth_cap


def test_depth_domain(q5):
    assert in_depth_domain(coords(q5, 1, 0, 0), 0) is True
    assert in_depth_domain(coords(q5, 1, 0, 0), 1) is False
    assert in_depth_domain(coords(q5, 0, 1, 0), 3) is True


# exhaustive checks over residues


def exact_residues(field, lo, k):
    """w^lo (Omega / p^k) as exact elements, each with its valuation (None for zero)."""
    out = [(field.zero(), None)]
    for n in range(1, field.p**k):
        digits = [(n // field.p**i) % field.p for i in range(k)]
        lead = next(i for i, d in enumerate(digits) if d)
        out.append((field.from_digits(lo, digits + [0] * settings.precision_cap), lo + lead))
    return out


# alpha(x) coefficient of each sl2 coordinate
ROOT_COEFFICIENT = {"H": 0, "E": 1, "F": -1}


def in_lattice_by_definition(valuations, x, r, strict):
    for name, v in zip("HEF", valuations):
        if v is None:
            continue
        level = v + ROOT_COEFFICIENT[name] * x
        if level < r or (strict and level == r):
            return False
    return True


@pytest.mark.slow
@pytest.mark.parametrize("field_name", ["q3", "f3"])
@pytest.mark.parametrize("point", [VERTEX, [Fraction(1, 3)], HALF, [Fraction(1)]])
@pytest.mark.parametrize(
    "r, strict", [(Fraction(0), False), (Fraction(0), True), (Fraction(1, 2), False), (Fraction(-1, 3), True)]
)
def test_membership_matches_valuation_definition(field_name, point, r, strict, request):
    field = request.getfixturevalue(field_name)
    lattice = mp_lattice(sl2_model(), point, r, strict)
    residues = exact_residues(field, -1, 3)
    for triple in product(residues, repeat=3):
        expected = in_lattice_by_definition([v for _, v in triple], point[0], r, strict)
        assert lattice_member([y for y, _ in triple], lattice) == expected


@pytest.mark.slow
@pytest.mark.parametrize("field_name", ["q3", "f3"])
@pytest.mark.parametrize("point, r", [(HALF, Fraction(1, 2)), (HALF, Fraction(1)), (VERTEX, Fraction(1, 2))])
def test_group_routes_agree_on_residues(field_name, point, r, request):
    field = request.getfixturevalue(field_name)
    model = sl2_model()
    units = [y for y, v in exact_residues(field, 0, 2) if v == 0]
    entries = [y for y, _ in exact_residues(field, -1, 3)]
    members = 0
    for alpha, beta, gamma in product(units, entries, entries):
        delta = (1 + beta * gamma) * alpha.inverse()
        g = [[alpha, beta], [gamma, delta]]
        verdict = group_member(g, point, r, model)
        assert verdict == group_member_by_generators(g, point, r)
        members += verdict
    assert 0 < members < len(units) * len(entries) ** 2
