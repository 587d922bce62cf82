from fractions import Fraction

import pytest

from padicbench.denefpas import EvalContext, definable_set, parse
from padicbench.errors import NoConstancyDepth
from padicbench.integrate import (
    ADAPTIVE,
    REFINE,
    Box,
    IntegrationJob,
    form_measure,
    integrate,
    local_constancy_depth,
    q_power,
    representative,
)
from padicbench.localfield import character


def psi(cell):
    return character(cell[0])


def psi_over_uniformizer(cell):
    return character(cell[0].scale_by_uniformizer(-1))


def test_q_power():
    assert q_power(5, 2) == Fraction(1, 25)
    assert q_power(5, -1) == 5


def test_representative_pads_digits(q5):
    coset = q5.from_digits(1, [2, 3])
    lift = representative(coset)
    assert lift.valuation == 1
    assert lift.digits[:3] == (2, 3, 0)
    assert representative(q5.bigoh(2)).is_exact_zero


def test_volume_of_unit_ball(q5):
    assert integrate(IntegrationJob(q5, Box.ball(1), lambda cell: 1)).value == 1


def test_volume_of_prime_ideal(q5):
    assert integrate(IntegrationJob(q5, Box.ball(1, lo=1), lambda cell: 1)).value == Fraction(1, 5)


def test_box_volume_matches_integral(q3):
    box = Box((0, 1), (2, None))
    result = integrate(IntegrationJob(q3, box, lambda cell: 1, depth=2))
    assert result.value == box.volume(3)


def test_empty_window_rejected():
    with pytest.raises(ValueError):
        Box((2,), (1,))


@pytest.mark.parametrize("field_name", ["q5", "f5"])
def test_character_integrates_to_zero_over_unit_ball(field_name, request):
    field = request.getfixturevalue(field_name)
    assert integrate(IntegrationJob(field, Box.ball(1), psi)).value == 0


def test_character_is_trivial_on_unit_ball_at_conductor_zero(q5, conductor_zero):
    assert integrate(IntegrationJob(q5, Box.ball(1), psi)).value == 1
    assert integrate(IntegrationJob(q5, Box.ball(1), psi_over_uniformizer)).value == 0


def test_split_is_additive(q5):
    box = Box.ball(1)
    shell, inner = box.split(0)
    whole = integrate(IntegrationJob(q5, box, psi, depth=2)).value
    parts = integrate(IntegrationJob(q5, shell, psi, depth=2)).value + integrate(
        IntegrationJob(q5, inner, psi, depth=2)
    ).value
    assert whole == parts
    assert integrate(IntegrationJob(q5, shell, psi)).value == Fraction(-1, 5)


def test_single_valuation_window_cannot_split():
    with pytest.raises(ValueError):
        Box((0,), (0,)).split(0)


def test_form_measure(q5):
    one = lambda cell: q5.one()  # noqa: E731
    assert form_measure(q5, one, Box.ball(1), 1) == 1
    assert form_measure(q5, one, Box((0,), (0,)), 1) == Fraction(4, 5)
    assert form_measure(q5, lambda cell: cell[0], Box((1,), (1,)), 1) == Fraction(4, 125)


def test_local_constancy_depth(q5):
    assert local_constancy_depth(psi, (q5.from_int(3),), 3) == 1


def test_no_constancy_depth(q5):
    def deep(cell):
        return character(cell[0].scale_by_uniformizer(-5))

    with pytest.raises(NoConstancyDepth):
        local_constancy_depth(deep, (q5.from_int(3),), 2)


def test_refine_mode_reports_stabilization(q5):
    result = integrate(IntegrationJob(q5, Box.ball(1), psi, mode=REFINE))
    assert result.value == 0
    assert result.certificate["stabilized"] is True
    assert result.certificate["cells"] == [5, 25]


def test_adaptive_mode_splits_unresolved_cosets(q5):
    result = integrate(IntegrationJob(q5, Box.ball(1), psi_over_uniformizer, mode=ADAPTIVE))
    assert result.value == 0
    assert result.certificate["splits"] > 0


@pytest.mark.parametrize("mode", ["one-shot", ADAPTIVE])
def test_definable_domain(q5, mode):
    domain = definable_set(parse("ord(x0) >= 1"), ["x0"], EvalContext(q5))
    result = integrate(IntegrationJob(q5, Box.ball(1), lambda cell: 1, mode=mode, domain=domain))
    assert result.value == Fraction(1, 5)


def test_undecided_domain_is_refined(q5):
    domain = definable_set(parse("ord(x0) >= 2"), ["x0"], EvalContext(q5))
    result = integrate(IntegrationJob(q5, Box.ball(1), lambda cell: 1, mode=ADAPTIVE, domain=domain))
    assert result.value == Fraction(1, 25)
