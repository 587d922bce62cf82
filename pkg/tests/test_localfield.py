from fractions import Fraction

import pytest

from padicbench.cyclotomic import CycValue
from padicbench.errors import DivisionByZero, InsufficientPrecision
from padicbench.localfield import FieldSpec, arith, character, ord_ac, residue_elements


def test_field_spec_rejects_composite_p():
    with pytest.raises(ValueError):
        FieldSpec(6)


def test_field_spec_rejects_unknown_characteristic():
    with pytest.raises(ValueError):
        FieldSpec(5, "two")


def test_multiplication_carries_digits(q5):
    # (2 + 1*5) * 3 = 21 = 1 + 4*5
    product = arith("mul", q5.from_digits(0, [2, 1] + [0] * 22), q5.from_int(3))
    assert product.valuation == 0
    assert product.digits[:3] == (1, 4, 0)
    assert product == q5.from_int(21)


def test_addition_carries_into_valuation(q5):
    total = arith("add", q5.from_int(5), q5.from_int(20))
    assert ord_ac(total) == (2, 1)


def test_laurent_inverse(f5):
    x = f5.from_digits(0, [3, 1] + [0] * 22)
    one = arith("mul", x, arith("inv", x))
    assert one == f5.one()


def test_from_int_reduces_mod_p_in_positive_characteristic(f5):
    assert f5.from_int(5).is_exact_zero
    assert f5.from_int(7) == f5.from_int(2)


def test_cancellation_raises(q5):
    x = q5.from_digits(0, [1, 2])
    with pytest.raises(InsufficientPrecision):
        arith("add", x, -x)


def test_inverse_of_zero(q5):
    with pytest.raises(DivisionByZero):
        arith("inv", q5.zero())


def test_ord_ac_of_zero(q5):
    assert ord_ac(q5.zero()) == (None, 0)


def test_ord_ac_reads_leading_digit(q5, f7):
    assert ord_ac(q5.from_int(75)) == (2, 3)
    assert ord_ac(f7.from_digits(-1, [1, 1])) == (-1, 1)


def test_ord_ac_is_multiplicative(q7):
    a, b = q7.from_int(3 * 49), q7.from_rational(Fraction(5, 7))
    va, ca = ord_ac(a)
    vb, cb = ord_ac(b)
    assert ord_ac(a * b) == (va + vb, (ca * cb) % 7)


def test_ord_ac_of_bounded_zero(q5):
    with pytest.raises(InsufficientPrecision):
        ord_ac(q5.bigoh(3))


def test_truncate_and_refinements(q5):
    x = q5.from_int(7).truncate(1)
    assert x.digits == (2,)
    children = x.refinements()
    assert len(children) == 5
    assert all(child.absolute_precision == 2 for child in children)
    assert children[1].digits == (2, 1)


def test_residue_elements_count(q3):
    cosets = list(residue_elements(q3, -1, 1))
    assert len(cosets) == 9
    assert cosets[0].is_bigoh


def test_sqrt_of_square(q5, f5):
    for field in (q5, f5):
        four = field.from_int(4)
        root = four.sqrt()
        assert root * root == four


def test_sqrt_of_non_residue(q5):
    assert q5.from_int(2).sqrt() is None
    assert q5.from_int(5).sqrt() is None


def test_character_trivial_on_prime_ideal(q5, f5):
    assert character(q5.from_int(10)) == CycValue.one()
    assert character(f5.uniformizer()) == CycValue.one()


def test_character_on_units(q5, f5):
    assert character(q5.from_int(3)) == CycValue.root(5, 1, 3)
    assert character(f5.from_int(3)) == CycValue.root(5, 1, 3)


def test_character_reads_t_inverse_coefficient(f5, conductor_zero):
    assert character(f5.from_digits(-1, [3] + [0] * 23)) == CycValue.root(5, 1, 3)


def test_character_fractional_part(q5, conductor_zero):
    a = q5.from_rational(Fraction(1, 25)) + q5.from_rational(Fraction(2, 5))
    assert character(a) == CycValue.root(5, 2, 11)


@pytest.mark.parametrize("a, b", [(1, 2), (3, 4), (Fraction(1, 5), Fraction(7, 5)), (Fraction(2, 25), 9)])
def test_character_is_additive(q5, a, b):
    x, y = q5.from_rational(a), q5.from_rational(b)
    assert character(x + y) == character(x) * character(y)


def test_character_needs_digits_below_conductor(q5):
    with pytest.raises(InsufficientPrecision):
        character(q5.bigoh(0))
