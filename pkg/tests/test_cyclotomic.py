from fractions import Fraction
import random

import mpmath
import pytest
import sympy

from padicbench.cyclotomic import CycAccumulator, CycValue, cyc_ops


def zeta(k, level=1, p=5):
    return CycValue.root(p, level, k)


def test_sum_of_all_fifth_roots_is_zero():
    total = CycValue.zero()
    for k in range(5):
        total = cyc_ops("add", total, zeta(k))
    assert total.is_zero()
    assert total == 0


def test_exponents_add_mod_p():
    assert cyc_ops("mul", zeta(2), zeta(4)) == zeta(1)


def test_level_embedding():
    assert cyc_ops("eq", zeta(5, level=2), zeta(1))
    assert zeta(5, level=2).level == 1


def test_top_digit_is_rewritten():
    # zeta^4 = -(1 + zeta + zeta^2 + zeta^3)
    value = zeta(4)
    assert dict(value.coeffs) == {0: Fraction(-1), 1: Fraction(-1), 2: Fraction(-1), 3: Fraction(-1)}


def test_quadratic_gauss_sum():
    g = zeta(1) + zeta(4) - zeta(2) - zeta(3)
    assert g * g == 5
    assert g.abs2() == 5
    assert g.is_rational() is False


def test_conjugation_and_modulus():
    z = zeta(1)
    assert z.conj() == zeta(4)
    assert z.abs2() == 1
    assert float((z + z.conj()).real_value()) == pytest.approx(float(2 * mpmath.cos(2 * mpmath.pi / 5)))


def test_rational_values():
    half = CycValue.rational(Fraction(1, 2))
    assert half.is_rational()
    assert half.to_fraction() == Fraction(1, 2)
    assert half.scaled(4) == 2


def test_to_fraction_rejects_irrational():
    with pytest.raises(ValueError):
        zeta(1).to_fraction()


def test_json_block():
    value = zeta(3).scaled(Fraction(1, 6))
    data = value.to_json()
    assert data == {"level": 1, "p": 5, "coeffs": {"3": "1/6"}, "scale": "1"}
    assert CycValue.from_json(data) == value


def test_mixed_primes_rejected():
    with pytest.raises(ValueError):
        zeta(1) + CycValue.root(7, 1, 1)


def test_accumulator_raises_levels():
    acc = CycAccumulator(5)
    acc.add_root(1, 2)
    acc.add_root(2, 10)
    acc.add_root(0, 0, 3)
    assert acc.value() == zeta(2) * 2 + 3
    assert acc.value(Fraction(1, 5)) == (zeta(2) * 2 + 3).scaled(Fraction(1, 5))


@pytest.mark.parametrize("p, level", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1)])
def test_canonical_form_is_remainder_mod_cyclotomic_polynomial(p, level):
    z = sympy.Symbol("z")
    n = p**level
    rng = random.Random(n)
    for _ in range(5):
        coeffs = {rng.randrange(n): Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(6)}
        poly = sum((sympy.Rational(c.numerator, c.denominator) * z**k for k, c in coeffs.items()), sympy.Integer(0))
        remainder = sympy.Poly(sympy.rem(poly, sympy.cyclotomic_poly(n, z), z), z)
        expected = {k: Fraction(str(c)) for (k,), c in remainder.terms() if c}
        assert CycValue.from_map(p, level, coeffs).at_level(p, level) == expected
