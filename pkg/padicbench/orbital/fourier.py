"""
Schwartz functions on sl2 and their Fourier transforms

    f^(Y) = integral of f(X) Lambda(<X, Y>) dX,   vol(g(Omega)) = 1.

A function supported on w^lo g(Omega) and constant on cosets of w^m g(Omega)
has a transform supported on w^(c - m) g(Omega) and constant on cosets of
w^(c - lo) g(Omega), c the conductor.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Tuple

from padicbench.config import settings
from padicbench.cyclotomic import CycAccumulator, CycValue
from padicbench.errors import InsufficientPrecision
from padicbench.integrate import Scalar, q_power
from padicbench.localfield import TruncatedElement, character, residue_elements
from padicbench.orbital.lie import LieElement, trace_form

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchwartzFunction:
    """f on sl2(K), supported on w^support g(Omega), constant on w^constancy g(Omega) cosets."""

    name: str
    evaluate: Callable[[LieElement], Scalar]
    support: int
    constancy: int

    def __post_init__(self):
        if self.constancy < self.support:
            raise ValueError("constancy depth must not be below the support valuation")

    def __call__(self, z: LieElement) -> CycValue:
        value = self.evaluate(z)
        return value if isinstance(value, CycValue) else CycValue.rational(value)


def _in_lattice(z: LieElement, k: int) -> bool:
    for index, x in enumerate(z.coords):
        verdict = x.ord_at_least(k)
        if verdict is None:
            raise InsufficientPrecision(f"coordinate undecided against w^{k}", coordinate=index)
        if not verdict:
            return False
    return True


def lattice_indicator(k: int) -> SchwartzFunction:
    """1 on w^k g(Omega)."""
    return SchwartzFunction(f"1[p^{k} g]", lambda z: 1 if _in_lattice(z, k) else 0, k, k)


def coset_indicator(center: LieElement, m: int) -> SchwartzFunction:
    """1 on center + w^m g(Omega)."""
    low = center.min_valuation()
    support = m if low is None else min(low, m)
    return SchwartzFunction(
        f"1[X0 + p^{m} g]",
        lambda z: 1 if _in_lattice(z - center, m) else 0,
        support,
        m,
    )


def twisted_indicator(y: LieElement, k: int) -> SchwartzFunction:
    """Lambda(<Z, y>) on w^k g(Omega)."""
    low = y.min_valuation()
    constancy = k if low is None else max(k, settings.conductor - low)

    def evaluate(z: LieElement):
        if not _in_lattice(z, k):
            return 0
        return character(trace_form(z, y))

    return SchwartzFunction(f"Lambda<.,Y>1[p^{k} g]", evaluate, k, constancy)


def reflected(f: SchwartzFunction) -> SchwartzFunction:
    """Z -> f(-Z)."""
    return SchwartzFunction(f"{f.name}(-.)", lambda z: f.evaluate(-z), f.support, f.constancy)


def dilated(f: SchwartzFunction, k: int) -> SchwartzFunction:
    """Z -> f(w^k Z)."""
    return SchwartzFunction(
        f"{f.name}(p^{k} .)",
        lambda z: f.evaluate(z.scale_by_uniformizer(k)),
        f.support - k,
        f.constancy - k,
    )


def cosets(field, lo: int, hi: int):
    """Every coset of w^hi g(Omega) inside w^lo g(Omega), as LieElements."""
    axis = list(residue_elements(field, lo, hi))
    for a, b, c in product(axis, repeat=3):
        yield LieElement(a, b, c)


def _certified_minord_below(y: LieElement, bound: int) -> bool:
    """True when some coordinate of Y certainly has ord < bound, False when all have ord >= bound."""
    for x in y.coords:
        if x.is_nonzero and x.valuation < bound:
            return True
    for index, x in enumerate(y.coords):
        if x.ord_at_least(bound) is None:
            raise InsufficientPrecision(f"coordinate of Y undecided against w^{bound}", coordinate=index)
    return False


def fourier_test(f: SchwartzFunction, y: LieElement) -> CycValue:
    """
    f^(Y) as the exact coset sum q^(-3m) sum_C f(C) Lambda(<C, Y>) over the
    depth-m cosets of the support, m = f.constancy. It vanishes outright when
    Lambda(<., Y>) is nontrivial on w^m g(Omega).
    """
    c = settings.conductor
    m, lo = f.constancy, f.support
    if _certified_minord_below(y, c - m):
        return CycValue.zero()
    field = y.field
    acc = CycAccumulator(field.p)
    for coset in cosets(field, lo, m):
        value = f(coset)
        if value.is_zero():
            continue
        chi = character(trace_form(coset, y))
        if value.is_rational():
            acc.add(chi, value.to_fraction())
        else:
            acc.add(value * chi)
    return acc.value(q_power(field.q, 3 * m))


def fourier_transform(f: SchwartzFunction) -> SchwartzFunction:
    """f^ as a Schwartz function; values are cached per coset of its constancy lattice."""
    c = settings.conductor
    support, constancy = c - f.constancy, c - f.support
    cache: Dict[Tuple[TruncatedElement, ...], CycValue] = {}

    def evaluate(y: LieElement) -> CycValue:
        if _certified_minord_below(y, support):
            return CycValue.zero()
        key = tuple(x.truncate(constancy) for x in y.coords)
        value = cache.get(key)
        if value is None:
            value = cache[key] = fourier_test(f, LieElement.from_coords(key))
        return value

    return SchwartzFunction(f"({f.name})^", evaluate, support, constancy)


def corpus(field) -> Dict[str, SchwartzFunction]:
    """Test functions used by the double-transform self-check."""
    h = LieElement.basis(field, "H")
    e = LieElement.basis(field, "E")
    f = LieElement.basis(field, "F")
    w_inv_e = e.scale_by_uniformizer(-1)
    return {
        "unit-lattice": lattice_indicator(0),
        "deep-lattice": lattice_indicator(1),
        "wide-lattice": lattice_indicator(-1),
        "coset-H": coset_indicator(h + f.scale_by_uniformizer(1), 1),
        "twisted-E": twisted_indicator(w_inv_e, 1),
    }


def double_transform_defect(f: SchwartzFunction, x: LieElement) -> CycValue:
    """f^^(X) - q^-3 f(-X); zero for every Schwartz function."""
    q = x.field.q
    twice = fourier_test(fourier_transform(f), x)
    return twice - f(-x).scaled(Fraction(1, q**3))
