"""
Exact values in the group algebra of Z/p^m Z over the rationals.

A CycValue is a rational linear combination of p^m-th roots of unity. It is
kept in a canonical form so that equality is plain coefficient comparison:

- exponents whose top base-p digit is p-1 are rewritten with the relation
  sum_{i<p} zeta^(r + i*p^(m-1)) = 0, leaving the power basis of Q(zeta_{p^m});
- the level is lowered while every exponent is divisible by p;
- level 0 values are rationals and carry no prime (p = 0).
"""

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Tuple, Union

import mpmath

Rational = Union[int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True)
class CycValue:
    """Exact cyclotomic number sum_k coeffs[k] * zeta_{p^level}^k, times scale."""

    p: int
    level: int
    coeffs: Tuple[Tuple[int, Fraction], ...]
    scale: Fraction = Fraction(1)

    # construction

    @classmethod
    def rational(cls, value: Rational) -> "CycValue":
        value = _as_fraction(value)
        return cls(0, 0, ((0, value),) if value else ())

    @classmethod
    def zero(cls) -> "CycValue":
        return cls(0, 0, ())

    @classmethod
    def one(cls) -> "CycValue":
        return cls.rational(1)

    @classmethod
    def root(cls, p: int, level: int, k: int) -> "CycValue":
        """zeta_{p^level}^k in canonical form."""
        if level == 0:
            return cls.one()
        return cls.from_map(p, level, {k % p**level: Fraction(1)})

    @classmethod
    def from_map(cls, p: int, level: int, coeffs: Dict[int, Rational], scale: Rational = 1) -> "CycValue":
        raw = cls(p, level, tuple(sorted((k, _as_fraction(c)) for k, c in coeffs.items())), _as_fraction(scale))
        return raw.canon()

    # canonical form

    def canon(self) -> "CycValue":
        if self.level == 0:
            total = sum((c for _, c in self.coeffs), Fraction(0)) * self.scale
            return CycValue(0, 0, ((0, total),) if total else ())
        p, m = self.p, self.level
        modulus = p**m
        step = p ** (m - 1)
        top = (p - 1) * step
        reduced: Dict[int, Fraction] = defaultdict(Fraction)
        for k, c in self.coeffs:
            if not c:
                continue
            k %= modulus
            c = c * self.scale
            if k >= top:
                r = k - top
                for i in range(p - 1):
                    reduced[r + i * step] -= c
            else:
                reduced[k] += c
        items = {k: c for k, c in reduced.items() if c}
        while m > 0 and all(k % p == 0 for k in items):
            items = {k // p: c for k, c in items.items()}
            m -= 1
        if m == 0:
            total = items.get(0, Fraction(0))
            return CycValue(0, 0, ((0, total),) if total else ())
        return CycValue(p, m, tuple(sorted(items.items())))

    # accessors

    def as_dict(self) -> Dict[int, Fraction]:
        return {k: c * self.scale for k, c in self.coeffs}

    def is_zero(self) -> bool:
        return not self.canon().coeffs

    def is_rational(self) -> bool:
        return self.canon().level == 0

    def to_fraction(self) -> Fraction:
        value = self.canon()
        if value.level != 0:
            raise ValueError("value is not rational")
        return value.coeffs[0][1] if value.coeffs else Fraction(0)

    def at_level(self, p: int, level: int) -> Dict[int, Fraction]:
        """Coefficients with exponents embedded at a higher level."""
        if self.level == 0:
            return {0: c * self.scale for _, c in self.coeffs}
        if p != self.p or level < self.level:
            raise ValueError(f"cannot embed level {self.level} (p={self.p}) into level {level} (p={p})")
        factor = p ** (level - self.level)
        return {k * factor: c * self.scale for k, c in self.coeffs}

    # arithmetic

    def _common(self, other: "CycValue") -> Tuple[int, int]:
        if self.level and other.level and self.p != other.p:
            raise ValueError(f"mixed primes {self.p} and {other.p}")
        p = self.p or other.p
        return p, max(self.level, other.level)

    def __add__(self, other) -> "CycValue":
        other = _coerce(other)
        p, level = self._common(other)
        merged: Dict[int, Fraction] = defaultdict(Fraction)
        for source in (self, other):
            for k, c in source.at_level(p, level).items():
                merged[k] += c
        return CycValue.from_map(p, level, merged) if level else CycValue.rational(merged[0])

    __radd__ = __add__

    def __neg__(self) -> "CycValue":
        return CycValue(self.p, self.level, self.coeffs, -self.scale).canon()

    def __sub__(self, other) -> "CycValue":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "CycValue":
        return _coerce(other) - self

    def __mul__(self, other) -> "CycValue":
        other = _coerce(other)
        if other.level == 0:
            return self.scaled(other.to_fraction())
        if self.level == 0:
            return other.scaled(self.to_fraction())
        p, level = self._common(other)
        modulus = p**level
        left, right = self.at_level(p, level), other.at_level(p, level)
        product: Dict[int, Fraction] = defaultdict(Fraction)
        for k1, c1 in left.items():
            for k2, c2 in right.items():
                product[(k1 + k2) % modulus] += c1 * c2
        return CycValue.from_map(p, level, product)

    __rmul__ = __mul__

    def scaled(self, factor: Rational) -> "CycValue":
        factor = _as_fraction(factor)
        return CycValue(self.p, self.level, self.coeffs, self.scale * factor).canon()

    def conj(self) -> "CycValue":
        """Complex conjugation zeta -> zeta^-1."""
        if self.level == 0:
            return self.canon()
        modulus = self.p**self.level
        return CycValue.from_map(self.p, self.level, {(-k) % modulus: c for k, c in self.as_dict().items()})

    def abs2(self) -> "CycValue":
        """|v|^2 = v * conj(v), a real (not necessarily rational) cyclotomic number."""
        return self * self.conj()

    def to_complex(self, dps: int = 30) -> mpmath.mpc:
        with mpmath.workdps(dps):
            if self.level == 0:
                return mpmath.mpc(mpmath.mpf(self.to_fraction().numerator) / self.to_fraction().denominator)
            modulus = self.p**self.level
            total = mpmath.mpc(0)
            for k, c in self.as_dict().items():
                total += mpmath.mpf(c.numerator) / c.denominator * mpmath.expjpi(mpmath.mpf(2 * k) / modulus)
            return total

    def real_value(self, dps: int = 30) -> mpmath.mpf:
        return self.to_complex(dps).real

    # equality on canonical forms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycValue.rational(other)
        if not isinstance(other, CycValue):
            return NotImplemented
        a, b = self.canon(), other.canon()
        return (a.p, a.level, a.coeffs) == (b.p, b.level, b.coeffs)

    def __hash__(self) -> int:
        a = self.canon()
        return hash((a.p, a.level, a.coeffs))

    # serialization

    def to_json(self) -> dict:
        value = self.canon()
        return {
            "level": value.level,
            "p": value.p,
            "coeffs": {str(k): str(c) for k, c in value.coeffs},
            "scale": "1",
        }

    @classmethod
    def from_json(cls, data: dict) -> "CycValue":
        coeffs = {int(k): Fraction(c) for k, c in data.get("coeffs", {}).items()}
        level = int(data.get("level", 0))
        p = int(data.get("p", 0))
        scale = Fraction(data.get("scale", "1"))
        if level == 0:
            return cls.rational(sum(coeffs.values(), Fraction(0)) * scale)
        return cls.from_map(p, level, coeffs, scale)

    def __repr__(self) -> str:
        value = self.canon()
        if value.level == 0:
            return f"CycValue({value.to_fraction()})"
        terms = " + ".join(f"{c}*z^{k}" for k, c in value.coeffs)
        return f"CycValue[{value.p}^{value.level}]({terms})"


def _coerce(value) -> CycValue:
    if isinstance(value, CycValue):
        return value
    if isinstance(value, (int, Fraction)):
        return CycValue.rational(value)
    raise TypeError(f"cannot combine CycValue with {type(value).__name__}")


def cyc_ops(op: str, u: CycValue, v: CycValue = None):
    """Dispatch form of the CycValue operations: add, mul, eq, canon."""
    if op == "add":
        return u + v
    if op == "mul":
        return u * v
    if op == "eq":
        return u == v
    if op == "canon":
        return u.canon()
    raise ValueError(f"unknown operation: {op}")


class CycAccumulator:
    """
    Mutable builder for large sums of roots of unity.

    Terms are kept at the highest level seen so far; the canonical value is
    formed once in `value()`.
    """

    def __init__(self, p: int):
        self.p = p
        self.level = 0
        self._coeffs: Dict[int, Fraction] = defaultdict(int)

    def _raise_to(self, level: int) -> None:
        if level <= self.level:
            return
        factor = self.p ** (level - self.level)
        raised: Dict[int, Fraction] = defaultdict(int)
        for k, c in self._coeffs.items():
            raised[k * factor] += c
        self._coeffs = raised
        self.level = level

    def add_root(self, level: int, k: int, weight: Rational = 1) -> None:
        self._raise_to(level)
        self._coeffs[(k * self.p ** (self.level - level)) % self.p**self.level] += weight

    def add(self, value: CycValue, weight: Rational = 1) -> None:
        if value.level:
            self._raise_to(value.level)
        for k, c in value.at_level(self.p, self.level).items():
            self._coeffs[k] += c * weight

    def extend(self, values: Iterable[CycValue]) -> None:
        for value in values:
            self.add(value)

    def value(self, scale: Rational = 1) -> CycValue:
        if self.level == 0:
            return CycValue.rational(_as_fraction(self._coeffs.get(0, 0)) * _as_fraction(scale))
        return CycValue.from_map(self.p, self.level, dict(self._coeffs), scale)
