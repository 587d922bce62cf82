"""
Truncated arithmetic in Q_p and F_p((t)).

A TruncatedElement is a coset x + p^N of the valuation ring's ideal powers,
stored as a valuation and a digit sequence:

    x = sum_{i < m} d_i * w^(v + i)      (w the uniformizer, d_0 != 0)

known modulo w^(v + m). Two degenerate forms exist: the exact zero
(valuation None) and the bounded zero O(w^k), an element only known to lie
in w^k Omega (valuation k, no digits).

Operator arithmetic (+, -, *, /) is lenient and may return bounded zeros.
`arith` is the certified entry point: it raises InsufficientPrecision when the
leading digit of the result is not determined by the inputs.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from sympy import isprime
from sympy.ntheory import is_quad_residue, sqrt_mod

from padicbench.config import settings
from padicbench.cyclotomic import CycValue
from padicbench.errors import DivisionByZero, InsufficientPrecision, LevelCapExceeded

logger = logging.getLogger(__name__)


ZERO_CHAR = "zero"
POSITIVE_CHAR = "pos"


@dataclass(frozen=True)
class FieldSpec:
    """A local field with prime residue field F_p: Q_p (char zero) or F_p((t)) (char pos)."""

    p: int
    char: str = ZERO_CHAR
    residue_degree: int = 1

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.char not in (ZERO_CHAR, POSITIVE_CHAR):
            raise ValueError(f"characteristic flag must be 'zero' or 'pos', got {self.char!r}")
        if self.residue_degree != 1:
            raise ValueError("only residue degree 1 is supported")

    @property
    def q(self) -> int:
        return self.p ** self.residue_degree

    @property
    def is_padic(self) -> bool:
        return self.char == ZERO_CHAR

    def name(self) -> str:
        return f"Q{self.p}" if self.is_padic else f"F{self.p}((t))"

    def residues(self) -> range:
        return range(self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "char": self.char}

    # constructors

    def zero(self) -> "TruncatedElement":
        return TruncatedElement(self, None, ())

    def bigoh(self, k: int) -> "TruncatedElement":
        return TruncatedElement(self, k, ())

    def one(self) -> "TruncatedElement":
        return self.from_int(1)

    def uniformizer(self, precision: Optional[int] = None) -> "TruncatedElement":
        m = precision or settings.precision_cap
        return TruncatedElement(self, 1, (1,) + (0,) * (m - 1))

    def from_int(self, n: int, precision: Optional[int] = None) -> "TruncatedElement":
        """Exact integer, padded to `precision` relative digits."""
        m = precision or settings.precision_cap
        if self.is_padic:
            if n == 0:
                return self.zero()
            v = 0
            while n % self.p == 0:
                n //= self.p
                v += 1
            return TruncatedElement(self, v, _int_digits(n % self.p**m, self.p, m))
        n %= self.p
        if n == 0:
            return self.zero()
        return TruncatedElement(self, 0, (n,) + (0,) * (m - 1))

    def from_rational(self, value: Union[int, Fraction, str], precision: Optional[int] = None) -> "TruncatedElement":
        value = Fraction(value)
        numerator = self.from_int(value.numerator, precision)
        if value.denominator == 1:
            return numerator
        return arith("mul", numerator, arith("inv", self.from_int(value.denominator, precision)))

    def from_digits(
        self, valuation: int, digits: Sequence[int], negate: bool = False
    ) -> "TruncatedElement":
        """
        The coset sum_i digits[i] * w^(valuation + i) + O(w^(valuation + len(digits))).

        Leading zero digits are allowed and normalized away.
        """
        digits = [d % self.p for d in digits]
        element = _normalize(self, valuation, digits)
        return -element if negate else element

    def from_json(self, data: dict) -> "TruncatedElement":
        if data.get("val") is None:
            return self.zero()
        return self.from_digits(int(data["val"]), data.get("digits", []))

    @classmethod
    def parse(cls, data: dict) -> "FieldSpec":
        return cls(int(data["p"]), data.get("char", ZERO_CHAR))


def _int_digits(n: int, p: int, m: int) -> Tuple[int, ...]:
    out = []
    for _ in range(m):
        n, d = divmod(n, p)
        out.append(d)
    return tuple(out)


def _digits_int(digits: Sequence[int], p: int) -> int:
    n = 0
    for d in reversed(digits):
        n = n * p + d
    return n


def _normalize(field: FieldSpec, lo: int, digits: Sequence[int]) -> "TruncatedElement":
    """Element from a digit vector starting at w^lo, known modulo w^(lo + len)."""
    for i, d in enumerate(digits):
        if d:
            return TruncatedElement(field, lo + i, tuple(digits[i:]))
    return TruncatedElement(field, lo + len(digits), ())


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int, m: int) -> List[int]:
    out = [0] * m
    for i, x in enumerate(a[:m]):
        if x:
            for j, y in enumerate(b[: m - i]):
                out[i + j] += x * y
    return [c % p for c in out]


def _poly_inv(a: Sequence[int], p: int, m: int) -> List[int]:
    inv0 = pow(a[0], -1, p)
    out = [inv0] + [0] * (m - 1)
    for n in range(1, m):
        acc = sum(a[i] * out[n - i] for i in range(1, min(n, len(a) - 1) + 1))
        out[n] = (-acc * inv0) % p
    return out


@dataclass(frozen=True)
class TruncatedElement:
    field: FieldSpec
    valuation: Optional[int]
    digits: Tuple[int, ...] = dataclass_field(default=())

    # shape

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation is None

    @property
    def is_bigoh(self) -> bool:
        return self.valuation is not None and not self.digits

    @property
    def is_nonzero(self) -> bool:
        return bool(self.digits)

    @property
    def precision(self) -> int:
        """Relative precision: number of known digits."""
        return len(self.digits)

    @property
    def absolute_precision(self) -> Optional[int]:
        """N with the element known modulo w^N; None for the exact zero."""
        if self.valuation is None:
            return None
        return self.valuation + len(self.digits)

    def digit(self, i: int) -> int:
        """Coefficient of w^i, raising when that position is not known."""
        if self.valuation is None:
            return 0
        if i >= self.absolute_precision:
            raise InsufficientPrecision(f"digit at w^{i} unknown (known modulo w^{self.absolute_precision})")
        if i < self.valuation:
            return 0
        return self.digits[i - self.valuation]

    def ord_at_least(self, k: int) -> Optional[bool]:
        """Three-valued test of ord(x) >= k: True, False, or None when undecided."""
        if self.valuation is None:
            return True
        if self.digits:
            return self.valuation >= k
        return True if self.valuation >= k else None

    def min_valuation(self) -> int:
        """A certified lower bound for ord(x); large for the exact zero."""
        if self.valuation is None:
            return 10**9
        return self.valuation

    def truncate(self, n: int) -> "TruncatedElement":
        """Forget digits at w^n and beyond."""
        if self.valuation is None:
            return self.field.bigoh(n)
        if n <= self.valuation:
            return self.field.bigoh(min(n, self.absolute_precision))
        return TruncatedElement(self.field, self.valuation, self.digits[: n - self.valuation])

    def residue_vector(self, lo: int, hi: int) -> Tuple[int, ...]:
        """Digits at positions lo..hi-1 (zeros below the valuation)."""
        return tuple(self.digit(i) for i in range(lo, hi))

    # kernel helpers

    def _window(self, lo: int, hi: int) -> List[int]:
        """Digit vector at positions lo..hi-1, requiring lo <= valuation."""
        if self.valuation is None:
            return [0] * (hi - lo)
        out = [0] * (hi - lo)
        for i, d in enumerate(self.digits):
            pos = self.valuation + i - lo
            if 0 <= pos < hi - lo:
                out[pos] = d
        return out

    # arithmetic

    def __add__(self, other) -> "TruncatedElement":
        other = self._coerce(other)
        if self.valuation is None:
            return other
        if other.valuation is None:
            return self
        hi = min(self.absolute_precision, other.absolute_precision)
        lo = min(self.valuation, other.valuation)
        if hi <= lo:
            return self.field.bigoh(hi)
        a, b = self._window(lo, hi), other._window(lo, hi)
        p = self.field.p
        if self.field.is_padic:
            total = (_digits_int(a, p) + _digits_int(b, p)) % p ** (hi - lo)
            return _normalize(self.field, lo, _int_digits(total, p, hi - lo))
        return _normalize(self.field, lo, [(x + y) % p for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> "TruncatedElement":
        if not self.digits:
            return self
        p = self.field.p
        m = len(self.digits)
        if self.field.is_padic:
            n = (-_digits_int(self.digits, p)) % p**m
            return TruncatedElement(self.field, self.valuation, _int_digits(n, p, m))
        return TruncatedElement(self.field, self.valuation, tuple((-d) % p for d in self.digits))

    def __sub__(self, other) -> "TruncatedElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TruncatedElement":
        other = self._coerce(other)
        if self.valuation is None or other.valuation is None:
            return self.field.zero()
        if not self.digits or not other.digits:
            return self.field.bigoh(self.valuation + other.valuation)
        v = self.valuation + other.valuation
        m = min(len(self.digits), len(other.digits))
        p = self.field.p
        if self.field.is_padic:
            n = (_digits_int(self.digits[:m], p) * _digits_int(other.digits[:m], p)) % p**m
            return TruncatedElement(self.field, v, _int_digits(n, p, m))
        return TruncatedElement(self.field, v, tuple(_poly_mul(self.digits, other.digits, p, m)))

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedElement":
        if self.valuation is None:
            raise DivisionByZero("inverse of the exact zero")
        if not self.digits:
            raise InsufficientPrecision(f"inverse of O(w^{self.valuation}): leading digit unknown")
        m = len(self.digits)
        p = self.field.p
        if self.field.is_padic:
            n = pow(_digits_int(self.digits, p), -1, p**m)
            digits = _int_digits(n, p, m)
        else:
            digits = tuple(_poly_inv(self.digits, p, m))
        return TruncatedElement(self.field, -self.valuation, digits)

    def __truediv__(self, other) -> "TruncatedElement":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "TruncatedElement":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "TruncatedElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale_by_uniformizer(self, k: int) -> "TruncatedElement":
        """w^k * x, exact in the valuation."""
        if self.valuation is None:
            return self
        return TruncatedElement(self.field, self.valuation + k, self.digits)

    def _coerce(self, other) -> "TruncatedElement":
        if isinstance(other, TruncatedElement):
            if other.field != self.field:
                raise ValueError(f"mixed fields {self.field.name()} and {other.field.name()}")
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        if isinstance(other, Fraction):
            return self.field.from_rational(other)
        raise TypeError(f"cannot combine TruncatedElement with {type(other).__name__}")

    # valuation interface

    def ord_ac(self) -> Tuple[Optional[int], int]:
        """(ord, ac) with ord(0) = None standing for infinity and ac(0) = 0."""
        if self.valuation is None:
            return None, 0
        if not self.digits:
            raise InsufficientPrecision(f"O(w^{self.valuation}) has no certified leading digit")
        return self.valuation, self.digits[0]

    def sqrt(self) -> Optional["TruncatedElement"]:
        """
        A square root by Hensel lifting (p odd), or None when x is certified
        not to be a square. The returned root has ac in the lower half-range
        chosen by sympy's sqrt_mod.
        """
        p = self.field.p
        if p == 2:
            raise ValueError("square roots are implemented for odd p only")
        if self.valuation is None:
            return self
        if not self.digits:
            raise InsufficientPrecision(f"square root of O(w^{self.valuation})")
        if self.valuation % 2 or not is_quad_residue(self.digits[0], p):
            return None
        m = len(self.digits)
        r0 = sqrt_mod(self.digits[0], p)
        if self.field.is_padic:
            u = _digits_int(self.digits, p)
            r = r0
            k = 1
            while k < m:
                k = min(2 * k, m)
                mod = p**k
                r = (r - (r * r - u) * pow(2 * r, -1, mod)) % mod
            digits = _int_digits(r, p, m)
        else:
            u = list(self.digits)
            r = [r0] + [0] * (m - 1)
            inv2r0 = pow(2 * r0, -1, p)
            for n in range(1, m):
                acc = sum(r[i] * r[n - i] for i in range(1, n))
                r[n] = ((u[n] - acc) * inv2r0) % p
            digits = tuple(r)
        return TruncatedElement(self.field, self.valuation // 2, digits)

    def refinements(self) -> List["TruncatedElement"]:
        """The q cosets of w^(N+1) Omega inside x + w^N Omega, N the absolute precision."""
        if self.valuation is None:
            raise ValueError("the exact zero has no coset refinements")
        n = self.absolute_precision
        lo = self.valuation
        head = self._window(lo, n)
        return [_normalize(self.field, lo, head + [d]) for d in range(self.field.p)]

    # serialization

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "char": self.field.char,
            "val": self.valuation,
            "digits": list(self.digits),
        }

    def __repr__(self) -> str:
        if self.valuation is None:
            return f"{self.field.name()}(0)"
        if not self.digits:
            return f"{self.field.name()}(O(w^{self.valuation}))"
        return f"{self.field.name()}(w^{self.valuation}*{list(self.digits)})"


def arith(op: str, a: TruncatedElement, b: Optional[TruncatedElement] = None) -> TruncatedElement:
    """
    Certified field operation: add, sub, mul, neg or inv.

    Raises InsufficientPrecision when the result is a bounded zero produced
    from nonzero operands, i.e. its leading digit cannot be certified.
    """
    if op == "add":
        result = a + b
    elif op == "sub":
        result = a - b
    elif op == "mul":
        result = a * b
    elif op == "neg":
        result = -a
    elif op == "inv":
        return a.inverse()
    else:
        raise ValueError(f"unknown operation: {op}")
    if result.is_bigoh:
        raise InsufficientPrecision(
            f"{op} cancelled through all known digits; result known only as O(w^{result.valuation})"
        )
    return result


def ord_ac(a: TruncatedElement) -> Tuple[Optional[int], int]:
    return a.ord_ac()


def character(a: TruncatedElement, conductor: Optional[int] = None) -> CycValue:
    """
    The fixed additive character with conductor w^c (c = settings.conductor).

    F_p((t)): zeta_p^(coefficient of t^(c-1)).
    Q_p:      exp(2 pi i {a / p^c}_p), the p-power fractional part of a / p^c.

    Both are trivial on w^c Omega and agree with exp(2 pi i xbar / p) on Omega
    when c = 1.
    """
    c = settings.conductor if conductor is None else conductor
    if a.valuation is None or a.valuation >= c:
        return CycValue.one()
    if a.absolute_precision < c:
        raise InsufficientPrecision(
            f"character needs a modulo w^{c}, known only modulo w^{a.absolute_precision}"
        )
    p = a.field.p
    if not a.field.is_padic:
        return CycValue.root(p, 1, a.digit(c - 1))
    level = c - a.valuation
    if level > settings.level_cap:
        raise LevelCapExceeded(f"character value needs level {level} > cap {settings.level_cap}")
    k = _digits_int(a.digits[:level], p)
    return CycValue.root(p, level, k)


def character_exponent(a: TruncatedElement, conductor: Optional[int] = None) -> Tuple[int, int]:
    """(level, k) with character(a) = zeta_{p^level}^k, without building a CycValue."""
    c = settings.conductor if conductor is None else conductor
    if a.valuation is None or a.valuation >= c:
        return 0, 0
    if a.absolute_precision < c:
        raise InsufficientPrecision(
            f"character needs a modulo w^{c}, known only modulo w^{a.absolute_precision}"
        )
    p = a.field.p
    if not a.field.is_padic:
        return 1, a.digit(c - 1)
    level = c - a.valuation
    if level > settings.level_cap:
        raise LevelCapExceeded(f"character value needs level {level} > cap {settings.level_cap}")
    return level, _digits_int(a.digits[:level], p)


def residue_elements(field: FieldSpec, lo: int, hi: int) -> Iterator[TruncatedElement]:
    """All cosets of w^hi Omega inside w^lo Omega, in lexicographic digit order."""
    n = hi - lo
    p = field.p
    for index in range(p**n):
        yield _normalize(field, lo, _int_digits(index, p, n))
