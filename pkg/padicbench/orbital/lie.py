"""
sl2 over a local field: elements, trace form, bracket, discriminants.

Y = a H + b E + c F is the matrix [[a, b], [c, -a]].
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from padicbench.errors import InsufficientPrecision, NotRegular
from padicbench.localfield import FieldSpec, TruncatedElement
from padicbench.moyprasad import char_poly_coefficients, sl2_model

logger = logging.getLogger(__name__)

Matrix2 = Tuple[Tuple[TruncatedElement, TruncatedElement], Tuple[TruncatedElement, TruncatedElement]]


class OrbitType(str, Enum):
    REGULAR_SEMISIMPLE = "regular-semisimple"
    NILPOTENT = "nilpotent-nonzero"
    ZERO = "zero"
    UNDECIDED = "undecided"


class SquareClass(str, Enum):
    SPLIT = "split"
    UNRAMIFIED_ELLIPTIC = "unramified-elliptic"
    RAMIFIED_ELLIPTIC = "ramified-elliptic"


@dataclass(frozen=True)
class LieElement:
    a: TruncatedElement
    b: TruncatedElement
    c: TruncatedElement

    @classmethod
    def from_coords(cls, coords: Sequence[TruncatedElement]) -> "LieElement":
        a, b, c = coords
        return cls(a, b, c)

    @classmethod
    def from_ints(cls, field: FieldSpec, a: int, b: int, c: int) -> "LieElement":
        return cls(field.from_int(a), field.from_int(b), field.from_int(c))

    @classmethod
    def basis(cls, field: FieldSpec, name: str) -> "LieElement":
        coords = {"H": (1, 0, 0), "E": (0, 1, 0), "F": (0, 0, 1)}[name]
        return cls.from_ints(field, *coords)

    @classmethod
    def zero(cls, field: FieldSpec) -> "LieElement":
        return cls(field.zero(), field.zero(), field.zero())

    @property
    def field(self) -> FieldSpec:
        return self.a.field

    @property
    def coords(self) -> Tuple[TruncatedElement, TruncatedElement, TruncatedElement]:
        return self.a, self.b, self.c

    @property
    def is_zero(self) -> bool:
        return all(x.is_exact_zero for x in self.coords)

    def __add__(self, other: "LieElement") -> "LieElement":
        return LieElement(self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return LieElement(self.a - other.a, self.b - other.b, self.c - other.c)

    def __neg__(self) -> "LieElement":
        return LieElement(-self.a, -self.b, -self.c)

    def scaled(self, t) -> "LieElement":
        return LieElement(self.a * t, self.b * t, self.c * t)

    def scale_by_uniformizer(self, k: int) -> "LieElement":
        return LieElement(*(x.scale_by_uniformizer(k) for x in self.coords))

    def min_valuation(self) -> Optional[int]:
        """A certified lower bound for min ord of the coordinates; None for the exact zero."""
        bounds = [x.valuation for x in self.coords if x.valuation is not None]
        return min(bounds) if bounds else None

    def minord(self) -> Optional[int]:
        """The exact minimum coordinate valuation (None for zero), raising when undecided."""
        known = [x.valuation for x in self.coords if x.is_nonzero]
        bounds = [x.valuation for x in self.coords if x.is_bigoh]
        if not known:
            if bounds:
                raise InsufficientPrecision("no coordinate is certified nonzero")
            return None
        low = min(known)
        for index, x in enumerate(self.coords):
            if x.is_bigoh and x.valuation < low:
                raise InsufficientPrecision("a bounded zero coordinate may undercut the minimum", coordinate=index)
        return low

    def invariant(self) -> TruncatedElement:
        """q(Y) = a^2 + bc = -det(Y)."""
        return self.a * self.a + self.b * self.c

    def matrix(self) -> Matrix2:
        return (self.a, self.b), (self.c, -self.a)

    def to_json(self) -> dict:
        return {name: x.to_json() for name, x in zip("abc", self.coords)}

    def __repr__(self) -> str:
        return f"LieElement(a={self.a!r}, b={self.b!r}, c={self.c!r})"


def trace_form(x: LieElement, y: LieElement) -> TruncatedElement:
    """<X, Y> = Tr(XY) = 2 a a' + b c' + c b'."""
    if x.field.p == 2:
        raise ValueError("the trace form is used for p > 2 only")
    return x.a * y.a * 2 + x.b * y.c + x.c * y.b


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """[X, Y] from [H, E] = 2E, [H, F] = -2F, [E, F] = H."""
    return LieElement(
        x.b * y.c - x.c * y.b,
        (x.a * y.b - x.b * y.a) * 2,
        (x.c * y.a - x.a * y.c) * 2,
    )


def ad_matrix(y: LieElement) -> List[List[TruncatedElement]]:
    return sl2_model().ad_matrix(list(y.coords))


def discriminant(y: LieElement) -> TruncatedElement:
    """Coefficient of t in det(tI - ad Y); equals -4 (a^2 + bc)."""
    coeffs = char_poly_coefficients(ad_matrix(y))
    return coeffs[1]


def classify(y: LieElement) -> OrbitType:
    if y.is_zero:
        return OrbitType.ZERO
    q = y.invariant()
    if q.is_nonzero:
        return OrbitType.REGULAR_SEMISIMPLE
    if q.is_exact_zero:
        return OrbitType.NILPOTENT
    return OrbitType.UNDECIDED


def require_regular(y: LieElement) -> TruncatedElement:
    """The invariant q(Y), raising NotRegular unless Y is certified regular semisimple."""
    kind = classify(y)
    if kind != OrbitType.REGULAR_SEMISIMPLE:
        raise NotRegular(f"element is {kind.value}, not regular semisimple")
    return y.invariant()


def square_class(y: LieElement) -> SquareClass:
    """Split when q(Y) is a square (the centralizer torus is split), else elliptic."""
    q = require_regular(y)
    if q.sqrt() is not None:
        return SquareClass.SPLIT
    if q.valuation % 2 == 0:
        return SquareClass.UNRAMIFIED_ELLIPTIC
    return SquareClass.RAMIFIED_ELLIPTIC


def adjoint(k: Matrix2, y: LieElement) -> LieElement:
    """Ad(k) Y = k Y k^-1 for k = [[x, s], [z, w]] in SL2."""
    (x, s), (z, w) = k
    a, b, c = y.coords
    return LieElement(
        a * (x * w + s * z) + s * c * w - x * b * z,
        x * x * b - x * s * a * 2 - s * s * c,
        z * w * a * 2 + w * w * c - z * z * b,
    )


def group_discriminant(k: Matrix2) -> TruncatedElement:
    """
    D_G(g): coefficient of t in det((t + 1) I - Ad(g)) on the adjoint
    representation; for g = diag(l, 1/l) it is -(l - 1/l)^2.
    """
    field = k[0][0].field
    images = [adjoint(k, LieElement.basis(field, name)).coords for name in "HEF"]
    ad = [[images[col][row] for col in range(3)] for row in range(3)]
    c1, c2, _ = char_poly_coefficients(ad)
    # det((t+1)I - A) = chi(t+1) with chi(s) = s^3 + c1 s^2 + c2 s + c3
    return c1 * 2 + c2 + 3
