"""
Finite quotients Omega/p^m and the SL2 action on sl2 residues.

Elements of Omega/p^m are encoded as integers whose base-p digits are the
w-adic digits. For Q_p the encoding is the integer residue itself, so ring
operations are integer operations mod p^m; for F_p((t)) the same integers are
digit vectors and operations are carry-free.
"""

import logging
from collections import Counter, deque
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from padicbench.cyclotomic import CycValue
from padicbench.errors import InsufficientPrecision
from padicbench.localfield import (
    FieldSpec,
    TruncatedElement,
    _digits_int,
    _int_digits,
    character_exponent,
)

logger = logging.getLogger(__name__)

Triple = Tuple[int, int, int]


class ResidueRing:
    """Omega/p^m for one local field."""

    def __init__(self, field: FieldSpec, m: int):
        self.field = field
        self.m = m
        self.p = field.p
        self.size = self.p**m

    def _vec(self, x: int) -> List[int]:
        return list(_int_digits(x, self.p, self.m))

    def _int(self, digits: Sequence[int]) -> int:
        return _digits_int(digits, self.p)

    def add(self, x: int, y: int) -> int:
        if self.field.is_padic:
            return (x + y) % self.size
        return self._int([(a + b) % self.p for a, b in zip(self._vec(x), self._vec(y))])

    def neg(self, x: int) -> int:
        if self.field.is_padic:
            return (-x) % self.size
        return self._int([(-a) % self.p for a in self._vec(x)])

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if self.field.is_padic:
            return (x * y) % self.size
        a, b = self._vec(x), self._vec(y)
        out = [0] * self.m
        for i, u in enumerate(a):
            if u:
                for j in range(self.m - i):
                    out[i + j] += u * b[j]
        return self._int([c % self.p for c in out])

    def mul_int(self, x: int, k: int) -> int:
        """x times the image of the rational integer k."""
        if self.field.is_padic:
            return (x * k) % self.size
        return self._int([(a * k) % self.p for a in self._vec(x)])

    def shift(self, x: int, i: int) -> int:
        """w^i * x; digit shift in both characteristics."""
        return (x * self.p**i) % self.size

    def is_unit(self, x: int) -> bool:
        return x % self.p != 0

    def inv(self, x: int) -> int:
        if not self.is_unit(x):
            raise ValueError(f"{x} is not a unit in Omega/p^{self.m}")
        if self.field.is_padic:
            return pow(x, -1, self.size)
        a = self._vec(x)
        inv0 = pow(a[0], -1, self.p)
        out = [inv0] + [0] * (self.m - 1)
        for n in range(1, self.m):
            acc = sum(a[i] * out[n - i] for i in range(1, n + 1))
            out[n] = (-acc * inv0) % self.p
        return self._int(out)

    def elements(self) -> range:
        return range(self.size)

    def units(self) -> Iterator[int]:
        return (x for x in range(self.size) if x % self.p)

    def to_element(self, x: int, shift: int = 0) -> TruncatedElement:
        """The coset w^shift * x + p^(shift + m)."""
        return self.field.from_digits(shift, self._vec(x))

    def from_element(self, element: TruncatedElement, shift: int = 0) -> int:
        """Digits of element at positions shift .. shift+m-1 as an encoded residue."""
        if element.valuation is not None and element.valuation < shift:
            raise ValueError(f"element of valuation {element.valuation} is not in p^{shift}")
        return self._int(element.residue_vector(shift, shift + self.m))


def sl2_order(p: int, m: int) -> int:
    """|SL2(Omega/p^m)| = p^(3m) (1 - p^-2)."""
    return p ** (3 * m) - p ** (3 * m - 2)


def sl2_elements(ring: ResidueRing) -> Iterator[Tuple[int, int, int, int]]:
    """Every ((x, y), (z, w)) in SL2(Omega/p^m) exactly once."""
    for x in ring.elements():
        if ring.is_unit(x):
            x_inv = ring.inv(x)
            for y in ring.elements():
                for z in ring.elements():
                    w = ring.mul(ring.add(1 % ring.size, ring.mul(y, z)), x_inv)
                    yield x, y, z, w
        else:
            for z in ring.units():
                z_inv = ring.inv(z)
                for w in ring.elements():
                    y = ring.mul(ring.sub(ring.mul(x, w), 1 % ring.size), z_inv)
                    yield x, y, z, w


class Sl2ResidueModule:
    """
    The sl2 residues p^lo g(Omega) / p^hi g(Omega) with the adjoint action of
    SL2(Omega). Triples (a, b, c) are coordinates in the basis H, E, F, each
    encoded in Omega/p^(hi - lo).
    """

    def __init__(self, field: FieldSpec, lo: int, hi: int):
        if hi <= lo:
            raise ValueError(f"empty residue window [{lo}, {hi})")
        self.field = field
        self.lo = lo
        self.hi = hi
        self.ring = ResidueRing(field, hi - lo)

    def encode(self, coords: Sequence[TruncatedElement]) -> Triple:
        for index, x in enumerate(coords):
            if x.valuation is not None and x.absolute_precision < self.hi:
                raise InsufficientPrecision(
                    f"coordinate known modulo w^{x.absolute_precision}, need w^{self.hi}", coordinate=index
                )
        return tuple(self.ring.from_element(x, self.lo) for x in coords)

    def decode(self, triple: Triple) -> Tuple[TruncatedElement, ...]:
        return tuple(self.ring.to_element(x, self.lo) for x in triple)

    def upper(self, t: Triple, s: int) -> Triple:
        """Ad(u(s)): (a, b, c) -> (a + s c, b - 2 s a - s^2 c, c)."""
        r = self.ring
        a, b, c = t
        sc = r.mul(s, c)
        return (
            r.add(a, sc),
            r.sub(r.sub(b, r.mul_int(r.mul(s, a), 2)), r.mul(s, sc)),
            c,
        )

    def lower(self, t: Triple, s: int) -> Triple:
        """Ad(u-(s)): (a, b, c) -> (a - s b, b, c + 2 s a - s^2 b)."""
        r = self.ring
        a, b, c = t
        sb = r.mul(s, b)
        return (
            r.sub(a, sb),
            b,
            r.sub(r.add(c, r.mul_int(r.mul(s, a), 2)), r.mul(s, sb)),
        )

    def generators(self) -> List[int]:
        return [self.ring.shift(1, i) for i in range(self.ring.m)]

    def orbit(self, start: Triple) -> List[Triple]:
        """K-orbit of a residue triple by breadth-first search over unipotent generators."""
        gens = self.generators()
        seen = {start}
        queue = deque([start])
        order = [start]
        while queue:
            t = queue.popleft()
            for s in gens:
                for image in (self.upper(t, s), self.lower(t, s)):
                    if image not in seen:
                        seen.add(image)
                        order.append(image)
                        queue.append(image)
        logger.debug("orbit of %s in window [%d, %d): %d points", start, self.lo, self.hi, len(order))
        return order


class PairingTable:
    """
    Exponents of w -> Lambda(<w, Y>) for w ranging over one Sl2ResidueModule,
    at a common level so that products of character values become sums.
    """

    def __init__(self, module: Sl2ResidueModule, y: Sequence[TruncatedElement]):
        self.module = module
        self.p = module.field.p
        ring = module.ring
        # <W, Y> = 2 a_W a_Y + b_W c_Y + c_W b_Y
        partners = (y[0] * 2, y[2], y[1])
        raw: List[List[Tuple[int, int]]] = []
        for index, partner in enumerate(partners):
            column = []
            for w in ring.elements():
                element = ring.to_element(w, module.lo)
                try:
                    column.append(character_exponent(element * partner))
                except InsufficientPrecision as exc:
                    raise InsufficientPrecision(exc.detail, coordinate=(0, 2, 1)[index]) from exc
            raw.append(column)
        self.level = max((level for column in raw for level, _ in column), default=0)
        self.modulus = self.p**self.level
        self.tables = [
            [(k * self.p ** (self.level - level)) % self.modulus for level, k in column]
            for column in raw
        ]

    def exponent(self, t: Triple) -> int:
        ta, tb, tc = self.tables
        return (ta[t[0]] + tb[t[1]] + tc[t[2]]) % self.modulus if self.modulus > 1 else 0

    def average(self, points: Iterable[Triple]) -> CycValue:
        counts: Counter = Counter()
        total = 0
        for t in points:
            counts[self.exponent(t)] += 1
            total += 1
        if self.level == 0:
            return CycValue.one()
        return CycValue.from_map(self.p, self.level, dict(counts), Fraction(1, total))
