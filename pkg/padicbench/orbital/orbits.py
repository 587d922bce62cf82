"""
Regular semisimple orbits in sl2 and their invariant measure.

The orbit of X is integrated as the level set q(Z) = a^2 + bc = q0 of X,
cut into three chart pieces with s = q0 - a^2 = bc and v0 = ord(q0):

    chart "b":  (a, b) free, c = s/b;  ord(s) <= v0, 2 ord(b) <= ord(s)
    chart "c":  (a, c) free, b = s/c;  ord(s) <= v0, 2 ord(c) <  ord(s)
    chart "a":  (b, c) free, a = +-sqrt(q0 - bc);  ord(bc) > v0

The symplectic form <Z, [dZ, dZ]> has density 4 q0 / b, 4 q0 / c and 2 q0 / a
on the three charts. Integrals are accumulated per shell
n = max(0, -min ord(Z)); the value for window N is the sum over n <= N.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional

from padicbench.cyclotomic import CycValue
from padicbench.errors import InsufficientPrecision
from padicbench.integrate import Box, Cell, Scalar, decide_le, integrate_cells, q_power
from padicbench.localfield import TruncatedElement, residue_elements
from padicbench.orbital.lie import LieElement, require_regular

logger = logging.getLogger(__name__)

CHART_COORDINATES = {"b": (0, 1), "c": (0, 2), "a": (1, 2)}


@dataclass(frozen=True)
class OrbitChart:
    base: LieElement
    q0: TruncatedElement
    chart: str
    sheet: int = 1

    @property
    def v0(self) -> int:
        return self.q0.valuation

    @property
    def label(self) -> str:
        if self.chart == "a":
            return "a+" if self.sheet > 0 else "a-"
        return self.chart

    def point(self, u: TruncatedElement, v: TruncatedElement) -> Optional[LieElement]:
        """
        The orbit point with chart coordinates (u, v), or None when (u, v) lies
        outside this chart piece. Raises InsufficientPrecision (with the chart
        coordinate index when known) if membership is undecided.
        """
        if self.chart == "a":
            bc = u * v
            deep = bc.ord_at_least(self.v0 + 1)
            if deep is None:
                raise InsufficientPrecision("ord(bc) undecided against ord(q0)", coordinate=0 if u.is_bigoh else 1)
            if not deep:
                return None
            root = (self.q0 - bc).sqrt()
            if root is None:
                return None
            return LieElement(root if self.sheet > 0 else -root, u, v)
        s = self.q0 - u * u
        shallow = decide_le(s, self.v0)
        if shallow is None:
            raise InsufficientPrecision("ord(q0 - a^2) undecided", coordinate=0)
        if not shallow:
            return None
        vs = s.valuation
        bound = vs // 2 if self.chart == "b" else (vs - 1) // 2
        inside = decide_le(v, bound)
        if inside is None:
            raise InsufficientPrecision("chart coordinate valuation undecided", coordinate=1)
        if not inside:
            return None
        w = s / v
        return LieElement(u, v, w) if self.chart == "b" else LieElement(u, w, v)

    def density(self, u: TruncatedElement, v: TruncatedElement) -> TruncatedElement:
        """<Z, [dZ/du, dZ/dv]> up to sign."""
        if self.chart == "a":
            z = self.point(u, v)
            return self.q0 * 2 / z.a
        return self.q0 * 4 / v

    def weight(self, z: LieElement) -> Fraction:
        """|density| at a chart point, for odd p."""
        q = self.q0.field.q
        if self.chart == "a":
            return q_power(q, self.v0 - z.a.valuation)
        free = z.b if self.chart == "b" else z.c
        return q_power(q, self.v0 - free.valuation)

    def coordinate_of(self, index: Optional[int]) -> Optional[int]:
        """Chart coordinate carrying sl2 coordinate `index`, if it is a free coordinate."""
        pair = CHART_COORDINATES[self.chart]
        return pair.index(index) if index in pair else None


def orbit_chart(x: LieElement, chart: str = "b", sheet: int = 1) -> OrbitChart:
    q0 = require_regular(x)
    if x.field.p == 2:
        raise ValueError("orbit charts are implemented for odd p only")
    if chart not in CHART_COORDINATES:
        raise ValueError(f"unknown chart {chart!r}")
    return OrbitChart(x, q0, chart, sheet)


def orbit_charts(x: LieElement) -> List[OrbitChart]:
    """The chart pieces partitioning the level set of X; the "a" sheets exist only for square-class q0."""
    q0 = require_regular(x)
    charts = [orbit_chart(x, "b"), orbit_chart(x, "c")]
    if q0.valuation % 2 == 0 and q0.sqrt() is not None:
        charts += [orbit_chart(x, "a", 1), orbit_chart(x, "a", -1)]
    return charts


def shell_of(z: LieElement) -> int:
    """n = max(0, -min ord Z), raising InsufficientPrecision when undecided."""
    if all(x.ord_at_least(0) for x in z.coords):
        return 0
    low = z.minord()
    return max(0, -low)


@dataclass
class ShellSums:
    """Shell contributions n = 0 .. window + 1 and the engine statistics."""

    window: int
    shells: Dict[int, CycValue]
    statistics: Dict[str, int] = dataclass_field(default_factory=dict)

    def value(self, window: Optional[int] = None) -> CycValue:
        window = self.window if window is None else window
        total = CycValue.zero()
        for n in range(window + 1):
            total = total + self.shells.get(n, CycValue.zero())
        return total

    def stabilized(self, window: Optional[int] = None) -> bool:
        window = self.window if window is None else window
        return self.shells.get(window + 1, CycValue.zero()).is_zero()

    def shells_json(self) -> Dict[str, dict]:
        return {str(n): self.shells[n].to_json() for n in sorted(self.shells)}


def shell_integral(
    x: LieElement,
    integrand: Callable[[LieElement], Scalar],
    window: int,
    depth: int = 1,
    observe: Optional[Callable[[int, LieElement, CycValue], None]] = None,
) -> ShellSums:
    """
    Integrate `integrand` over the level set of X against the symplectic
    measure, per shell n <= window + 1. Chart coordinates start at valuation
    -(window + 1) and depth `depth`; the engine refines cosets wherever the
    integrand or the chart geometry needs more digits.
    """
    if window < 0:
        raise ValueError("window must be non-negative")
    field = x.field
    lo = -(window + 1)
    box = Box((lo, lo))
    shells: Dict[int, CycValue] = {n: CycValue.zero() for n in range(window + 2)}
    statistics = {"cells": 0, "splits": 0, "deepest_refinement": 0}
    for chart in orbit_charts(x):

        def evaluate(cell: Cell, chart=chart):
            u, v = cell
            z = chart.point(u, v)
            if z is None:
                return None
            try:
                n = shell_of(z)
                if n > window + 1:
                    return None
                value = integrand(z)
            except InsufficientPrecision as exc:
                raise InsufficientPrecision(exc.detail, coordinate=chart.coordinate_of(exc.coordinate)) from exc
            if not isinstance(value, CycValue):
                value = CycValue.rational(value)
            if observe is not None:
                observe(n, z, value)
            return n, value.scaled(chart.weight(z))

        tally = integrate_cells(field, box.cells(field, max(depth, lo + 1)), evaluate)
        for n in tally.bins:
            shells[n] = shells[n] + tally.value(n)
        statistics["cells"] += tally.cells
        statistics["splits"] += tally.splits
        statistics["deepest_refinement"] = max(statistics["deepest_refinement"], tally.deepest)
        logger.debug("chart %s: %d cells, %d splits", chart.label, tally.cells, tally.splits)
    return ShellSums(window, shells, statistics)


@dataclass(frozen=True)
class OrbitalIntegral:
    value: CycValue
    stabilized: bool
    sums: ShellSums

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "stabilized": self.stabilized,
            "window": self.sums.window,
            "shells": self.sums.shells_json(),
            "certificate": dict(self.sums.statistics),
        }


def orbital_integral(
    x: LieElement,
    f: Callable[[LieElement], Scalar],
    window: int,
    depth: int = 1,
) -> OrbitalIntegral:
    """Phi_X(f) truncated to shells n <= window; stabilized iff shell window + 1 contributes 0."""
    sums = shell_integral(x, f, window, depth)
    stabilized = sums.stabilized()
    if not stabilized:
        logger.warning("orbital integral not stabilized at window %d", window)
    return OrbitalIntegral(sums.value(), stabilized, sums)


def level_set_volume(x: LieElement, precision: int) -> Fraction:
    """
    Point-count oracle for Phi_X(1_{g(Omega)}):
    |4 q0| * #{Z in g(Omega / p^M) : q(Z) = q0 mod p^M} / p^(2M).
    """
    q0 = require_regular(x)
    field = x.field
    p, m = field.p, precision
    if q0.absolute_precision < m:
        raise InsufficientPrecision(f"q0 is not known modulo p^{m}")
    cosets = list(residue_elements(field, 0, m))
    squares = {}
    for u in cosets:
        squares[u] = u * u
    count = 0
    for a, b, c in product(cosets, repeat=3):
        value = squares[a] + b * c - q0
        if value.ord_at_least(m):
            count += 1
    return q_power(p, q0.valuation) * Fraction(count, p ** (2 * m))
