"""
The kernel eta_X(Y) = integral over K = SL2(Omega) of Lambda(<Ad(k) X, Y>) dk, vol(K) = 1.

<Ad(k) X, Y> modulo the conductor only sees Ad(k) X modulo w^(c - e_Y)
(e_Y a lower bound for the coordinate valuations of Y), and Ad(k) X stays in
w^(e_X) g(Omega). The Haar image of K on that finite module is uniform on the
K-orbit of X, so eta is the orbit average of Lambda(<W, Y>). The literal
definition, a normalized sum over SL2(Omega / p^m), is kept as a second method.
"""

import logging
from fractions import Fraction
from typing import Dict, Optional, Tuple

from padicbench.config import settings
from padicbench.cyclotomic import CycAccumulator, CycValue
from padicbench.errors import InsufficientPrecision
from padicbench.integrate import representative
from padicbench.localfield import character_exponent
from padicbench.moyprasad import in_depth_domain
from padicbench.orbital.lie import LieElement, adjoint, trace_form
from padicbench.residues import PairingTable, ResidueRing, Sl2ResidueModule, Triple, sl2_elements

logger = logging.getLogger(__name__)

ORBIT = "orbit"
ENUMERATE = "enumerate"


def sufficiency_depth(x: LieElement, y: LieElement, conductor: Optional[int] = None) -> int:
    """m* = max(1, c - e_X - e_Y): Ad(k) mod p^m* already fixes Lambda(<Ad(k) X, Y>)."""
    c = settings.conductor if conductor is None else conductor
    ex, ey = x.min_valuation(), y.min_valuation()
    if ex is None or ey is None:
        return 1
    return max(1, c - ex - ey)


def eta(
    x: LieElement,
    y: LieElement,
    m: Optional[int] = None,
    method: str = ORBIT,
) -> CycValue:
    """eta_X(Y); `m` is the enumeration depth of the literal method (default m*)."""
    if x.is_zero or y.is_zero:
        return CycValue.one()
    if method == ORBIT:
        return _eta_orbit(x, y)
    if method != ENUMERATE:
        raise ValueError(f"unknown eta method {method!r}")
    needed = sufficiency_depth(x, y)
    m = needed if m is None else m
    if m < needed:
        raise InsufficientPrecision(f"enumeration depth {m} is below the sufficiency depth {needed}")
    return _eta_enumerate(x, y, m)


def _eta_orbit(x: LieElement, y: LieElement) -> CycValue:
    lo = x.min_valuation()
    hi = settings.conductor - y.min_valuation()
    if hi <= lo:
        return CycValue.one()
    module = Sl2ResidueModule(x.field, lo, hi)
    orbit = module.orbit(module.encode(x.coords))
    return PairingTable(module, y.coords).average(orbit)


def _eta_enumerate(x: LieElement, y: LieElement, m: int) -> CycValue:
    field = x.field
    ring = ResidueRing(field, m)
    lift = {v: representative(ring.to_element(v)) for v in ring.elements()}
    acc = CycAccumulator(field.p)
    count = 0
    for g in sl2_elements(ring):
        k = ((lift[g[0]], lift[g[1]]), (lift[g[2]], lift[g[3]]))
        level, exponent = character_exponent(trace_form(adjoint(k, x), y))
        acc.add_root(level, exponent)
        count += 1
    logger.debug("eta by enumeration of SL2(Omega/p^%d): %d elements", m, count)
    return acc.value(Fraction(1, count))


def eta_r(
    x: LieElement,
    y: LieElement,
    r: Fraction,
    m: Optional[int] = None,
    method: str = ORBIT,
) -> CycValue:
    """eta_X(Y) times the indicator of the depth domain g_r, evaluated at Y."""
    inside = in_depth_domain(y, Fraction(r))
    if inside is None:
        raise InsufficientPrecision(f"membership of Y in g_{r} is undecided")
    if not inside:
        return CycValue.zero()
    return eta(x, y, m, method)


class EtaKernel:
    """
    Z -> eta_Y(Z) with one orbit computation per K-orbit of Z modulo
    w^(c - e_Y): every point of a computed orbit shares its value.
    """

    def __init__(self, y: LieElement):
        self.y = y
        self.hi = settings.conductor - y.min_valuation()
        self._modules: Dict[int, Tuple[Sl2ResidueModule, PairingTable]] = {}
        self._values: Dict[Tuple[int, Triple], CycValue] = {}
        self.orbits = 0

    def _module(self, lo: int) -> Tuple[Sl2ResidueModule, PairingTable]:
        cached = self._modules.get(lo)
        if cached is None:
            module = Sl2ResidueModule(self.y.field, lo, self.hi)
            cached = self._modules[lo] = (module, PairingTable(module, self.y.coords))
        return cached

    def __call__(self, z: LieElement) -> CycValue:
        lo = z.min_valuation()
        if lo is None or self.hi <= lo:
            return CycValue.one()
        module, table = self._module(lo)
        start = module.encode(z.coords)
        key = (lo, start)
        value = self._values.get(key)
        if value is None:
            orbit = module.orbit(start)
            value = table.average(orbit)
            for point in orbit:
                self._values[(lo, point)] = value
            self.orbits += 1
        return value
