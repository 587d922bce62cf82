"""
Exact integration by residue-class enumeration.

Haar measure is normalized so that Omega has volume 1; a coset
x + w^N Omega has volume q^-N. An integral over a box is a finite sum over
cosets, exact in CycValue arithmetic.

Three certificate modes:

- one-shot: evaluate the integrand at the canonical lift of every depth-m
  coset and sum;
- refine: one-shot at depths m and m+1, flagging whether they agree;
- adaptive: evaluate on the cosets themselves with truncated arithmetic and
  split a coset into its q children whenever the integrand raises
  InsufficientPrecision. The result is exact without any constancy
  assumption.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

from padicbench.config import settings
from padicbench.cyclotomic import CycAccumulator, CycValue
from padicbench.errors import DomainUndecided, InsufficientPrecision, NoConstancyDepth
from padicbench.localfield import FieldSpec, TruncatedElement, residue_elements

logger = logging.getLogger(__name__)

ONE_SHOT = "one-shot"
REFINE = "refine"
ADAPTIVE = "adaptive"
MODES = (ONE_SHOT, REFINE, ADAPTIVE)

Cell = Tuple[TruncatedElement, ...]
Scalar = Union[CycValue, Fraction, int]
Integrand = Callable[[Cell], Scalar]
Predicate = Callable[[Cell], Optional[bool]]


def decide_le(x: TruncatedElement, bound: int) -> Optional[bool]:
    """Three-valued ord(x) <= bound."""
    above = x.ord_at_least(bound + 1)
    return None if above is None else not above


def q_power(q: int, exponent: int) -> Fraction:
    """q^-exponent as an exact rational."""
    return Fraction(1, q**exponent) if exponent >= 0 else Fraction(q ** (-exponent))


def representative(coset: TruncatedElement) -> TruncatedElement:
    """The canonical lift of a coset: its digits padded with zeros, or the exact zero."""
    if not coset.is_nonzero:
        return coset.field.zero()
    pad = max(settings.precision_cap - coset.precision, 0)
    return TruncatedElement(coset.field, coset.valuation, coset.digits + (0,) * pad)


def cell_volume(q: int, cell: Cell) -> Fraction:
    return q_power(q, sum(x.absolute_precision for x in cell))


@dataclass(frozen=True)
class Box:
    """
    Product of per-coordinate windows: coordinate i lies in w^lo[i] Omega and,
    when hi[i] is set, has ord <= hi[i].
    """

    lo: Tuple[int, ...]
    hi: Tuple[Optional[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(self.lo))
        hi = tuple(self.hi) if self.hi else (None,) * len(self.lo)
        if len(hi) != len(self.lo):
            raise ValueError("box bounds must have one entry per coordinate")
        for lo, top in zip(self.lo, hi):
            if top is not None and top < lo:
                raise ValueError(f"empty window: ord >= {lo} and ord <= {top}")
        object.__setattr__(self, "hi", hi)

    @classmethod
    def ball(cls, dimension: int, lo: int = 0) -> "Box":
        return cls((lo,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.lo)

    def coordinate_depth(self, i: int, m: int) -> int:
        """Enumeration depth for coordinate i: at least m and deep enough to decide the window."""
        top = self.hi[i]
        return max(m, self.lo[i], top + 1 if top is not None else self.lo[i])

    def _coordinate_cosets(self, field: FieldSpec, i: int, m: int) -> List[TruncatedElement]:
        depth = self.coordinate_depth(i, m)
        top = self.hi[i]
        out = []
        for coset in residue_elements(field, self.lo[i], depth):
            if top is not None and not (coset.is_nonzero and coset.valuation <= top):
                continue
            out.append(coset)
        return out

    def cells(self, field: FieldSpec, m: int) -> Iterable[Cell]:
        axes = [self._coordinate_cosets(field, i, m) for i in range(self.dimension)]
        return product(*axes)

    def volume(self, q: int) -> Fraction:
        total = Fraction(1)
        for lo, top in zip(self.lo, self.hi):
            v = q_power(q, lo)
            if top is not None:
                v -= q_power(q, top + 1)
            total *= v
        return total

    def split(self, i: int) -> Tuple["Box", "Box"]:
        """Partition along coordinate i into {ord = lo} and the deeper remainder."""
        lo, top = self.lo[i], self.hi[i]
        if top is not None and top == lo:
            raise ValueError(f"coordinate {i} window is a single valuation and cannot be split")
        shell = Box(self.lo, self.hi[:i] + (lo,) + self.hi[i + 1:])
        inner = Box(self.lo[:i] + (lo + 1,) + self.lo[i + 1:], self.hi)
        return shell, inner

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}


# cell engine


@dataclass
class CellTally:
    """Per-bin sums produced by `integrate_cells`."""

    p: int
    bins: Dict[Hashable, CycAccumulator] = dataclass_field(default_factory=dict)
    cells: int = 0
    splits: int = 0
    deepest: int = 0

    def add(self, key: Hashable, value: Scalar, weight: Fraction) -> None:
        acc = self.bins.get(key)
        if acc is None:
            acc = self.bins[key] = CycAccumulator(self.p)
        if isinstance(value, CycValue):
            acc.add(value, weight)
        else:
            acc.add(CycValue.one(), weight * Fraction(value))

    def value(self, key: Hashable) -> CycValue:
        acc = self.bins.get(key)
        return acc.value() if acc is not None else CycValue.zero()

    def total(self, keys: Optional[Iterable[Hashable]] = None) -> CycValue:
        keys = self.bins.keys() if keys is None else keys
        out = CycValue.zero()
        for key in sorted(keys, key=repr):
            out = out + self.value(key)
        return out


def _children(cell: Cell, coordinate: Optional[int]) -> List[Cell]:
    indices = range(len(cell)) if coordinate is None else [coordinate]
    axes = [x.refinements() if i in indices else [x] for i, x in enumerate(cell)]
    return list(product(*axes))


def integrate_cells(
    field: FieldSpec,
    cells: Iterable[Cell],
    evaluate: Callable[[Cell], Optional[Tuple[Hashable, Scalar]]],
    adaptive: bool = True,
    max_extra_depth: Optional[int] = None,
    max_cells: Optional[int] = None,
) -> CellTally:
    """
    Sum evaluate(cell) * vol(cell) into bins.

    `evaluate` returns None for cells outside the domain, or (bin key, value).
    It may raise InsufficientPrecision, optionally naming a coordinate; in
    adaptive mode that coordinate (or every coordinate) is split and the
    children are evaluated instead.
    """
    max_extra = settings.max_cell_depth if max_extra_depth is None else max_extra_depth
    budget = settings.max_cells if max_cells is None else max_cells
    tally = CellTally(field.p)
    stack: List[Tuple[Cell, int]] = [(cell, 0) for cell in cells]
    stack.reverse()
    while stack:
        cell, extra = stack.pop()
        tally.cells += 1
        if tally.cells > budget:
            raise InsufficientPrecision(f"cell budget of {budget} exhausted")
        try:
            outcome = evaluate(cell)
        except InsufficientPrecision as exc:
            if not adaptive or extra >= max_extra:
                raise
            children = _children(cell, exc.coordinate)
            tally.splits += 1
            tally.deepest = max(tally.deepest, extra + 1)
            stack.extend((child, extra + 1) for child in reversed(children))
            continue
        if outcome is None:
            continue
        key, value = outcome
        tally.add(key, value, cell_volume(field.q, cell))
    logger.debug(
        "cell engine: %d cells, %d splits, deepest refinement %d, %d bins",
        tally.cells, tally.splits, tally.deepest, len(tally.bins),
    )
    return tally


# jobs


@dataclass
class IntegrationJob:
    field: FieldSpec
    box: Box
    integrand: Integrand
    depth: int = 1
    mode: str = ONE_SHOT
    domain: Optional[Predicate] = None

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.mode not in MODES:
            raise ValueError(f"unknown certificate mode {self.mode!r}")

    @property
    def dimension(self) -> int:
        return self.box.dimension


@dataclass(frozen=True)
class IntegrationResult:
    value: CycValue
    certificate: Dict[str, object]

    def to_json(self) -> dict:
        return {"value": self.value.to_json(), "certificate": self.certificate}


def _evaluator(job: IntegrationJob, lift: bool):
    def evaluate(cell: Cell):
        point = tuple(representative(x) for x in cell) if lift else cell
        if job.domain is not None:
            inside = job.domain(point)
            if inside is None:
                raise DomainUndecided("domain predicate undecided on a coset")
            if not inside:
                return None
        return 0, job.integrand(point)

    return evaluate


def _one_shot(job: IntegrationJob, m: int) -> Tuple[CycValue, int]:
    tally = integrate_cells(job.field, job.box.cells(job.field, m), _evaluator(job, True), adaptive=False)
    return tally.total(), tally.cells


def integrate(job: IntegrationJob) -> IntegrationResult:
    """Integrate job.integrand over the box (intersected with job.domain) in the job's mode."""
    logger.info("integrating over %s (dimension %d, depth %d, mode %s)",
                job.field.name(), job.dimension, job.depth, job.mode)
    if job.mode == ONE_SHOT:
        value, cells = _one_shot(job, job.depth)
        return IntegrationResult(value, {"mode": ONE_SHOT, "depth": job.depth, "cells": cells})
    if job.mode == REFINE:
        coarse, coarse_cells = _one_shot(job, job.depth)
        fine, fine_cells = _one_shot(job, job.depth + 1)
        stabilized = coarse == fine
        if not stabilized:
            logger.warning("depths %d and %d disagree", job.depth, job.depth + 1)
        certificate = {
            "mode": REFINE,
            "depth": job.depth,
            "cells": [coarse_cells, fine_cells],
            "stabilized": stabilized,
        }
        return IntegrationResult(fine, certificate)
    tally = integrate_cells(job.field, job.box.cells(job.field, job.depth), _evaluator(job, False))
    certificate = {
        "mode": ADAPTIVE,
        "depth": job.depth,
        "cells": tally.cells,
        "splits": tally.splits,
        "deepest_refinement": tally.deepest,
    }
    return IntegrationResult(tally.total(), certificate)


def local_constancy_depth(
    f: Callable[[Cell], Scalar],
    point: Sequence[TruncatedElement],
    max_m: int,
) -> int:
    """
    Least m <= max_m such that f takes one value on the canonical lifts of all
    depth-(m+1) cosets inside point + w^m Omega^n.
    """
    for m in range(1, max_m + 1):
        base = tuple(x.truncate(m) for x in point)
        values = set()
        for child in _children(base, None):
            value = f(tuple(representative(x) for x in child))
            values.add(value if isinstance(value, CycValue) else CycValue.rational(value))
            if len(values) > 1:
                break
        if len(values) == 1:
            logger.debug("constancy certified at depth %d", m)
            return m
    raise NoConstancyDepth(f"no depth up to {max_m} certifies local constancy")


def form_measure(
    field: FieldSpec,
    density: Callable[[Cell], TruncatedElement],
    box: Box,
    depth: int,
    domain: Optional[Predicate] = None,
) -> CycValue:
    """
    Integral of |density| = q^-ord(density) over the box, as an exact rational.

    Cosets whose lift is a zero of the density contribute nothing.
    """

    def weight(point: Cell) -> Fraction:
        value = density(point)
        order, _ = value.ord_ac()
        if order is None:
            return Fraction(0)
        return q_power(field.q, order)

    return integrate(IntegrationJob(field, box, weight, depth, ONE_SHOT, domain)).value
