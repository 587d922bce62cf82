"""
Optimal points of the alcove closure.

For a nonempty set S of affine roots that are positive and below 1 on the
alcove, the optimal point x_S maximizes min_{psi in S} psi(x) over the closure
(restricted to the points fixed by a diagram automorphism tau). The optimum is
found exactly by vertex enumeration of the polytope {(x, s) : psi(x) >= s}.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from padicbench.linprog import Affine, Point, maximize
from padicbench.rootdata import Alcove, AffineRoot, RootSystem, affine_roots, fundamental_alcove

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimalPointReport:
    subset: Tuple[AffineRoot, ...]
    point: Point
    optimum: Fraction
    certificate: Dict[str, object]

    def to_json(self) -> dict:
        return {
            "subset": [str(psi) for psi in self.subset],
            "point": [str(c) for c in self.point],
            "optimum": str(self.optimum),
            "certificate": self.certificate,
        }


def sigma_set(alcove: Alcove, affine: Sequence[AffineRoot]) -> List[AffineRoot]:
    """
    The affine roots with psi > 0 and psi < 1 on the open alcove.

    psi is affine and nonconstant, so this is decided exactly by its values
    at the vertices of the closure.
    """
    verts = alcove.vertices
    out = []
    for psi in affine:
        values = [psi(v) for v in verts]
        if min(values) >= 0 and max(values) <= 1:
            out.append(psi)
    return out


def sigma(rs: RootSystem, alcove: Optional[Alcove] = None, level_bound: int = 2) -> List[AffineRoot]:
    alcove = alcove or fundamental_alcove(rs)
    return sigma_set(alcove, affine_roots(rs, level_bound))


def _tau_equalities(tau: Optional[Sequence[int]], dimension: int, extra: int) -> List[Affine]:
    if tau is None:
        return []
    out = []
    for i, j in enumerate(tau):
        if i < j:
            coeffs = [Fraction(0)] * (dimension + extra)
            coeffs[i], coeffs[j] = Fraction(1), Fraction(-1)
            out.append(Affine(tuple(coeffs), Fraction(0), f"x{i}=x{j}"))
    return out


def optimal_point(
    subset: Sequence[AffineRoot],
    alcove: Alcove,
    tau: Optional[Sequence[int]] = None,
) -> OptimalPointReport:
    """Maximize s subject to psi(x) >= s for psi in the subset and x in the closure."""
    if not subset:
        raise ValueError("subset must be nonempty")
    n = alcove.dimension
    verts = alcove.vertices
    floor = min(psi(v) for psi in subset for v in verts) - 1

    inequalities = alcove.inequalities(extra=1)
    for psi in subset:
        base = psi.as_affine(extra=1)
        inequalities.append(Affine(base.coeffs[:n] + (Fraction(-1),), base.const, f"{psi}>=s"))
    inequalities.append(Affine((Fraction(0),) * n + (Fraction(1),), -floor, "s>=floor"))
    equalities = _tau_equalities(tau, n, 1)
    objective = Affine((Fraction(0),) * n + (Fraction(1),))

    result = maximize(objective, n + 1, inequalities, equalities)
    point = result.point[:n]
    certificate = {
        "method": "vertex-enumeration",
        "vertices": result.vertex_count,
        "optimal_vertices": result.optimal_vertices,
        "tight": list(result.tight),
    }
    return OptimalPointReport(tuple(subset), point, result.optimum, certificate)


def _is_tau_invariant(subset: Sequence[AffineRoot], tau: Optional[Sequence[int]]) -> bool:
    if tau is None:
        return True
    members = set(subset)
    return all(psi.permuted(tau) in members for psi in subset)


def optimal_points_all(
    rs: RootSystem,
    tau: Optional[Sequence[int]] = None,
    level_bound: int = 2,
) -> Tuple[List[Point], List[OptimalPointReport]]:
    """
    One optimizer per tau-invariant nonempty subset of Sigma, de-duplicated by
    coordinates. Returns the sorted point set and the report of the first
    subset producing each point.
    """
    if tau is not None:
        tau = list(tau)
        if not rs.preserves(tau):
            raise ValueError(f"permutation {tau} does not preserve the Cartan matrix")
        if tau == list(range(rs.rank)):
            tau = None
    alcove = fundamental_alcove(rs)
    sig = sigma_set(alcove, affine_roots(rs, level_bound))
    logger.info("Sigma has %d affine roots; enumerating invariant subsets", len(sig))

    by_point: Dict[Point, OptimalPointReport] = {}
    for size in range(1, len(sig) + 1):
        for subset in combinations(sig, size):
            if not _is_tau_invariant(subset, tau):
                continue
            report = optimal_point(subset, alcove, tau)
            by_point.setdefault(report.point, report)
    points = sorted(by_point)
    return points, [by_point[p] for p in points]
