"""
Moy-Prasad lattices and subgroups for split sl_n, and the depth function.

A lattice g_{x,r} is described by one integer shift per basis vector:
Y = sum_i c_i v_i lies in it iff ord(c_i) >= shift_i for all i.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from padicbench.config import settings
from padicbench.errors import InsufficientPrecision, PointOutsideAlcove
from padicbench.localfield import TruncatedElement
from padicbench.rootdata import Alcove, RootSystem, build_root_system, fundamental_alcove

logger = logging.getLogger(__name__)

Matrix = List[List[TruncatedElement]]


@dataclass(frozen=True)
class BasisVector:
    name: str
    kind: str  # "torus" or "root"
    root: Tuple[int, ...]  # simple-root coordinates; zero for torus vectors
    matrix: Tuple[Tuple[int, ...], ...]


class ChevalleyModel:
    """
    sl_n with its Chevalley basis: H_i = E_ii - E_{i+1,i+1} and the root
    vectors E_ij (i != j) of the roots e_i - e_j.
    """

    def __init__(self, n: int = 2):
        if n < 2:
            raise ValueError("sl_n needs n >= 2")
        self.n = n
        self.name = f"sl{n}"
        cartan = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n - 1)] for i in range(n - 1)]
        self.root_system: RootSystem = build_root_system(cartan)
        basis: List[BasisVector] = []
        for i in range(n - 1):
            m = [[0] * n for _ in range(n)]
            m[i][i], m[i + 1][i + 1] = 1, -1
            basis.append(BasisVector(f"H{i + 1}" if n > 2 else "H", "torus", (0,) * (n - 1), _freeze(m)))
        for i in range(n):
            for j in range(n):
                if i != j:
                    m = [[0] * n for _ in range(n)]
                    m[i][j] = 1
                    basis.append(BasisVector(self._root_name(i, j), "root", _root_of(i, j, n), _freeze(m)))
        self.basis: Tuple[BasisVector, ...] = tuple(basis)
        self.brackets = self._bracket_table()

    def _root_name(self, i: int, j: int) -> str:
        if self.n == 2:
            return "E" if i < j else "F"
        return f"E{i + 1}{j + 1}"

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index(self, name: str) -> int:
        return next(k for k, v in enumerate(self.basis) if v.name == name)

    def alcove(self) -> Alcove:
        return _alcove_for(self.n)

    def coordinates_int(self, m: Sequence[Sequence[int]]) -> List[int]:
        """Integer coordinates of an integer traceless matrix."""
        out = []
        partial = 0
        for i in range(self.n - 1):
            partial += m[i][i]
            out.append(partial)
        for i in range(self.n):
            for j in range(self.n):
                if i != j:
                    out.append(m[i][j])
        return out

    def coordinates(self, y: Matrix) -> List[TruncatedElement]:
        """Coordinates of a traceless matrix of truncated elements in the basis."""
        field = y[0][0].field
        trace = field.zero()
        for i in range(self.n):
            trace = trace + y[i][i]
        if trace.is_nonzero:
            raise ValueError(f"matrix is not traceless (trace {trace})")
        out = []
        partial = field.zero()
        for i in range(self.n - 1):
            partial = partial + y[i][i]
            out.append(partial)
        for i in range(self.n):
            for j in range(self.n):
                if i != j:
                    out.append(y[i][j])
        return out

    def matrix(self, coords: Sequence[TruncatedElement]) -> Matrix:
        field = coords[0].field
        m = [[field.zero() for _ in range(self.n)] for _ in range(self.n)]
        for c, v in zip(coords, self.basis):
            for i in range(self.n):
                for j in range(self.n):
                    if v.matrix[i][j]:
                        m[i][j] = m[i][j] + c * v.matrix[i][j]
        return m

    def _bracket_table(self) -> Dict[Tuple[int, int], List[int]]:
        table = {}
        for a, u in enumerate(self.basis):
            for b, v in enumerate(self.basis):
                x = _matmul(u.matrix, v.matrix)
                y = _matmul(v.matrix, u.matrix)
                comm = [[x[i][j] - y[i][j] for j in range(self.n)] for i in range(self.n)]
                table[(a, b)] = self.coordinates_int(comm)
        return table

    def ad_matrix(self, coords: Sequence[TruncatedElement]) -> Matrix:
        """ad(Y) in the basis: column b holds the coordinates of [Y, v_b]."""
        field = coords[0].field
        d = self.dimension
        out = [[field.zero() for _ in range(d)] for _ in range(d)]
        for a, ya in enumerate(coords):
            if ya.is_exact_zero:
                continue
            for b in range(d):
                for k, const in enumerate(self.brackets[(a, b)]):
                    if const:
                        out[k][b] = out[k][b] + ya * const
        return out


def _freeze(m):
    return tuple(tuple(row) for row in m)


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _root_of(i: int, j: int, n: int) -> Tuple[int, ...]:
    coords = [0] * (n - 1)
    lo, hi = min(i, j), max(i, j)
    for k in range(lo, hi):
        coords[k] = 1 if i < j else -1
    return tuple(coords)


@lru_cache(maxsize=None)
def _alcove_for(n: int) -> Alcove:
    cartan = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n - 1)] for i in range(n - 1)]
    return fundamental_alcove(build_root_system(cartan))


@lru_cache(maxsize=None)
def chevalley_model(n: int) -> ChevalleyModel:
    return ChevalleyModel(n)


def sl2_model() -> ChevalleyModel:
    return chevalley_model(2)


@dataclass(frozen=True)
class LatticeDescription:
    model: str
    point: Tuple[Fraction, ...]
    level: Fraction
    strict: bool
    shifts: Tuple[Tuple[str, int], ...]

    def shift(self, name: str) -> int:
        return dict(self.shifts)[name]

    def contains_lattice(self, other: "LatticeDescription") -> bool:
        """other is a sublattice of self."""
        mine = dict(self.shifts)
        return all(mine[name] <= s for name, s in other.shifts)

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "point": [str(c) for c in self.point],
            "level": str(self.level) + ("+" if self.strict else ""),
            "shifts": {name: s for name, s in self.shifts},
        }


def _least_integer(bound: Fraction, strict: bool) -> int:
    """Least integer n with n >= bound, or n > bound when strict."""
    return math.floor(bound) + 1 if strict else math.ceil(bound)


def mp_lattice(
    model: ChevalleyModel,
    x: Sequence[Fraction],
    r: Fraction,
    strict: bool = False,
) -> LatticeDescription:
    """g_{x,r} (or g_{x,r+} when strict) as a shift table."""
    x = tuple(Fraction(c) for c in x)
    r = Fraction(r)
    if len(x) != model.n - 1 or not model.alcove().contains(x):
        raise PointOutsideAlcove(f"point {[str(c) for c in x]} is not in the closed fundamental alcove")
    shifts = []
    for v in model.basis:
        if v.kind == "torus":
            shifts.append((v.name, _least_integer(r, strict)))
        else:
            value = sum((Fraction(g) * c for g, c in zip(v.root, x)), Fraction(0))
            shifts.append((v.name, _least_integer(r - value, strict)))
    return LatticeDescription(model.name, x, r, strict, tuple(shifts))


def lattice_member(y, lattice: LatticeDescription, model: Optional[ChevalleyModel] = None) -> bool:
    """
    Membership of Y (a matrix, or a coordinate sequence) in a lattice.
    Raises InsufficientPrecision when some coordinate's valuation cannot be
    compared with its shift.
    """
    model = model or chevalley_model(len(lattice.point) + 1)
    coords = _as_coordinates(y, model)
    for index, (c, (name, shift)) in enumerate(zip(coords, lattice.shifts)):
        verdict = c.ord_at_least(shift)
        if verdict is None:
            raise InsufficientPrecision(
                f"coordinate {name} known only modulo w^{c.absolute_precision}, shift {shift}",
                coordinate=index,
            )
        if not verdict:
            return False
    return True


def _as_coordinates(y, model: ChevalleyModel) -> List[TruncatedElement]:
    if isinstance(y, (list, tuple)) and y and isinstance(y[0], (list, tuple)):
        return model.coordinates(y)
    if hasattr(y, "coords"):
        return list(y.coords)
    return list(y)


def dual_lattice(lattice: LatticeDescription, model: ChevalleyModel) -> LatticeDescription:
    """
    The annihilator of g_{x,r} under the trace form and a character of
    conductor p: root lines pair with their opposite root, torus lines with
    the torus (perfect over Omega when p does not divide n).
    """
    shifts = dict(lattice.shifts)
    out = []
    for v in model.basis:
        if v.kind == "torus":
            out.append((v.name, 1 - shifts[v.name]))
        else:
            partner = next(u for u in model.basis if u.kind == "root" and u.root == tuple(-g for g in v.root))
            out.append((v.name, 1 - shifts[partner.name]))
    return LatticeDescription(model.name, lattice.point, -lattice.level, not lattice.strict, tuple(out))


def lattice_volume(lattice: LatticeDescription, q: int) -> Fraction:
    """Haar volume with vol(g(Omega)) = 1."""
    return Fraction(1, 1) / Fraction(q) ** sum(s for _, s in lattice.shifts)


def _det(m: Matrix) -> TruncatedElement:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = m[0][0].field.zero()
    for j in range(n):
        if m[0][j].is_exact_zero:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def group_member(
    g: Matrix,
    x: Sequence[Fraction],
    r: Fraction,
    model: ChevalleyModel,
) -> bool:
    """
    Membership in G_{x,r} for r > 0, decided by g - 1 lying in the gl_n
    lattice with the same shifts (diagonal entries use the torus shift).
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("group filtration is only handled for r > 0")
    if (_det(g) - 1).is_nonzero:
        raise ValueError("matrix is not in SL_n: det(g) != 1")
    lattice = mp_lattice(model, x, r)
    shifts = dict(lattice.shifts)
    torus_shift = _least_integer(r, False)
    n = model.n
    for i in range(n):
        for j in range(n):
            entry = g[i][j] - 1 if i == j else g[i][j]
            shift = torus_shift if i == j else shifts[model._root_name(i, j)]
            verdict = entry.ord_at_least(shift)
            if verdict is None:
                raise InsufficientPrecision(f"entry ({i},{j}) of g - 1 undecided against shift {shift}")
            if not verdict:
                return False
    return True


def group_member_by_generators(g: Matrix, x: Sequence[Fraction], r: Fraction) -> bool:
    """
    sl2 membership via the generators: g = u-(s') t(a) u(s) with
    u(s) in U_{alpha, x, r}, t(a) in T_r, u-(s') in U_{-alpha, x, r}.
    Every element of G_{x,r} (r > 0) has a unit upper-left entry.
    """
    model = sl2_model()
    lattice = mp_lattice(model, x, r)
    alpha, beta = g[0][0], g[0][1]
    gamma = g[1][0]
    divisible = alpha.ord_at_least(1)
    if divisible is None:
        raise InsufficientPrecision("upper-left entry of g is not known modulo p")
    if divisible:
        return False
    a_inv = alpha.inverse()
    upper = beta * a_inv
    lower = gamma * a_inv
    torus_shift = _least_integer(Fraction(r), False)
    checks = [
        ((alpha - 1), torus_shift),
        (upper, lattice.shift("E")),
        (lower, lattice.shift("F")),
    ]
    for value, shift in checks:
        verdict = value.ord_at_least(shift)
        if verdict is None:
            raise InsufficientPrecision(f"generator factor undecided against shift {shift}")
        if not verdict:
            return False
    return True


@dataclass(frozen=True)
class Depth:
    """depth(Y) = value; when exact is False, only depth(Y) >= value is known."""

    value: Fraction
    exact: bool = True
    nilpotent: bool = False

    def to_json(self) -> dict:
        if self.exact:
            return {"depth": str(self.value)}
        return {"depth_at_least": str(self.value), "nilpotent": self.nilpotent}


def char_poly_coefficients(m: Matrix) -> List[TruncatedElement]:
    """c_1..c_d of det(tI - M) = t^d + c_1 t^(d-1) + ... via principal minors."""
    d = len(m)
    out = []
    for i in range(1, d + 1):
        total = m[0][0].field.zero()
        for rows in combinations(range(d), i):
            minor = [[m[r][c] for c in rows] for r in rows]
            total = total + _det(minor)
        out.append(total if i % 2 == 0 else -total)
    return out


def depth(y, model: Optional[ChevalleyModel] = None) -> Depth:
    """
    min_i ord(c_i)/i over the nonzero coefficients of the characteristic
    polynomial of ad(Y). Nilpotent elements get the marker depth >= R_max.
    """
    model = model or sl2_model()
    coords = _as_coordinates(y, model)
    coeffs = char_poly_coefficients(model.ad_matrix(coords))
    cap = Fraction(settings.depth_cap)
    best: Optional[Fraction] = None
    lower_bounds = []
    for i, c in enumerate(coeffs, start=1):
        if c.is_exact_zero:
            continue
        if c.is_nonzero:
            value = Fraction(c.valuation, i)
            best = value if best is None else min(best, value)
        else:
            lower_bounds.append(Fraction(c.valuation, i))
    if best is None:
        if all(b >= cap for b in lower_bounds):
            return Depth(cap, exact=False, nilpotent=not lower_bounds)
        raise InsufficientPrecision("characteristic polynomial of ad(Y) is not certified nonzero")
    if any(b < best for b in lower_bounds):
        raise InsufficientPrecision("a characteristic polynomial coefficient may undercut the depth")
    return Depth(best)


def in_depth_domain(y, r: Fraction, model: Optional[ChevalleyModel] = None) -> Optional[bool]:
    """Three-valued indicator of g_r: True, False, or None when undecided."""
    try:
        d = depth(y, model)
    except InsufficientPrecision:
        return None
    r = Fraction(r)
    if d.exact:
        return d.value >= r
    if d.nilpotent or d.value >= r:
        return True
    return None
