"""
Root systems from Cartan matrices, affine roots, and the fundamental alcove.

Conventions:
- cartan[i][j] = <alpha_j, alpha_i^vee>;
- roots are integer coordinate vectors in the basis of simple roots;
- alcove coordinates of a point x are the simple-root values (alpha_i(x))_i.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from sympy import Matrix, Rational

from padicbench.config import settings
from padicbench.errors import NotFiniteType
from padicbench.linprog import Affine, Point, rank, vertices

logger = logging.getLogger(__name__)

Root = Tuple[int, ...]


@dataclass(frozen=True)
class RootSystem:
    cartan: Tuple[Tuple[int, ...], ...]
    roots: Tuple[Root, ...]
    symmetrizer: Tuple[Fraction, ...]
    components: Tuple[Tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def simple_indices(self) -> Tuple[int, ...]:
        return tuple(self.roots.index(self.simple(i)) for i in range(self.rank))

    def simple(self, i: int) -> Root:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def positive_roots(self) -> List[Root]:
        return [r for r in self.roots if all(c >= 0 for c in r)]

    def height(self, root: Root) -> int:
        return sum(root)

    def inner(self, beta: Sequence[int], gamma: Sequence[int]) -> Fraction:
        """Invariant symmetric form with (alpha_i, alpha_j) = d_i * cartan[i][j]."""
        total = Fraction(0)
        for i, bi in enumerate(beta):
            if bi:
                for j, gj in enumerate(gamma):
                    if gj:
                        total += bi * gj * self.symmetrizer[i] * self.cartan[i][j]
        return total

    def pairing(self, beta: Sequence[int], gamma: Sequence[int]) -> int:
        """<beta, gamma^vee> = 2 (beta, gamma) / (gamma, gamma)."""
        value = 2 * self.inner(beta, gamma) / self.inner(gamma, gamma)
        if value.denominator != 1:
            raise ValueError(f"non-integral pairing <{beta}, {gamma}^vee> = {value}")
        return int(value)

    def reflect(self, i: int, beta: Root) -> Root:
        coroot_value = sum(b * self.cartan[i][j] for j, b in enumerate(beta))
        return tuple(b - coroot_value if j == i else b for j, b in enumerate(beta))

    def highest_roots(self) -> List[Root]:
        """The highest root of each irreducible component."""
        out = []
        for comp in self.components:
            candidates = [
                r for r in self.positive_roots()
                if all(r[j] == 0 for j in range(self.rank) if j not in comp)
            ]
            out.append(max(candidates, key=lambda r: (self.height(r), r)))
        return out

    def dynkin_type(self) -> str:
        labels = []
        for comp in self.components:
            n = len(comp)
            count = sum(
                1 for r in self.roots if all(r[j] == 0 for j in range(self.rank) if j not in comp)
            )
            labels.append(_classify_component(n, count, [self.symmetrizer[i] for i in comp]))
        return "x".join(labels)

    def preserves(self, tau: Sequence[int]) -> bool:
        n = self.rank
        if sorted(tau) != list(range(n)):
            return False
        return all(self.cartan[tau[i]][tau[j]] == self.cartan[i][j] for i in range(n) for j in range(n))

    def to_json(self) -> dict:
        return {
            "cartan": [list(row) for row in self.cartan],
            "type": self.dynkin_type(),
            "rank": self.rank,
            "root_count": len(self.roots),
            "roots": [list(r) for r in self.roots],
            "positive_roots": [list(r) for r in self.positive_roots()],
            "highest_roots": [list(r) for r in self.highest_roots()],
        }


def _classify_component(n: int, count: int, lengths: List[Fraction]) -> str:
    if count == n * (n + 1):
        return f"A{n}"
    if n == 2 and count == 12:
        return "G2"
    if n == 4 and count == 48:
        return "F4"
    if count == 2 * n * n:
        if n == 2:
            return "B2"
        short = min(lengths)
        return f"B{n}" if sum(1 for d in lengths if d == short) == 1 else f"C{n}"
    if count == 2 * n * (n - 1):
        return f"D{n}"
    return {72: "E6", 126: "E7", 240: "E8"}.get(count, f"?{n}")


def _components(cartan: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    n = len(cartan)
    seen, out = set(), []
    for start in range(n):
        if start in seen:
            continue
        comp, queue = [], deque([start])
        seen.add(start)
        while queue:
            i = queue.popleft()
            comp.append(i)
            for j in range(n):
                if j not in seen and cartan[i][j] != 0:
                    seen.add(j)
                    queue.append(j)
        out.append(tuple(sorted(comp)))
    return out


def _symmetrizer(cartan: Sequence[Sequence[int]], components: List[Tuple[int, ...]]) -> List[Fraction]:
    n = len(cartan)
    d: List[Optional[Fraction]] = [None] * n
    for comp in components:
        d[comp[0]] = Fraction(1)
        queue = deque([comp[0]])
        while queue:
            i = queue.popleft()
            for j in comp:
                if j != i and cartan[i][j] != 0:
                    value = d[i] * Fraction(cartan[i][j], cartan[j][i])
                    if d[j] is None:
                        d[j] = value
                        queue.append(j)
                    elif d[j] != value:
                        raise NotFiniteType("Cartan matrix is not symmetrizable")
    # normalize so the shortest root of each component has d = 1
    for comp in components:
        low = min(d[i] for i in comp)
        for i in comp:
            d[i] = d[i] / low
    return d


def validate_cartan(cartan: Sequence[Sequence[int]]) -> None:
    n = len(cartan)
    if n == 0 or any(len(row) != n for row in cartan):
        raise ValueError("Cartan matrix must be square and nonempty")
    for i in range(n):
        if cartan[i][i] != 2:
            raise ValueError(f"diagonal entry ({i},{i}) must be 2")
        for j in range(n):
            if i != j:
                if cartan[i][j] > 0:
                    raise ValueError(f"off-diagonal entry ({i},{j}) must be <= 0")
                if (cartan[i][j] == 0) != (cartan[j][i] == 0):
                    raise ValueError(f"entries ({i},{j}) and ({j},{i}) must vanish together")


def build_root_system(cartan: Sequence[Sequence[int]], closure_bound: Optional[int] = None) -> RootSystem:
    """
    Close the simple roots under simple reflections.

    Finite type is checked by positive-definiteness of the symmetrized matrix;
    closure that exceeds the bound raises NotFiniteType.
    """
    validate_cartan(cartan)
    cartan = tuple(tuple(int(v) for v in row) for row in cartan)
    n = len(cartan)
    components = _components(cartan)
    d = _symmetrizer(cartan, components)
    sym = Matrix(n, n, lambda i, j: Rational(d[i].numerator, d[i].denominator) * cartan[i][j])
    if not sym.is_positive_definite:
        raise NotFiniteType("symmetrized Cartan matrix is not positive definite")

    bound = closure_bound or settings.closure_bound
    simple = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    seen = set(simple)
    queue = deque(simple)
    while queue:
        beta = queue.popleft()
        for i in range(n):
            coroot_value = sum(b * cartan[i][j] for j, b in enumerate(beta))
            image = tuple(b - coroot_value if j == i else b for j, b in enumerate(beta))
            if image not in seen:
                seen.add(image)
                queue.append(image)
                if len(seen) > bound:
                    raise NotFiniteType(f"reflection closure exceeded {bound} roots")
    roots = tuple(sorted(seen, key=lambda r: (-sum(r) if sum(r) < 0 else sum(r), sum(r) < 0, r)))
    logger.info("built root system of rank %d with %d roots", n, len(roots))
    return RootSystem(cartan, roots, tuple(d), tuple(components))


@dataclass(frozen=True)
class AffineRoot:
    """psi = alpha + n, evaluated on alcove coordinates."""

    gradient: Root
    level: int

    def __call__(self, x: Sequence[Fraction]) -> Fraction:
        return sum((Fraction(g) * xi for g, xi in zip(self.gradient, x)), Fraction(0)) + self.level

    def as_affine(self, extra: int = 0) -> Affine:
        return Affine(tuple(Fraction(g) for g in self.gradient) + (Fraction(0),) * extra, Fraction(self.level), str(self))

    def permuted(self, tau: Sequence[int]) -> "AffineRoot":
        image = [0] * len(self.gradient)
        for i, g in enumerate(self.gradient):
            image[tau[i]] = g
        return AffineRoot(tuple(image), self.level)

    def __str__(self) -> str:
        terms = []
        for i, g in enumerate(self.gradient):
            if g:
                sign = "-" if g < 0 else "+"
                mag = "" if abs(g) == 1 else f"{abs(g)}*"
                terms.append(f"{sign}{mag}a{i}")
        text = "".join(terms).lstrip("+")
        if self.level:
            text += f"{self.level:+d}"
        return text


def affine_roots(rs: RootSystem, level_bound: int) -> List[AffineRoot]:
    if level_bound < 0:
        raise ValueError("level bound must be non-negative")
    return [AffineRoot(r, n) for r in rs.roots for n in range(-level_bound, level_bound + 1)]


@dataclass(frozen=True)
class Face:
    walls: FrozenSet[int]
    vertices: Tuple[Point, ...]
    dimension: int

    @property
    def barycenter(self) -> Point:
        k = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / k for i in range(len(self.vertices[0])))


@dataclass(frozen=True)
class Alcove:
    root_system: RootSystem
    walls: Tuple[AffineRoot, ...]
    faces: Tuple[Face, ...]
    incidence: Tuple[Tuple[int, int], ...] = field(default=())

    @property
    def dimension(self) -> int:
        return self.root_system.rank

    @property
    def vertices(self) -> List[Point]:
        return sorted(f.vertices[0] for f in self.faces if f.dimension == 0)

    def inequalities(self, extra: int = 0) -> List[Affine]:
        return [w.as_affine(extra) for w in self.walls]

    def contains(self, x: Sequence[Fraction], closed: bool = True) -> bool:
        if closed:
            return all(w(x) >= 0 for w in self.walls)
        return all(w(x) > 0 for w in self.walls)

    def face_of(self, x: Sequence[Fraction]) -> Optional[Face]:
        """The unique face containing a point of the closure."""
        zero = frozenset(i for i, w in enumerate(self.walls) if w(x) == 0)
        if not self.contains(x):
            return None
        return next((f for f in self.faces if f.walls == zero), None)

    def wall_permutation(self, tau: Sequence[int]) -> List[int]:
        """Action of a diagram automorphism on wall indices."""
        images = [w.permuted(tau) for w in self.walls]
        return [self.walls.index(img) for img in images]

    def fixed_faces(self, tau: Sequence[int]) -> Dict[str, int]:
        """Counts of faces fixed setwise and pointwise by tau."""
        perm = self.wall_permutation(tau)
        setwise = [f for f in self.faces if frozenset(perm[i] for i in f.walls) == f.walls]

        def moved(v: Point) -> Point:
            image = [Fraction(0)] * len(v)
            for i, value in enumerate(v):
                image[tau[i]] = value
            return tuple(image)

        pointwise = [f for f in setwise if all(moved(v) == v for v in f.vertices)]
        return {"setwise": len(setwise), "pointwise": len(pointwise)}

    def to_json(self) -> dict:
        return {
            "walls": [str(w) for w in self.walls],
            "faces": [
                {
                    "walls": sorted(f.walls),
                    "dimension": f.dimension,
                    "vertices": [[str(c) for c in v] for v in f.vertices],
                    "barycenter": [str(c) for c in f.barycenter],
                }
                for f in self.faces
            ],
            "incidence": [list(pair) for pair in self.incidence],
        }


def fundamental_alcove(rs: RootSystem) -> Alcove:
    """
    Walls alpha_i(x) >= 0 for simple roots and 1 - theta(x) >= 0 for the highest
    root of each component. Faces are the nonempty sets where a subset of the
    walls vanishes and the rest are positive.
    """
    n = rs.rank
    walls = [AffineRoot(rs.simple(i), 0) for i in range(n)]
    walls += [AffineRoot(tuple(-c for c in theta), 1) for theta in rs.highest_roots()]
    affine = [w.as_affine() for w in walls]
    all_vertices = vertices(n, affine)

    faces = []
    for size in range(len(walls) + 1):
        for subset in combinations(range(len(walls)), size):
            on_face = [v for v in all_vertices if all(affine[i](v) == 0 for i in subset)]
            if not on_face:
                continue
            others = [i for i in range(len(walls)) if i not in subset]
            if not all(any(affine[i](v) > 0 for v in on_face) for i in others):
                continue
            base = on_face[0]
            dim = rank([[a - b for a, b in zip(v, base)] for v in on_face[1:]]) if len(on_face) > 1 else 0
            faces.append(Face(frozenset(subset), tuple(on_face), dim))
    faces.sort(key=lambda f: (f.dimension, sorted(f.walls)))
    incidence = tuple(
        (i, j)
        for i, small in enumerate(faces)
        for j, big in enumerate(faces)
        if i != j and small.walls > big.walls
    )
    logger.debug("alcove of rank %d: %d walls, %d faces", n, len(walls), len(faces))
    return Alcove(rs, tuple(walls), tuple(faces), incidence)
