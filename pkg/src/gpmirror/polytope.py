"""Reflexive lattice simplices and their Greene–Plesser toric data.

A simplex is given by ``n`` vertices in ``Z^(n-1)``. Validation computes the
dual vertices ``w_j`` (one per facet, the facet opposite ``v_j`` being
``{x : <x, w_j> = -1}``), the degrees ``d_j = <v_j, w_j> + 1``, the total
degree ``d = lcm(d_j)`` and the weights ``q_j = d / d_j``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from . import linalg
from .errors import NotASimplex, NotReflexive, OriginNotInterior, PreconditionViolation

Point = tuple[int, ...]


@dataclass(frozen=True)
class ReflexiveSimplex:
    vertices: tuple[Point, ...]
    dual_vertices: tuple[Point, ...]
    degrees: tuple[int, ...]
    total_degree: int
    weights: tuple[int, ...]
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def dim(self) -> int:
        return self.n - 1

    def pairing(self, m: Sequence[int]) -> tuple[int, ...]:
        """The values ``<w_i, m>`` for all i."""
        return tuple(linalg.dot(w, m) for w in self.dual_vertices)

    def contains(self, m: Sequence[int]) -> bool:
        return all(x >= -1 for x in self.pairing(m))

    def tight_facets(self, m: Sequence[int]) -> frozenset[int]:
        """Indices j whose facet (opposite v_j) contains m."""
        return frozenset(j for j, x in enumerate(self.pairing(m)) if x == -1)

    def bounding_box(self) -> list[range]:
        return [range(min(c), max(c) + 1) for c in zip(*self.vertices)]

    def to_json(self) -> dict:
        return {"name": self.name, "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class BoundaryPointSet:
    points: tuple[Point, ...]
    face_tags: tuple[tuple[int, ...], ...]  # vertex indices spanning the smallest face

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def index(self, p: Sequence[int]) -> int:
        return self.points.index(tuple(p))


@dataclass(frozen=True)
class GreenePlesserGroup:
    invariant_factors: tuple[int, ...]

    @property
    def order(self) -> int:
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out


def validate_reflexive(vertices: Sequence[Sequence[int]], name: str = "") -> ReflexiveSimplex:
    """Check that ``vertices`` span a reflexive simplex and derive its data."""
    verts = tuple(tuple(int(x) for x in v) for v in vertices)
    n = len(verts)
    if n < 2 or any(len(v) != n - 1 for v in verts):
        raise NotASimplex(f"need n >= 2 vectors of length n-1, got {n} vectors")
    diffs = [[a - b for a, b in zip(v, verts[0])] for v in verts[1:]]
    if linalg.rank(diffs) != n - 1:
        raise NotASimplex("vertices are affinely dependent")

    duals = []
    for j in range(n):
        others = [verts[i] for i in range(n) if i != j]
        w = linalg.solve(others, [-1] * (n - 1))
        if w is None:
            raise OriginNotInterior(f"facet opposite vertex {j} passes through the origin")
        if linalg.dot(verts[j], w) <= -1:
            raise OriginNotInterior(f"origin lies outside the facet opposite vertex {j}")
        if any(c.denominator != 1 for c in w):
            raise NotReflexive(f"dual vertex {j} is not integral: {[str(c) for c in w]}")
        duals.append(tuple(int(c) for c in w))

    degrees = tuple(linalg.dot(v, w) + 1 for v, w in zip(verts, duals))
    if sum(Fraction(1, d) for d in degrees) != 1:
        raise NotReflexive(f"sum of 1/d_i is not 1 for degrees {degrees}")
    d = lcm(*degrees)
    q = tuple(d // di for di in degrees)
    if any(sum(qi * w[k] for qi, w in zip(q, duals)) for k in range(n - 1)):
        raise NotReflexive("weighted sum of dual vertices is nonzero")
    if sum(q) != d:
        raise NotReflexive("total degree differs from the sum of weights")

    simplex = ReflexiveSimplex(verts, tuple(duals), degrees, d, q, name)
    interior = [m for m in itertools.product(*simplex.bounding_box())
                if all(x > -1 for x in simplex.pairing(m))]
    if interior != [tuple([0] * (n - 1))]:
        raise NotReflexive(f"interior lattice points are {interior}, expected only the origin")
    return simplex


def load_simplex(path: str | Path) -> ReflexiveSimplex:
    data = json.loads(Path(path).read_text())
    return validate_reflexive(data["vertices"], data.get("name", Path(path).stem))


def _facet_points(simplex: ReflexiveSimplex, j: int) -> list[Point]:
    """Lattice points on the facet opposite v_j, solving for one coordinate."""
    w = simplex.dual_vertices[j]
    k = max(range(len(w)), key=lambda i: (abs(w[i]), -i))
    box = simplex.bounding_box()
    free = [box[i] for i in range(len(w)) if i != k]
    out = []
    for rest in itertools.product(*free):
        partial = sum(w[i] * x for i, x in zip([i for i in range(len(w)) if i != k], rest))
        num = -1 - partial
        if num % w[k]:
            continue
        m = list(rest)
        m.insert(k, num // w[k])
        if simplex.contains(m):
            out.append(tuple(m))
    return out


def boundary_points(simplex: ReflexiveSimplex) -> BoundaryPointSet:
    """Boundary lattice points not in the relative interior of a facet.

    Vertices are always kept, which only matters in dimension 1 where the
    facets are the vertices themselves.
    """
    found: set[Point] = set()
    for j in range(simplex.n):
        found.update(_facet_points(simplex, j))
    verts = set(simplex.vertices)
    keep = []
    for m in sorted(found):
        tight = simplex.tight_facets(m)
        if len(tight) >= 2 or m in verts:
            keep.append(m)
    tags = tuple(tuple(i for i in range(simplex.n) if i not in simplex.tight_facets(m))
                 for m in keep)
    return BoundaryPointSet(tuple(keep), tags)


def iota_matrix(simplex: ReflexiveSimplex) -> list[list[int]]:
    """Matrix of ``(k, m) -> k e_I + sum_i <w_i, m> e_i``; rows indexed by I."""
    return [[1, *w] for w in simplex.dual_vertices]


def iota(simplex: ReflexiveSimplex, k: int, m: Sequence[int]) -> tuple[int, ...]:
    return tuple(k + x for x in simplex.pairing(m))


def greene_plesser_group(simplex: ReflexiveSimplex) -> GreenePlesserGroup:
    """The finite group ``ker(q) / iota(0 + M)`` via a Smith form.

    The image of ``M`` is written in coordinates of a basis of ``ker(q)``
    and the resulting square matrix is diagonalised.
    """
    kernel = linalg.integer_kernel([list(simplex.weights)])
    W = [list(c) for c in zip(*simplex.dual_vertices)]  # images of the basis of M
    coords = []
    for col in W:
        c = linalg.lattice_coordinates(kernel, col)
        if c is None:
            raise NotReflexive("image of M is not contained in ker(q)")
        coords.append(c)
    factors = linalg.invariant_factors(coords)
    if len(factors) != len(kernel):
        raise NotReflexive("image of M has smaller rank than ker(q)")
    return GreenePlesserGroup(tuple(f for f in factors if f > 1))


def mirror_potential(simplex: ReflexiveSimplex, P: BoundaryPointSet | Sequence[Point],
                     coefficients: Mapping[Point, Any] | Any = "b") -> list[tuple[tuple[int, ...], Any]]:
    """Monomials of ``W_b = -z^iota(1,0) + sum_p b_p z^iota(1,p)``.

    ``coefficients`` is either a mapping from points to values or a single
    token used for every point.
    """
    points = list(P)
    if not points:
        raise PreconditionViolation("the point set P is empty")
    if isinstance(coefficients, Mapping):
        coeff = lambda p: coefficients[tuple(p)]  # noqa: E731
    else:
        coeff = lambda p: coefficients  # noqa: E731
    zero = [0] * simplex.dim
    terms = [(iota(simplex, 1, zero), -1)]
    terms += [(iota(simplex, 1, p), coeff(p)) for p in points]
    d = simplex.total_degree
    for e, _ in terms:
        if linalg.dot(simplex.weights, e) != d:
            raise NotReflexive(f"monomial {e} is not of weighted degree {d}")
    return terms


def hypersurface_simplex(n: int) -> ReflexiveSimplex:
    """The simplex with vertices e_1, ..., e_{n-1}, -(1, ..., 1)."""
    verts = [tuple(int(i == j) for j in range(n - 1)) for i in range(n - 1)]
    verts.append(tuple([-1] * (n - 1)))
    return validate_reflexive(verts, f"fermat{n}")


def mirror_hypersurface_simplex(n: int) -> ReflexiveSimplex:
    """The simplex ``{x_i >= -1, sum x_i <= 1}`` in dimension n-1."""
    m = n - 1
    verts = [tuple([-1] * m)]
    for i in range(m):
        verts.append(tuple(n - 1 if j == i else -1 for j in range(m)))
    return validate_reflexive(verts, f"mirror{n}")


_DATA = Path(__file__).with_name("data")


def builtin(name: str) -> ReflexiveSimplex:
    """Load a bundled example (``quintic``, ``cubic``, ``mirror_quartic``, ``interval``)."""
    return load_simplex(_DATA / f"{name}.json")


def describe(simplex: ReflexiveSimplex, P: Optional[BoundaryPointSet] = None) -> dict:
    P = P or boundary_points(simplex)
    return {
        "name": simplex.name,
        "vertices": [list(v) for v in simplex.vertices],
        "dual_vertices": [list(w) for w in simplex.dual_vertices],
        "degrees": list(simplex.degrees),
        "weights": list(simplex.weights),
        "total_degree": simplex.total_degree,
        "points": [list(p) for p in P.points],
        "face_tags": [list(t) for t in P.face_tags],
        "greene_plesser_group": list(greene_plesser_group(simplex).invariant_factors),
    }
