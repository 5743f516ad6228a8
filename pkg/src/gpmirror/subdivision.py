"""Regular subdivisions, MPCP/MPCS fans, lcm(lambda) and smoothness tests.

Heights follow the valuation convention: a point ``p`` with height ``v(p)``
is lifted to ``(p, v(p))`` and the cells are the projections of the lower
faces. Equivalently each cell carries an affine functional ``l`` with
``l(q) <= v(q)`` for every finite-height ``q`` and equality exactly on the
cell. ``None`` stands for an infinite height (a missing monomial).
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import linalg
from .errors import (BudgetExceeded, InfiniteVertexHeight, MpcpViolation,
                     PreconditionViolation)
from .finitefield import GF, MAX_ORDER, field as gf, irreducible_polynomials, is_prime
from .polytope import BoundaryPointSet, ReflexiveSimplex, boundary_points, greene_plesser_group, iota

Point = tuple[int, ...]
Height = Optional[Fraction]

DEFAULT_BUDGET = 10 ** 7


def parse_height(h) -> Height:
    if h is None:
        return None
    if isinstance(h, str):
        if h.strip().lower() in ("inf", "infinity", "+inf", "oo"):
            return None
        return Fraction(h)
    if isinstance(h, float):
        if math.isinf(h):
            return None
        raise PreconditionViolation("heights must be exact; pass a string or Fraction")
    return Fraction(h)


def format_height(h: Height) -> str:
    return "inf" if h is None else str(h)


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    n = abs(n)
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# -- affine lattice frames ----------------------------------------------------

def affine_frame(points: Sequence[Sequence[int]]):
    """Coordinates of ``points`` in a basis of the lattice of their affine hull.

    Returns ``(coords, basis)``: the affine lattice is saturated, so unimodular
    simplices get volume 1 whatever the ambient dimension.
    """
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points]
    n = len(p0)
    if not any(any(d) for d in diffs):
        return [()] * len(points), []
    normals = linalg.integer_kernel(diffs)
    basis = linalg.integer_kernel(normals) if normals else linalg.identity(n)
    coords = []
    for d in diffs:
        c = linalg.lattice_coordinates(basis, d)
        assert c is not None
        coords.append(tuple(c))
    return coords, basis


def _in_hull(coords: Sequence[Sequence[int]], pool: Sequence[int], x: Sequence) -> bool:
    gens = [list(coords[i]) + [1] for i in pool]
    return linalg.in_cone(gens, list(x) + [1])


def _extreme(coords, idx: Sequence[int]) -> list[int]:
    return [i for i in idx if not _in_hull(coords, [j for j in idx if j != i], coords[i])]


def _simplex_volume(coords, idx: Sequence[int]) -> int:
    x0 = coords[idx[0]]
    return abs(linalg.det([[a - b for a, b in zip(coords[i], x0)] for i in idx[1:]]))


def _lower_faces(coords, heights: Sequence[Height], dim: int):
    """Maximal lower faces of the lifted finite-height points.

    Yields ``(equality set, (a, c))`` with ``l(x) = <a, x> + c``.
    """
    finite = [i for i, h in enumerate(heights) if h is not None]
    found: list[tuple[frozenset, tuple]] = []
    for S in itertools.combinations(finite, dim + 1):
        if any(set(S) <= cell for cell, _ in found):
            continue
        A = [list(coords[i]) + [1] for i in S]
        if linalg.det(A) == 0:
            continue
        sol = linalg.solve(A, [heights[i] for i in S])
        a, c = sol[:dim], sol[dim]
        eq = []
        for q in finite:
            val = linalg.dot(a, coords[q]) + c
            if val > heights[q]:
                break
            if val == heights[q]:
                eq.append(q)
        else:
            found.append((frozenset(eq), (tuple(a), c)))
    return found


def _triangulate(coords, idx: Sequence[int], dim: int) -> list[tuple[int, ...]]:
    """A placing triangulation of the points ``idx`` (vertices only)."""
    base = 2
    while True:
        hts: list[Height] = [None] * len(coords)
        for k, i in enumerate(idx):
            hts[i] = Fraction(base) ** k
        faces = _lower_faces(coords, hts, dim)
        if all(len(cell) == dim + 1 for cell, _ in faces):
            return [tuple(sorted(cell)) for cell, _ in faces]
        base += 1


# -- regular subdivisions -----------------------------------------------------

@dataclass(frozen=True)
class Cell:
    points: tuple[int, ...]          # finite-height points on the lower face
    vertices: tuple[int, ...]        # extreme points of the cell
    functional: tuple[tuple[Fraction, ...], Fraction]
    volume: int
    lattice_points: tuple[int, ...]  # every point of the configuration in the closed cell

    @property
    def extra_points(self) -> tuple[int, ...]:
        v = set(self.vertices)
        return tuple(i for i in self.lattice_points if i not in v)


@dataclass
class RegularSubdivision:
    points: tuple[Point, ...]
    heights: tuple[Height, ...]
    coords: list[tuple[int, ...]]
    dim: int
    vertices: tuple[int, ...]
    cells: list[Cell]
    normalization: str = "affine-hull lattice"

    def is_simplex(self, cell: Cell) -> bool:
        return len(cell.vertices) == self.dim + 1

    @property
    def total_volume(self) -> int:
        return sum(c.volume for c in self.cells)

    def functional_value(self, cell: Cell, i: int) -> Fraction:
        a, c = cell.functional
        return linalg.dot(a, self.coords[i]) + c

    def to_json(self) -> dict:
        pts = self.points
        return {
            "dimension": self.dim,
            "normalization": self.normalization,
            "points": [list(p) for p in pts],
            "heights": [format_height(h) for h in self.heights],
            "cells": [{
                "vertices": [list(pts[i]) for i in c.vertices],
                "volume": c.volume,
                "simplex": self.is_simplex(c),
                "extra_points": [list(pts[i]) for i in c.extra_points],
            } for c in self.cells],
            "total_volume": self.total_volume,
        }


def _cell_points(coords, cell_vertices: Sequence[int], dim: int, simplex: bool) -> list[int]:
    verts = [coords[i] for i in cell_vertices]
    lo = [min(v[k] for v in verts) for k in range(dim)]
    hi = [max(v[k] for v in verts) for k in range(dim)]
    out = []
    if simplex:
        x0 = verts[0]
        M = linalg.transpose([[a - b for a, b in zip(v, x0)] for v in verts[1:]])
        Minv = linalg.inverse(M)
    for i, x in enumerate(coords):
        if any(not lo[k] <= x[k] <= hi[k] for k in range(dim)):
            continue
        if simplex:
            lam = linalg.matvec(Minv, [a - b for a, b in zip(x, x0)])
            inside = all(t >= 0 for t in lam) and sum(lam) <= 1
        else:
            inside = _in_hull(coords, cell_vertices, x)
        if inside:
            out.append(i)
    return out


def regular_subdivision(points: Sequence[Sequence[int]], heights: Sequence,
                        vertices: Optional[Sequence[Sequence[int]]] = None) -> RegularSubdivision:
    """Subdivision of ``conv(points)`` induced by ``heights``.

    ``vertices`` may list the vertices of the polytope to skip the extreme
    point search. Raises InfiniteVertexHeight if a vertex has infinite height.
    """
    pts = tuple(tuple(int(x) for x in p) for p in points)
    hts = tuple(parse_height(h) for h in heights)
    if len(pts) != len(hts):
        raise PreconditionViolation("points and heights differ in length")
    if len(set(pts)) != len(pts):
        raise PreconditionViolation("repeated point in the configuration")
    coords, _ = affine_frame(pts)
    dim = len(coords[0])
    if dim == 0:
        raise PreconditionViolation("the configuration is a single point")
    if vertices is None:
        vidx = tuple(_extreme(coords, range(len(pts))))
    else:
        vidx = tuple(pts.index(tuple(v)) for v in vertices)
    bad = [pts[i] for i in vidx if hts[i] is None]
    if bad:
        raise InfiniteVertexHeight(f"vertices with infinite height: {bad}")

    cells = []
    for eq, functional in _lower_faces(coords, hts, dim):
        eq = sorted(eq)
        verts = _extreme(coords, eq) if len(eq) > dim + 1 else eq
        simplex = len(verts) == dim + 1
        if simplex:
            vol = _simplex_volume(coords, verts)
        else:
            vol = sum(_simplex_volume(coords, s) for s in _triangulate(coords, verts, dim))
        inside = _cell_points(coords, verts, dim, simplex)
        cells.append(Cell(tuple(eq), tuple(verts), functional, vol, tuple(inside)))
    cells.sort(key=lambda c: [pts[i] for i in c.vertices])
    return RegularSubdivision(pts, hts, coords, dim, vidx, cells)


def polytope_volume(points: Sequence[Sequence[int]]) -> int:
    """Normalized volume of ``conv(points)`` in its affine-hull lattice."""
    pts = [tuple(p) for p in points]
    coords, _ = affine_frame(pts)
    dim = len(coords[0])
    verts = _extreme(coords, range(len(pts)))
    return sum(_simplex_volume(coords, s) for s in _triangulate(coords, verts, dim))


# -- tropical smoothness --------------------------------------------------------

@dataclass
class TropicalVerdict:
    smooth: bool
    reasons: list[dict]
    subdivision: RegularSubdivision
    characteristic: int

    @property
    def verdict(self) -> str:
        return "smooth" if self.smooth else "inconclusive"

    def to_json(self) -> dict:
        out = self.subdivision.to_json()
        out.update({"verdict": self.verdict, "characteristic": self.characteristic,
                    "reasons": self.reasons})
        return out


def tropical_smoothness(points: Sequence[Sequence[int]], heights: Sequence, char: int = 0,
                        vertices: Optional[Sequence[Sequence[int]]] = None,
                        ambient_smooth: bool = True) -> TropicalVerdict:
    """Sufficient criterion for smoothness of a hypersurface with given valuations.

    The verdict is ``smooth`` when every cell is a simplex meeting the
    configuration only in its vertices and no cell volume is divisible by
    ``char``; otherwise ``inconclusive`` with the failed conditions per cell.
    ``ambient_smooth`` declares that the ambient toric variety is smooth.
    """
    if char and not is_prime(char):
        raise PreconditionViolation(f"characteristic {char} is not prime")
    sub = regular_subdivision(points, heights, vertices)
    pts = sub.points
    reasons = []
    if not ambient_smooth:
        reasons.append({"cell": None, "reason": "ambient_not_smooth"})
    for k, cell in enumerate(sub.cells):
        tag = [list(pts[i]) for i in cell.vertices]
        if not sub.is_simplex(cell):
            reasons.append({"cell": k, "vertices": tag, "reason": "not_simplex"})
        if cell.extra_points:
            reasons.append({"cell": k, "vertices": tag, "reason": "meets_points_off_vertices",
                            "points": [list(pts[i]) for i in cell.extra_points]})
        if char and cell.volume % char == 0:
            reasons.append({"cell": k, "vertices": tag, "reason": "volume_divisible_by_char",
                            "volume": cell.volume})
    return TropicalVerdict(not reasons, reasons, sub, char)


def newton_points(simplex: ReflexiveSimplex) -> list[Point]:
    """Lattice points of ``conv(d_i e_i)`` in ``Z^I``, i.e. ``x >= 0`` with ``<q, x> = d``."""
    q, d = simplex.weights, simplex.total_degree
    out = []

    def rec(i, rest, acc):
        if i == len(q) - 1:
            if rest % q[i] == 0:
                out.append(tuple(acc + [rest // q[i]]))
            return
        for x in range(rest // q[i] + 1):
            rec(i + 1, rest - q[i] * x, acc + [x])

    rec(0, d, [])
    return sorted(out)


def potential_heights(simplex: ReflexiveSimplex, lam: Mapping | Sequence,
                      P: Optional[BoundaryPointSet] = None):
    """Height data of ``-z^e_I + sum_p b_p z^iota(1,p)`` with ``val(b_p) = lam_p``.

    Returns ``(points, heights, vertices)`` on the lattice points of the
    Newton polytope in ``Z^I``; monomials absent from the potential get
    infinite height.
    """
    P = P or boundary_points(simplex)
    lam = [Fraction(x) for x in (lam.values() if isinstance(lam, Mapping) else lam)]
    pts = newton_points(simplex)
    hts: dict[Point, Height] = {p: None for p in pts}
    hts[iota(simplex, 1, [0] * simplex.dim)] = Fraction(0)
    for p, l in zip(P.points, lam):
        hts[iota(simplex, 1, p)] = l
    verts = [tuple(d if j == i else 0 for j in range(simplex.n)) for i, d in enumerate(simplex.degrees)]
    return pts, [hts[p] for p in pts], verts


# -- brute-force oracle ---------------------------------------------------------

@dataclass
class SmoothnessVerdict:
    smooth: bool
    witness: Optional[tuple[int, ...]]
    field: str
    points_scanned: int

    @property
    def verdict(self) -> str:
        return "smooth" if self.smooth else "singular"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "field": self.field,
                "witness": list(self.witness) if self.witness else None,
                "points_scanned": self.points_scanned}


def _derivatives(terms, F: GF, n: int):
    out = []
    for j in range(n):
        d = []
        for e, c in terms:
            if e[j]:
                cc = int(F.mul[c, F.embed(e[j])])
                if cc:
                    d.append((tuple(x - (k == j) for k, x in enumerate(e)), cc))
        out.append(d)
    return out


def _evaluate(terms, F: GF, X: np.ndarray, powers: dict) -> np.ndarray:
    val = np.zeros(X.shape[1], dtype=np.int32)
    for e, c in terms:
        t = np.full(X.shape[1], c, dtype=np.int32)
        for j, k in enumerate(e):
            if k:
                if k not in powers:
                    powers[k] = F.power_table(k)
                t = F.mul[t, powers[k][X[j]]]
        val = F.add[val, t]
    return val


def _point_blocks(q: int, n: int, projective: bool, chunk: int = 1 << 16):
    """Arrays of shape (n, L) covering the punctured cone (or one point per line)."""
    leads = range(n) if projective else [None]
    for lead in leads:
        free = n - lead - 1 if projective else n
        total = q ** free
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            block = np.zeros((n, len(idx)), dtype=np.int32)
            cols = range(lead + 1, n) if projective else range(n)
            rest = idx.copy()
            for j in reversed(list(cols)):
                block[j] = rest % q
                rest //= q
            if projective:
                block[lead] = 1
            elif start == 0:
                block, idx = block[:, 1:], idx[1:]
            yield block


def bruteforce_smooth(potential: Iterable[tuple[Sequence[int], int]], F: GF,
                      weights: Optional[Sequence[int]] = None,
                      budget: int = DEFAULT_BUDGET) -> SmoothnessVerdict:
    """Exhaustive Jacobian-criterion scan over the punctured cone ``F^n - 0``.

    ``potential`` lists ``(exponent, coefficient)`` with coefficients encoded
    as elements of ``F``. When all weights agree the polynomial is homogeneous
    and one point per line is enough.
    """
    terms = [(tuple(int(x) for x in e), int(c) % F.q if c >= 0 else int(F.neg[(-c) % F.q]))
             for e, c in potential]
    terms = [(e, c) for e, c in terms if c]
    if not terms:
        raise PreconditionViolation("the potential is zero")
    n = len(terms[0][0])
    if weights is None:
        degs = {sum(e) for e, _ in terms}
        projective = len(degs) == 1
    else:
        if len(weights) != n:
            raise PreconditionViolation("weights do not match the number of variables")
        projective = len(set(weights)) == 1
    q = F.q
    count = (q ** n - 1) // (q - 1) if projective else q ** n - 1
    if count > budget:
        raise BudgetExceeded(f"{count} points over {F.name} exceed the budget {budget}")
    derivs = _derivatives(terms, F, n)
    powers: dict = {}
    for X in _point_blocks(q, n, projective):
        mask = _evaluate(terms, F, X, powers) == 0
        for d in derivs:
            if not mask.any():
                break
            if d:
                mask &= _evaluate(d, F, X, powers) == 0
        hits = np.nonzero(mask)[0]
        if len(hits):
            return SmoothnessVerdict(False, tuple(int(x) for x in X[:, hits[0]]), F.name, count)
    return SmoothnessVerdict(True, None, F.name, count)


# -- soundness harness ----------------------------------------------------------

@dataclass
class SoundnessCase:
    index: int
    kind: str
    size: int
    prime: int
    points: list[Point]
    heights: list[Height]
    verdict: str
    oracle: Optional[dict] = None

    @property
    def false_positive(self) -> bool:
        return self.verdict == "smooth" and not (self.oracle or {}).get("smooth_member_found", False)

    def to_json(self) -> dict:
        return {"index": self.index, "kind": self.kind, "size": self.size, "prime": self.prime,
                "points": [list(p) for p in self.points],
                "heights": [format_height(h) for h in self.heights],
                "verdict": self.verdict, "oracle": self.oracle,
                "false_positive": self.false_positive}


def _configuration(kind: str, size: int):
    if kind == "interval":
        pts = [(i,) for i in range(size + 1)]
        verts = [(0,), (size,)]
        hom = [(i, size - i) for i in range(size + 1)]
    else:
        pts = [(i, j) for i in range(size + 1) for j in range(size + 1 - i)]
        verts = [(0, 0), (size, 0), (0, size)]
        hom = [(i, j, size - i - j) for i, j in pts]
    return pts, verts, hom


def _scan_degrees(kind: str, size: int) -> list[int]:
    """Extensions of the coefficient field that contain every singular point.

    A binary form of degree <= 5 has its repeated factor of degree <= 2; a
    singular conic has a rational singular point; a reduced plane cubic has
    at most three singular points, so orbits of size 1, 2 or 3.
    """
    if kind == "interval":
        return [2] if size >= 4 else [1]
    return [1] if size <= 2 else [2, 3]


def find_smooth_member(kind: str, size: int, heights: Sequence[Height], coeffs: Sequence[int],
                       p: int, max_degree: int = 3, budget: int = DEFAULT_BUDGET) -> dict:
    """Search specializations ``t -> t0`` for a smooth member of the family.

    The family has coefficients ``c_i t^v_i``; ``t0`` runs over roots of
    monic irreducible polynomials over ``F_p`` of increasing degree, and each
    member is scanned over every extension listed by ``_scan_degrees`` so the
    brute-force answer is exact.
    """
    _, _, hom = _configuration(kind, size)
    tried = []
    ext = _scan_degrees(kind, size)
    for j in range(1, max_degree + 1):
        for g in irreducible_polynomials(p, j):
            if g == [0, 1]:
                continue
            if any(p ** (j * e) > MAX_ORDER for e in ext):
                break
            singular = None
            for e in ext:
                F = gf(p, j * e)
                t0 = min(F.roots(g))
                terms = []
                for exp, h, c in zip(hom, heights, coeffs):
                    if h is not None:
                        terms.append((exp, int(F.mul[F.embed(c), F.power(t0, int(h))])))
                res = bruteforce_smooth(terms, F, budget=budget)
                if not res.smooth:
                    singular = res
                    break
            tried.append({"minpoly": g, "smooth": singular is None})
            if singular is None:
                return {"smooth_member_found": True, "minpoly": g, "tried": len(tried)}
    return {"smooth_member_found": False, "tried": len(tried)}


def soundness_suite(instances: int = 200, seed: int = 0, primes: Sequence[int] = (2, 3, 5),
                    criterion=None) -> dict:
    """Random 1-D and 2-D height instances checked against the brute-force oracle.

    ``criterion`` replaces ``tropical_smoothness`` (used to check that the
    oracle catches a weakened test).
    """
    criterion = criterion or tropical_smoothness
    rng = random.Random(seed)
    cases = []
    for k in range(instances):
        kind = rng.choice(["interval", "triangle"])
        size = rng.randint(1, 4) if kind == "interval" else rng.choice([1, 2, 2, 3, 3])
        p = rng.choice(list(primes))
        pts, verts, _ = _configuration(kind, size)
        convex = rng.random() < 0.5  # near-convex heights favour fine triangulations
        hts: list[Height] = []
        for pt in pts:
            if pt not in verts and rng.random() < (0.1 if convex else 0.25):
                hts.append(None)
            elif convex:
                hts.append(Fraction(3 * sum(x * x for x in pt) + rng.randint(0, 2)))
            else:
                hts.append(Fraction(rng.randint(0, 3)))
        coeffs = [rng.randint(1, p - 1) for _ in pts]
        res = criterion(pts, hts, p, verts)
        case = SoundnessCase(k, kind, size, p, pts, hts, res.verdict)
        if res.verdict == "smooth":
            case.oracle = find_smooth_member(kind, size, hts, coeffs, p)
        cases.append(case)
    fps = [c for c in cases if c.false_positive]
    return {
        "seed": seed,
        "instances": instances,
        "smooth_verdicts": sum(c.verdict == "smooth" for c in cases),
        "false_positives": len(fps),
        "cases": [c.to_json() for c in cases],
    }


# -- MPCP fans ------------------------------------------------------------------

@dataclass
class Fan:
    points: tuple[Point, ...]
    heights: tuple[Fraction, ...]
    cones: list[tuple[int, ...]]   # maximal cones as indices into points
    rays: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "heights": [str(h) for h in self.heights],
            "cones": [[list(self.points[i]) for i in c] for c in self.cones],
            "rays": [list(self.points[i]) for i in self.rays],
        }


def _heights_vector(P: Sequence[Point], lam) -> list[Fraction]:
    if isinstance(lam, Mapping):
        lam = [lam[tuple(p)] for p in P]
    elif not isinstance(lam, (list, tuple)):
        lam = [lam] * len(P)
    lam = [Fraction(x) for x in lam]
    if len(lam) != len(P):
        raise PreconditionViolation("one height per point of P is required")
    if any(x <= 0 for x in lam):
        raise PreconditionViolation("heights must be positive")
    return lam


def fan_from_heights(simplex: ReflexiveSimplex, P: Optional[BoundaryPointSet] = None,
                     lam=1) -> Fan:
    """The fan of domains of linearity for heights ``lam`` on P.

    Its maximal cones are the cones over the facets of ``conv(p / lam_p)``.
    """
    P = P or boundary_points(simplex)
    pts = tuple(P.points)
    lam = _heights_vector(pts, lam)
    Q = [[Fraction(x) / l for x in p] for p, l in zip(pts, lam)]
    dim = simplex.dim
    facets: list[frozenset] = []
    for S in itertools.combinations(range(len(pts)), dim):
        if any(set(S) <= f for f in facets):
            continue
        A = [Q[i] for i in S]
        if linalg.rank(A) < dim:
            continue
        a = linalg.solve(A, [1] * dim)
        eq = []
        for j, x in enumerate(Q):
            val = linalg.dot(a, x)
            if val > 1:
                break
            if val == 1:
                eq.append(j)
        else:
            facets.append(frozenset(eq))
    cones = sorted(tuple(sorted(f)) for f in facets)
    rays = set()
    for c in cones:
        if len(c) == dim:
            rays.update(c)
        else:
            rays.update(j for j in c
                        if not linalg.in_cone([Q[i] for i in c if i != j], Q[j]))
    return Fan(pts, tuple(lam), cones, tuple(sorted(rays)))


@dataclass
class MpcpReport:
    verdict: str                 # "mpcs" | "mpcp_only" | "neither"
    fan: Fan
    witness: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "witness": self.witness}
        out.update(self.fan.to_json())
        return out


def _common_facets(simplex: ReflexiveSimplex, pts, S) -> frozenset:
    out = None
    for i in S:
        t = simplex.tight_facets(pts[i])
        out = t if out is None else out & t
    return out


def mpcp_mpcs_check(simplex: ReflexiveSimplex, lam=1,
                    P: Optional[BoundaryPointSet] = None) -> MpcpReport:
    """Classify ``lam`` as satisfying MPCS, only MPCP, or neither."""
    fan = fan_from_heights(simplex, P, lam)
    pts, dim = fan.points, simplex.dim
    witness = []
    for c in fan.cones:
        if len(c) != dim:
            witness.append({"reason": "not_simplicial", "cone": [list(pts[i]) for i in c]})
        elif not _common_facets(simplex, pts, c):
            witness.append({"reason": "not_refinement", "cone": [list(pts[i]) for i in c]})
    if witness:
        return MpcpReport("neither", fan, witness)
    seen = set()
    for c in fan.cones:
        for r in range(1, dim + 1):
            for S in itertools.combinations(c, r):
                if S in seen:
                    continue
                seen.add(S)
                if len(_common_facets(simplex, pts, S)) < 2:
                    continue  # relative interior inside a top-dimensional cone
                gens = [list(pts[i]) for i in S]
                if any(f != 1 for f in linalg.invariant_factors(gens)):
                    witness.append({"reason": "boundary_cone_not_smooth",
                                    "cone": gens,
                                    "invariant_factors": linalg.invariant_factors(gens)})
    return MpcpReport("mpcp_only" if witness else "mpcs", fan, witness)


@dataclass
class VolumeReport:
    normalization: str
    cells: list[list[Point]]
    volumes: list[int]
    lcm: int
    prime_factors: dict[int, int]
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"normalization": self.normalization,
               "cells": [[list(p) for p in c] for c in self.cells],
               "volumes": self.volumes, "lcm": self.lcm,
               "prime_factors": {str(k): v for k, v in sorted(self.prime_factors.items())}}
        out.update(self.extra)
        return out


NORMALIZATIONS = ("M-lattice", "degree-sublattice")


def lcm_lambda(simplex: ReflexiveSimplex, lam=1, normalization: str = "M-lattice",
               P: Optional[BoundaryPointSet] = None) -> VolumeReport:
    """Volumes of the simplices ``conv(0, cone generators)`` decomposing the simplex.

    ``"M-lattice"`` measures in M. ``"degree-sublattice"`` measures the
    images ``conv(e_I, iota(1, p))`` in ``{<q, x> = 0}`` of ``Z^I``; those
    raw volumes are all multiples of the index of ``iota(0 + M)`` there,
    which is reported together with the rescaled values.
    """
    if normalization not in NORMALIZATIONS:
        raise PreconditionViolation(f"unknown normalization {normalization!r}")
    report = mpcp_mpcs_check(simplex, lam, P)
    if report.verdict == "neither":
        raise MpcpViolation(f"heights do not satisfy MPCP: {report.witness[0]}")
    fan = report.fan
    cells = [[fan.points[i] for i in c] for c in fan.cones]
    extra: dict = {}
    if normalization == "M-lattice":
        vols = [abs(linalg.det([list(p) for p in c])) for c in cells]
    else:
        kernel = linalg.integer_kernel([list(simplex.weights)])
        vols = []
        for c in cells:
            rows = [linalg.lattice_coordinates(kernel, iota(simplex, 0, p)) for p in c]
            vols.append(abs(linalg.det(rows)))
        index = greene_plesser_group(simplex).order
        extra = {"image_index": index,
                 "rescaled_volumes": [v // index for v in vols],
                 "rescaled_lcm": math.lcm(*[v // index for v in vols])}
    total = math.lcm(*vols)
    return VolumeReport(normalization, cells, vols, total, factorize(total), extra)


def refining_heights(simplex: ReflexiveSimplex, P: Optional[BoundaryPointSet] = None,
                     max_tries: int = 50) -> tuple[list[Fraction], list[int]]:
    """Heights ``1 + eps * h(p)`` with a generic strictly convex quadratic h.

    Each facet is then triangulated by the lower hull of ``h`` on its points.
    Returns ``(lam, coefficients of h)`` for the first choice satisfying MPCP.
    """
    P = P or boundary_points(simplex)
    dim = simplex.dim
    for t in range(max_tries):
        coeffs = [1 + t + 2 * k + k * k * (t % 3) for k in range(dim)]
        h = [sum(c * x * x for c, x in zip(coeffs, p)) for p in P.points]
        eps = Fraction(1, 100 * (max(h) + 1))
        for _ in range(8):
            lam = [1 + eps * x for x in h]
            rep = mpcp_mpcs_check(simplex, lam, P)
            if rep.verdict != "neither":
                return lam, coeffs
            if any(w["reason"] == "not_simplicial" for w in rep.witness) and \
                    not any(w["reason"] == "not_refinement" for w in rep.witness):
                break
            eps /= 10
    raise MpcpViolation("no refining height function found")
