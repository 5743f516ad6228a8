"""The relation lattice K of a point configuration and its submonoids.

For points ``P`` in a lattice ``M``, ``K`` is the kernel of ``Z^P -> M``.
Inside it live

* ``K_{>=0}``: relations with all coefficients nonnegative,
* ``K_p``: relations nonnegative away from the point ``p``,
* ``K_+``: the submonoid generated by all ``K_p``.

Enumeration is truncated by a positive linear grading ``lam`` on ``Z^P``.
A grading is admissible when every point ``p`` admits a linear functional
``l_p`` on ``M`` with ``l_p(p) = lam_p`` and ``l_p(q) < lam_q`` for ``q != p``;
then for ``u`` in ``K_p`` one has ``lam . u = sum_{q != p} mu_q u_q`` with
``mu_q = lam_q - l_p(q) > 0``, which bounds the search.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Optional, Sequence, Union

from . import linalg
from .errors import NicenessViolation, NotStronglyConvex, PreconditionViolation
from .polytope import BoundaryPointSet, ReflexiveSimplex, boundary_points

Vec = tuple[int, ...]


# -- the lattice K ------------------------------------------------------------

@dataclass(frozen=True)
class RelationLattice:
    points: tuple[Vec, ...]
    basis: tuple[Vec, ...]
    simplex: Optional[ReflexiveSimplex] = field(default=None, compare=False)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def index(self, p: Sequence[int]) -> int:
        return self.points.index(tuple(p))

    def image(self, u: Sequence[int]) -> Vec:
        """``sum_p u_p p`` in M."""
        return tuple(sum(c * p[k] for c, p in zip(u, self.points)) for k in range(self.dim))

    def contains(self, u: Sequence[int]) -> bool:
        return len(u) == self.size and not any(self.image(u))

    def in_knonneg(self, u: Sequence[int]) -> bool:
        return self.contains(u) and min(u) >= 0

    def in_kp(self, u: Sequence[int], p: int) -> bool:
        return self.contains(u) and all(c >= 0 for q, c in enumerate(u) if q != p)

    def unit(self, p: int) -> Vec:
        return tuple(int(q == p) for q in range(self.size))


def relation_lattice(points: Union[BoundaryPointSet, ReflexiveSimplex, Sequence[Sequence[int]]],
                     simplex: Optional[ReflexiveSimplex] = None) -> RelationLattice:
    """Integer basis of ``K = ker(Z^P -> M)``.

    When some ``dim`` of the points form a lattice basis of ``M`` the basis
    ``e_q - sum_b c_b e_b`` relative to that pivot set is used; it is sparse
    and readable. Otherwise the Smith-form kernel is reduced to Hermite form.
    """
    if isinstance(points, ReflexiveSimplex):
        simplex = points
        points = boundary_points(points)
    pts = tuple(tuple(int(x) for x in p) for p in points)
    if not pts:
        raise PreconditionViolation("empty point set")
    dim = len(pts[0])
    m = len(pts)
    A = [[p[k] for p in pts] for k in range(dim)]
    if linalg.rank(A) != dim:
        raise PreconditionViolation("points do not span M")
    pivots = None
    for combo in itertools.islice(itertools.combinations(range(m), dim), 20000):
        if abs(linalg.det([[pts[j][k] for j in combo] for k in range(dim)])) == 1:
            pivots = combo
            break
    if pivots is not None:
        Bt = [[pts[j][k] for j in pivots] for k in range(dim)]
        inv = linalg.inverse(Bt)
        basis = []
        for q in range(m):
            if q in pivots:
                continue
            c = linalg.matvec(inv, pts[q])
            u = [0] * m
            u[q] = 1
            for j, cj in zip(pivots, c):
                u[j] = -int(cj)
            basis.append(tuple(u))
    else:
        basis = [tuple(r) for r in linalg.hermite_rows(linalg.integer_kernel(A))]
    return RelationLattice(pts, tuple(basis), simplex)


# -- gradings -----------------------------------------------------------------

@dataclass(frozen=True)
class GradingFunctional:
    weights: tuple[Fraction, ...]
    certificates: tuple[tuple[Fraction, ...], ...]  # l_p as a vector on M, one per p
    slack: Fraction  # min over p, q != p of lam_q - l_p(q)
    points: tuple[Vec, ...]

    def grade(self, u: Sequence[int]) -> Fraction:
        return sum((w * c for w, c in zip(self.weights, u)), Fraction(0))

    @property
    def denominator(self) -> int:
        return lcm(*(w.denominator for w in self.weights))

    @property
    def int_weights(self) -> tuple[int, ...]:
        D = self.denominator
        return tuple(int(w * D) for w in self.weights)

    def mu(self, p: int) -> tuple[Fraction, ...]:
        """Slack vector ``lam_q - l_p(q)`` (zero at ``q = p``)."""
        ell = self.certificates[p]
        return tuple(self.weights[q] - linalg.dot(ell, self.points[q])
                     for q in range(len(self.points)))

    def to_json(self) -> list[str]:
        return [str(w) for w in self.weights]


def _certificate(points: Sequence[Vec], weights: Sequence[Fraction], p: int):
    """Maximise the minimal slack of a functional through ``(p, lam_p)``."""
    dim = len(points[0])
    nv = dim + 1
    A_ub, b_ub = [], []
    for q, pt in enumerate(points):
        if q != p:
            A_ub.append(list(pt) + [1])
            b_ub.append(weights[q])
    A_ub.append([0] * dim + [1])
    b_ub.append(max(weights))
    res = linalg.linprog([0] * dim + [1], A_ub, b_ub, [list(points[p]) + [0]], [weights[p]],
                         free=range(nv))
    if res.status != "optimal":
        return None, Fraction(0)
    return tuple(res.x[:dim]), res.value


def grading_from_weights(K: RelationLattice, weights: Sequence) -> GradingFunctional:
    """Check a user-supplied grading and attach its certificates."""
    w = tuple(Fraction(x) for x in weights)
    if len(w) != K.size or min(w) <= 0:
        raise PreconditionViolation("grading must be a positive vector indexed by P")
    certs = []
    slack = None
    for p in range(K.size):
        ell, t = _certificate(K.points, w, p)
        if ell is None or t <= 0:
            raise PreconditionViolation(f"grading is not strictly exposing at point {K.points[p]}")
        certs.append(ell)
        slack = t if slack is None else min(slack, t)
    return GradingFunctional(w, tuple(certs), slack, K.points)


def lattice_symmetries(simplex: ReflexiveSimplex, points: Sequence[Vec]) -> list[list[int]]:
    """Permutations of ``points`` induced by lattice automorphisms of the simplex."""
    V = simplex.vertices
    n, dim = simplex.n, simplex.dim
    inv = linalg.inverse([[V[i][k] for i in range(dim)] for k in range(dim)])
    pos = {p: i for i, p in enumerate(points)}
    perms = []
    for sigma in itertools.permutations(range(n)):
        img = [[V[sigma[i]][k] for i in range(dim)] for k in range(dim)]
        L = linalg.matmul(img, inv)
        if any(x.denominator != 1 for row in L for x in row):
            continue
        L = [[int(x) for x in row] for row in L]
        if tuple(linalg.matvec(L, V[-1])) != V[sigma[-1]] or abs(linalg.det(L)) != 1:
            continue
        try:
            perms.append([pos[tuple(linalg.matvec(L, p))] for p in points])
        except KeyError:
            continue
    return perms


def default_grading(K: RelationLattice) -> GradingFunctional:
    """Grading with maximal minimal slack, found by exact linear programming.

    The problem is invariant under lattice automorphisms of the simplex, so
    it is solved on orbit representatives; averaging shows that the optimum
    over symmetric gradings is a global optimum. The result is rescaled so
    that ``min_p lam_p = 1``.
    """
    pts = K.points
    m, dim = K.size, K.dim
    perms = lattice_symmetries(K.simplex, pts) if K.simplex is not None else []
    perms = perms or [list(range(m))]
    orbit_of = [min(g[i] for g in perms) for i in range(m)]
    reps = sorted(set(orbit_of))
    slot = {r: a for a, r in enumerate(reps)}
    no = len(reps)
    nv = no + no * dim + 1
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for a, p in enumerate(reps):
        row = [0] * nv
        row[a] = -1
        row[no + a * dim: no + (a + 1) * dim] = pts[p]
        A_eq.append(row)
        b_eq.append(0)
        row = [0] * nv
        row[a] = -1
        row[-1] = 1
        A_ub.append(row)
        b_ub.append(0)
        for q in range(m):
            if q == p:
                continue
            row = [0] * nv
            row[slot[orbit_of[q]]] -= 1
            row[-1] = 1
            row[no + a * dim: no + (a + 1) * dim] = pts[q]
            A_ub.append(row)
            b_ub.append(0)
    sizes = [orbit_of.count(r) for r in reps]
    A_eq.append(sizes + [0] * (nv - no))
    b_eq.append(m)
    c = [0] * nv
    c[-1] = 1
    res = linalg.linprog(c, A_ub, b_ub, A_eq, b_eq, free=range(no, nv))
    if res.status != "optimal" or res.value <= 0:
        raise NotStronglyConvex("no strictly positive grading exposes every point")
    lam = [res.x[slot[orbit_of[q]]] for q in range(m)]
    low = min(lam)
    return grading_from_weights(K, [x / low for x in lam])


# -- enumeration --------------------------------------------------------------

def _search(vectors: Sequence[Sequence[int]], weights: Sequence[int], budget: int):
    """All ``x >= 0`` with ``sum w_j x_j <= budget`` and ``sum x_j vec_j = 0``.

    Depth-first over coordinates; a branch is cut when the partial sum can
    no longer be cancelled within the remaining budget, tested on a fixed
    family of directions. Yields ``(x, weight)`` pairs.
    """
    k = len(vectors)
    f = len(vectors[0]) if k else 0
    dirs = []
    for i in range(f):
        for s in (1, -1):
            dirs.append(tuple(s * int(j == i) for j in range(f)))
    for s in (1, -1):
        dirs.append(tuple([s] * f))
    for i, j in itertools.combinations(range(f), 2):
        for s in (1, -1):
            d = [0] * f
            d[i], d[j] = 1, -s
            dirs.append(tuple(d))
            dirs.append(tuple(-x for x in d))
    # reach[i][d] = max(0, max_{j>=i} d(vec_j) / w_j): best gain per unit weight
    reach = [[Fraction(0)] * len(dirs) for _ in range(k + 1)]
    for i in range(k - 1, -1, -1):
        for a, d in enumerate(dirs):
            g = Fraction(linalg.dot(d, vectors[i]), weights[i])
            reach[i][a] = max(reach[i + 1][a], g)
    x = [0] * k
    out = []

    def feasible(i, s, b):
        r = reach[i]
        for a, d in enumerate(dirs):
            need = -linalg.dot(d, s)
            if need > 0 and need > b * r[a]:
                return False
        return True

    def rec(i, s, b):
        if i == k:
            if not any(s):
                out.append((tuple(x), budget - b))
            return
        if not feasible(i, s, b):
            return
        v = vectors[i]
        w = weights[i]
        cur = list(s)
        for c in range(b // w + 1):
            x[i] = c
            rec(i + 1, tuple(cur), b - c * w)
            cur = [a + e for a, e in zip(cur, v)]
        x[i] = 0

    rec(0, tuple([0] * f), budget)
    return out


def _perp_basis(p: Sequence[int]) -> list[list[int]]:
    """Integer basis of the functionals vanishing on ``p``."""
    return linalg.integer_kernel([list(p)])


def _sort_key(grading: GradingFunctional):
    return lambda u: (grading.grade(u), u)


def enumerate_knonneg(K: RelationLattice, grading: GradingFunctional, N) -> list[Vec]:
    N = Fraction(N)
    D = grading.denominator
    budget = int(N * D) if N >= 0 else -1
    if budget < 0:
        return []
    vecs = [list(p) for p in K.points]
    sols = _search(vecs, grading.int_weights, budget)
    return sorted((x for x, _ in sols), key=_sort_key(grading))


def enumerate_kp(K: RelationLattice, grading: GradingFunctional, p: int, N) -> list[Vec]:
    N = Fraction(N)
    if N < 0:
        return []
    mu = grading.mu(p)
    others = [q for q in range(K.size) if q != p]
    D = lcm(*(mu[q].denominator for q in others))
    weights = [int(mu[q] * D) for q in others]
    perp = _perp_basis(K.points[p])
    vecs = [[linalg.dot(f, K.points[q]) for f in perp] for q in others]
    sols = _search(vecs, weights, int(N * D))
    pt = K.points[p]
    k = next(i for i, c in enumerate(pt) if c)
    out = []
    for x, _ in sols:
        img = sum(c * K.points[q][k] for c, q in zip(x, others))
        u = [0] * K.size
        for c, q in zip(x, others):
            u[q] = c
        u[p] = -img // pt[k]
        out.append(tuple(u))
    return sorted(out, key=_sort_key(grading))


def enumerate_kplus(K: RelationLattice, grading: GradingFunctional, N,
                    kp_lists: Optional[dict[int, list[Vec]]] = None) -> list[Vec]:
    """Additive closure, within the bound, of the union of the ``K_p``."""
    N = Fraction(N)
    if kp_lists is None:
        kp_lists = {p: enumerate_kp(K, grading, p, N) for p in range(K.size)}
    gens = sorted({u for lst in kp_lists.values() for u in lst if any(u)}, key=_sort_key(grading))
    zero = tuple([0] * K.size)
    seen = {zero, *gens}
    frontier = list(gens)
    gw = [(g, grading.grade(g)) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            gx = grading.grade(x)
            for g, wg in gw:
                if gx + wg > N:
                    break
                y = tuple(a + b for a, b in zip(x, g))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen, key=_sort_key(grading))


def enumerate_ambient(K: RelationLattice, grading: GradingFunctional, N) -> list[Vec]:
    """Elements of ``(Z_{>=0})^P + K_+`` of grade at most N."""
    N = Fraction(N)
    base = enumerate_kplus(K, grading, N)
    D = grading.denominator
    w = grading.int_weights
    out = set()
    m = K.size
    for u in base:
        room = int((N - grading.grade(u)) * D)
        x = [0] * m

        def rec(i, b):
            if i == m:
                out.add(tuple(a + c for a, c in zip(u, x)))
                return
            for c in range(b // w[i] + 1):
                x[i] = c
                rec(i + 1, b - c * w[i])
            x[i] = 0

        rec(0, room)
    return sorted(out, key=_sort_key(grading))


def enumerate_monoid(selector, K: RelationLattice, grading: GradingFunctional, N) -> list[Vec]:
    """Members of the selected monoid with grade at most N, in (grade, lex) order.

    ``selector`` is ``"Knonneg"``, ``"Kplus"``, ``"AmbientNonneg"`` or
    ``("Kp", p)`` with ``p`` an index into ``K.points``.
    """
    if selector == "Knonneg":
        return enumerate_knonneg(K, grading, N)
    if selector == "Kplus":
        return enumerate_kplus(K, grading, N)
    if selector == "AmbientNonneg":
        return enumerate_ambient(K, grading, N)
    if isinstance(selector, tuple) and selector[0] == "Kp":
        return enumerate_kp(K, grading, int(selector[1]), N)
    raise PreconditionViolation(f"unknown monoid selector {selector!r}")


class KplusMembership:
    """Memoised test for membership in ``K_+``.

    A relation with at most one negative entry lies in some ``K_p``. Otherwise
    the summands coming from ``K_p`` for the first negative coordinate ``p``
    can be merged into one element ``x`` with ``x_p <= u_p``; the remainder is
    then generated by the other ``K_r``. The recursion strictly lowers the
    grade, so it terminates.
    """

    def __init__(self, K: RelationLattice, grading: GradingFunctional, N,
                 kp_lists: Optional[dict[int, list[Vec]]] = None):
        self.K = K
        self.grading = grading
        self.N = Fraction(N)
        self._kp = kp_lists or {}
        self._memo: dict = {}

    def kp(self, p: int) -> list[Vec]:
        if p not in self._kp:
            self._kp[p] = enumerate_kp(self.K, self.grading, p, self.N)
        return self._kp[p]

    def __call__(self, u: Sequence[int]) -> bool:
        u = tuple(u)
        if not self.K.contains(u):
            return False
        return self._member(u, frozenset())

    def _member(self, u: Vec, banned: frozenset) -> bool:
        neg = [q for q, c in enumerate(u) if c < 0]
        if any(q in banned for q in neg):
            return False
        if len(neg) <= 1:
            return True
        key = (u, banned)
        if key in self._memo:
            return self._memo[key]
        p = neg[0]
        g = self.grading.grade(u)
        ok = False
        for x in self.kp(p):
            if x[p] >= 0 or x[p] > u[p]:
                continue
            if self.grading.grade(x) > g:
                break
            rest = tuple(a - b for a, b in zip(u, x))
            if self._member(rest, banned | {p}):
                ok = True
                break
        self._memo[key] = ok
        return ok


# -- cones and rays -----------------------------------------------------------

def circuit_ray(points: Union[RelationLattice, Sequence[Sequence[int]]],
                C: Iterable) -> Optional[Vec]:
    """Primitive positive relation supported on ``C``, if ``C`` is a circuit around 0.

    ``C`` holds indices into the point list (or the points themselves).
    Returns None unless ``conv(C)`` is a simplex with the origin in its
    relative interior.
    """
    pts = points.points if isinstance(points, RelationLattice) else [tuple(p) for p in points]
    idx = []
    for c in C:
        idx.append(c if isinstance(c, int) else pts.index(tuple(c)))
    idx = sorted(set(idx))
    if len(idx) < 2:
        return None
    A = [[pts[j][k] for j in idx] for k in range(len(pts[0]))]
    ker = linalg.integer_kernel(A)
    if len(ker) != 1:
        return None
    v = linalg.primitive(ker[0])
    if all(c < 0 for c in v):
        v = tuple(-c for c in v)
    if not all(c > 0 for c in v):
        return None
    out = [0] * len(pts)
    for j, c in zip(idx, v):
        out[j] = c
    return tuple(out)


def strong_convexity(generators: Sequence[Sequence]) -> bool:
    """True iff the cone spanned by ``generators`` contains no line."""
    gens = [list(g) for g in generators if any(g)]
    if not gens:
        return True
    k = len(gens)
    A_eq = linalg.transpose(gens)
    A_ub = [[int(i == j) for j in range(k)] for i in range(k)]
    res = linalg.linprog([1] * k, A_ub, [1] * k, A_eq, [0] * len(A_eq))
    return res.status == "optimal" and res.value == 0


@dataclass
class FreenessReport:
    bound: Fraction
    extremal: list[Vec]
    rank: int
    dependence: Optional[dict[Vec, int]] = None

    @property
    def free_up_to_bound(self) -> bool:
        return self.dependence is None

    def to_json(self) -> dict:
        return {
            "bound": str(self.bound),
            "rank": self.rank,
            "extremal": [list(v) for v in self.extremal],
            "free_up_to_bound": self.free_up_to_bound,
            "dependence": None if self.dependence is None else
            [{"u": list(k), "coefficient": c} for k, c in self.dependence.items()],
        }


def extremal_elements(members: Sequence[Vec]) -> list[Vec]:
    """Nonzero members that are not a sum of two nonzero members."""
    nonzero = [u for u in members if any(u)]
    s = set(nonzero)
    out = []
    for u in nonzero:
        if not any(tuple(a - b for a, b in zip(u, v)) in s for v in nonzero if v != u):
            out.append(u)
    return out


def dependence(rays: Sequence[Vec]) -> Optional[dict[Vec, int]]:
    """Primitive integer relation among ``rays`` with minimal support, or None."""
    for size in range(2, len(rays) + 1):
        for combo in itertools.combinations(range(len(rays)), size):
            cols = [rays[i] for i in combo]
            ker = linalg.integer_kernel(linalg.transpose(cols))
            if len(ker) == 1 and all(ker[0]):
                v = linalg.primitive(ker[0])
                if v[0] < 0:
                    v = tuple(-c for c in v)
                return {rays[i]: c for i, c in zip(combo, v)}
    return None


def freeness_witness(K: RelationLattice, grading: GradingFunctional, N,
                     rays: Optional[Sequence[Vec]] = None) -> FreenessReport:
    """Look for an integer dependence among extremal elements of ``K_{>=0}``.

    Extremality is certified only among members of grade at most N. When
    ``rays`` is given the search is restricted to those elements (each must be
    extremal within the bound).
    """
    N = Fraction(N)
    members = enumerate_knonneg(K, grading, N)
    ext = extremal_elements(members)
    if rays is not None:
        ext_set = set(ext)
        missing = [r for r in rays if tuple(r) not in ext_set]
        if missing:
            raise PreconditionViolation(f"not extremal within the bound: {missing}")
        ext = [tuple(r) for r in rays]
    dep = None
    if len(ext) > K.rank or rays is not None:
        dep = dependence(sorted(ext, key=_sort_key(grading)))
    return FreenessReport(N, ext, K.rank, dep)


# -- the partial order on a nice cone -----------------------------------------

class ConeOrder:
    """Partial order on the lattice points of a nice cone.

    The cone is ``{x : H x >= 0}`` in ``Z^P``; ``y`` is an integer matrix
    giving the grading ``y(u) = y @ u`` and ``e_p`` are the unit vectors.
    ``u <=_1 v`` when ``v - u`` is in the cone; ``u <=_2 w`` when ``y(w) = 0``
    and ``w - u + e_p`` is a nonzero cone element for some ``p``; and
    ``u <= v`` when ``u <=_1 v`` or ``u <=_2 w <=_1 v`` for some ``w``.

    Niceness is verified for all cone elements of grade at most ``bound``,
    where the grade is the sum of the rows of ``H`` (an interior point of the
    dual cone).
    """

    def __init__(self, H: Sequence[Sequence[int]], y: Sequence[Sequence[int]], bound):
        self.H = [list(map(int, r)) for r in H]
        self.m = len(self.H[0])
        if linalg.rank(self.H) != self.m:
            raise NicenessViolation("cone is not strongly convex")
        self.y = [list(map(int, r)) for r in y]
        self.lam = [sum(r[j] for r in self.H) for j in range(self.m)]
        self.bound = Fraction(bound)
        self.units = [tuple(int(i == j) for j in range(self.m)) for i in range(self.m)]
        self.max_unit = max(self.grade(e) for e in self.units)
        self.elements = self._enumerate(self.bound)
        self._index = {u: i for i, u in enumerate(self.elements)}
        self._zero_y = [w for w in self.elements if not any(self.yv(w))]
        self._check_niceness()
        self._depth: dict = {}

    def grade(self, u) -> int:
        return linalg.dot(self.lam, u)

    def yv(self, u) -> tuple[int, ...]:
        return tuple(linalg.dot(r, u) for r in self.y)

    def in_cone(self, u) -> bool:
        return all(linalg.dot(r, u) >= 0 for r in self.H)

    def _enumerate(self, bound) -> list[Vec]:
        box = []
        for j in range(self.m):
            hi = linalg.linprog([int(i == j) for i in range(self.m)],
                                [[-x for x in r] for r in self.H] + [self.lam],
                                [0] * len(self.H) + [bound], free=range(self.m))
            lo = linalg.linprog([-int(i == j) for i in range(self.m)],
                                [[-x for x in r] for r in self.H] + [self.lam],
                                [0] * len(self.H) + [bound], free=range(self.m))
            box.append(range(-int(lo.value // 1), int(hi.value // 1) + 1))
        pts = [u for u in itertools.product(*box) if self.in_cone(u) and self.grade(u) <= bound]
        return sorted(pts, key=lambda u: (self.grade(u), u))

    def _check_niceness(self):
        for p, e in enumerate(self.units):
            if not self.in_cone(e):
                raise NicenessViolation(f"e_{p} is not in the cone")
            for u in self.elements:
                if self.grade(u) >= self.grade(e):
                    break
                if any(u) and self.in_cone(tuple(a - b for a, b in zip(e, u))):
                    raise NicenessViolation(f"e_{p} decomposes as {u} + rest")
            yp = self.yv(e)
            for u in self.elements:
                if self.yv(u) == yp and not self.in_cone(tuple(a - b for a, b in zip(u, e))):
                    raise NicenessViolation(f"{u} has the degree of e_{p} but {u} - e_{p} is not in the cone")

    def leq1(self, u, v) -> bool:
        return self.in_cone(tuple(b - a for a, b in zip(u, v)))

    def leq2(self, u, w) -> bool:
        if any(self.yv(w)):
            return False
        for e in self.units:
            d = tuple(a - b + c for a, b, c in zip(w, u, e))
            if any(d) and self.in_cone(d):
                return True
        return False

    def leq(self, u, v) -> bool:
        u, v = tuple(u), tuple(v)
        if not (self.in_cone(u) and self.in_cone(v)):
            raise PreconditionViolation("order is only defined on cone elements")
        if self.leq1(u, v):
            return True
        gv = self.grade(v)
        if gv > self.bound:
            raise PreconditionViolation("v exceeds the enumeration bound")
        for w in self._zero_y:
            if self.grade(w) > gv:
                break
            if self.leq1(w, v) and self.leq2(u, w):
                return True
        return False

    def down_set(self, v) -> list[Vec]:
        """All ``u <= v``; requires ``grade(v) + max_p grade(e_p) <= bound``."""
        v = tuple(v)
        if self.grade(v) + self.max_unit > self.bound:
            raise PreconditionViolation("bound too small to enumerate the down-set")
        limit = self.grade(v) + self.max_unit
        out = []
        for u in self.elements:
            if self.grade(u) > limit:
                break
            if self.leq(u, v):
                out.append(u)
        return out

    def depth(self, u) -> int:
        """Length of the longest strictly increasing chain ending at ``u``."""
        u = tuple(u)
        if u in self._depth:
            return self._depth[u]
        best = 0
        for v in self.down_set(u):
            if v != u:
                best = max(best, self.depth(v) + 1)
        self._depth[u] = best
        return best
