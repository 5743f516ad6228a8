"""Exact integer and rational linear algebra.

Everything here works on plain lists of ``int`` / :class:`fractions.Fraction`
so results are exact; matrices are lists of rows.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

Matrix = list  # list[list[int | Fraction]]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*A)] if A else []


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def dot(x: Sequence, y: Sequence):
    return sum(a * b for a, b in zip(x, y))


def det(A: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (Bareiss, fraction free)."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(int, row)) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rref(A: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (R, pivot_columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def solve(A: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """One solution of ``A x = b`` over Q, or None if inconsistent."""
    n = len(A[0]) if A else 0
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = R[i][n]
    return x


def nullspace_rational(A: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of the rational kernel of A (as column vectors returned as lists)."""
    n = len(A[0])
    R, piv = rref(A)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(v)
    return basis


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


# -- Smith normal form -------------------------------------------------------

def smith_normal_form(A: Sequence[Sequence[int]]):
    """Smith normal form with unimodular transforms.

    Returns ``(U, D, V)`` with ``U @ A @ V == D``, U and V unimodular and D
    diagonal with nonnegative entries d_1 | d_2 | ... .
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row dst += f * row src
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, f):  # col dst += f * col src
        for row in D:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute entry in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            changed = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(t, i, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(t, j, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            # divisibility of the rest of the block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith form of A."""
    _, D, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def integer_kernel(A: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis (list of row vectors) of the integer kernel {x in Z^n : A x = 0}."""
    n = len(A[0])
    _, D, V = smith_normal_form(A)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [[V[i][j] for i in range(n)] for j in range(r, n)]


def hermite_rows(B: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by the rows of B."""
    M = [list(map(int, row)) for row in B if any(row)]
    if not M:
        return []
    n = len(M[0])
    r = 0
    for c in range(n):
        if r >= len(M):
            break
        while True:
            nz = [i for i in range(r, len(M)) if M[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[p] = M[p], M[r]
            done = True
            for i in range(r + 1, len(M)):
                if M[i][c]:
                    q = M[i][c] // M[r][c]
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                    if M[i][c]:
                        done = False
            if done:
                break
        if r < len(M) and M[r][c]:
            if M[r][c] < 0:
                M[r] = [-x for x in M[r]]
            for i in range(r):
                q = M[i][c] // M[r][c]
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
            r += 1
    return [row for row in M if any(row)]


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return tuple(int(x) // g for x in v) if g else tuple(int(x) for x in v)


def lattice_coordinates(basis: Sequence[Sequence[int]], v: Sequence[int]) -> Optional[list[int]]:
    """Integer coordinates of v in the lattice spanned by ``basis`` rows, if any."""
    x = solve(transpose(basis), v)
    if x is None or any(c.denominator != 1 for c in x):
        return None
    return [int(c) for c in x]


# -- exact linear programming -------------------------------------------------

class LPResult:
    __slots__ = ("status", "value", "x")

    def __init__(self, status: str, value=None, x=None):
        self.status = status  # "optimal" | "infeasible" | "unbounded"
        self.value = value
        self.x = x

    def __repr__(self):
        return f"LPResult({self.status!r}, value={self.value})"


def linprog(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
            A_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
            free: Iterable[int] = ()) -> LPResult:
    """Maximize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables are nonnegative unless listed in ``free``. Exact two-phase
    simplex over Q; Dantzig pricing with a switch to Bland's rule once the
    method stalls, so it always terminates.
    """
    nvar = len(c)
    free = sorted(set(free))
    # column map: original var -> list of (tableau col, sign)
    cols: list[list[tuple[int, int]]] = []
    ncol = 0
    for j in range(nvar):
        cols.append([(ncol, 1)])
        ncol += 1
        if j in free:
            cols[j].append((ncol, -1))
            ncol += 1

    def expand(row):
        out = [Fraction(0)] * ncol
        for j, a in enumerate(row):
            if a:
                for k, s in cols[j]:
                    out[k] = Fraction(a) * s
        return out

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    kinds: list[str] = []
    for row, b in zip(A_ub, b_ub):
        rows.append(expand(row))
        rhs.append(Fraction(b))
        kinds.append("ub")
    for row, b in zip(A_eq, b_eq):
        rows.append(expand(row))
        rhs.append(Fraction(b))
        kinds.append("eq")
    m = len(rows)

    # slack columns for inequality rows, artificial columns where needed
    nslack = kinds.count("ub")
    slack_start = ncol
    art_start = slack_start + nslack
    basis: list[int] = []
    art_rows = []
    s = slack_start
    T: list[list[Fraction]] = []
    for i in range(m):
        row = rows[i] + [Fraction(0)] * nslack
        b = rhs[i]
        if kinds[i] == "ub":
            row[s] = Fraction(1)
            slack_col = s
            s += 1
        else:
            slack_col = None
        if b < 0:
            row = [-x for x in row]
            b = -b
        if slack_col is not None and row[slack_col] == 1:
            basis.append(slack_col)
        else:
            basis.append(-1)
            art_rows.append(i)
        T.append(row + [b])
    nart = len(art_rows)
    width = art_start + nart
    for i in range(m):
        T[i] = T[i][:-1] + [Fraction(0)] * nart + [T[i][-1]]
    for k, i in enumerate(art_rows):
        T[i][art_start + k] = Fraction(1)
        basis[i] = art_start + k

    def pivot(r, col):
        pr = T[r]
        inv = 1 / pr[col]
        if inv != 1:
            pr = [x * inv for x in pr]
            T[r] = pr
        nz = [j for j, x in enumerate(pr) if x]
        for i in range(len(T)):
            if i != r:
                f = T[i][col]
                if f:
                    Ti = T[i]
                    for j in nz:
                        Ti[j] -= f * pr[j]
        basis[r] = col

    def run(obj: list[Fraction], allowed: int) -> str:
        # obj holds reduced costs for maximization: z_j - c_j form, row 'obj'
        T.append(obj)
        stall = 0
        try:
            while True:
                z = T[-1]
                if stall > 50:
                    col = next((j for j in range(allowed) if z[j] < 0), None)
                else:
                    col = None
                    best = Fraction(0)
                    for j in range(allowed):
                        if z[j] < best:
                            best = z[j]
                            col = j
                if col is None:
                    return "optimal"
                r = None
                ratio = None
                for i in range(m):
                    a = T[i][col]
                    if a > 0:
                        q = T[i][-1] / a
                        if ratio is None or q < ratio or (q == ratio and basis[i] < basis[r]):
                            ratio, r = q, i
                if r is None:
                    return "unbounded"
                stall = stall + 1 if ratio == 0 else 0
                pivot(r, col)
        finally:
            obj[:] = T.pop()

    if nart:
        # phase 1: maximize -sum(artificials)
        obj = [Fraction(0)] * (width + 1)
        for j in range(art_start, width):
            obj[j] = Fraction(1)
        for i in art_rows:
            obj = [a - b for a, b in zip(obj, T[i])]
        run(obj, width)
        if obj[-1] != 0:
            return LPResult("infeasible")
        # drive remaining artificials out of the basis
        for i in range(m):
            if basis[i] >= art_start:
                col = next((j for j in range(art_start) if T[i][j] != 0), None)
                if col is not None:
                    pivot(i, col)
    cvec = [Fraction(0)] * (width + 1)
    for j, a in enumerate(c):
        for k, sgn in cols[j]:
            cvec[k] = -Fraction(a) * sgn
    obj = cvec[:]
    for i in range(m):
        bcol = basis[i]
        if bcol < width and cvec[bcol] != 0:
            f = cvec[bcol]
            obj = [a - f * b for a, b in zip(obj, T[i])]
    status = run(obj, art_start)
    if status == "unbounded":
        return LPResult("unbounded")
    xt = [Fraction(0)] * width
    for i in range(m):
        if basis[i] < width:
            xt[basis[i]] = T[i][-1]
    x = [sum((xt[k] * sgn for k, sgn in cols[j]), Fraction(0)) for j in range(nvar)]
    return LPResult("optimal", obj[-1], x)


def in_cone(generators: Sequence[Sequence], point: Sequence) -> bool:
    """Exact test whether ``point`` is a nonnegative combination of generators."""
    if not generators:
        return not any(point)
    A_eq = transpose(generators)
    res = linprog([0] * len(generators), A_eq=A_eq, b_eq=list(point))
    return res.status == "optimal"
