"""The A-hypergeometric (GKZ) system attached to a reflexive simplex.

The point set is ``A = (P + {0}) x {1}`` with ``beta = (0, -1)``. Variables
are ``s_p`` for ``p`` in ``P`` (indices ``0..m-1`` in canonical order) and
``s_0`` (index ``m``). A relation ``k`` in ``K`` acts through
``kappa = (k, -|k|)`` and the box operator ``d^{kappa_+} - d^{kappa_-}``.

Candidate solutions are obtained from series in ``r`` by the substitution
``r_p = -s_p / s_0`` together with a prefactor ``s_0^{-1}``. Expressions are
finite sums of terms ``c * s^a * prod_j log(s_j)^{e_j}`` with integer,
possibly negative, exponents ``a``.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import VerificationFailure
from .mirrormap import (MirrorMapBundle, build_bundle, comb, comb_p, harmonic, phi_power)
from .polytope import ReflexiveSimplex
from .series import ConeSeries

Vec = tuple[int, ...]
Key = tuple[Vec, Vec]


class LogLaurentSum:
    """Finite sum of log-Laurent monomials, keyed by ``(a, e)``."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: Mapping[Key, Fraction], nvars: int, check: bool = True):
        self.nvars = nvars
        if check:
            clean: dict = {}
            for (a, e), c in terms.items():
                key = (tuple(a), tuple(e))
                clean[key] = clean.get(key, 0) + Fraction(c)
            self.terms = {k: c for k, c in clean.items() if c}
        else:
            self.terms = dict(terms)

    @classmethod
    def zero(cls, nvars: int) -> "LogLaurentSum":
        return cls({}, nvars, check=False)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, LogLaurentSum) and self.terms == other.terms

    def __add__(self, other: "LogLaurentSum") -> "LogLaurentSum":
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return LogLaurentSum(out, self.nvars, check=False)

    def __neg__(self):
        return LogLaurentSum({k: -c for k, c in self.terms.items()}, self.nvars, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LogLaurentSum":
        c = Fraction(c)
        if not c:
            return LogLaurentSum.zero(self.nvars)
        return LogLaurentSum({k: c * v for k, v in self.terms.items()}, self.nvars, check=False)

    def times_log(self, j: int, power: int = 1) -> "LogLaurentSum":
        out = {}
        for (a, e), c in self.terms.items():
            e2 = list(e)
            e2[j] += power
            out[(a, tuple(e2))] = c
        return LogLaurentSum(out, self.nvars, check=False)

    def to_json(self) -> list:
        return [{"a": list(a), "log": list(e), "c": str(c)} for (a, e), c in self]


def _diff(terms: dict, j: int, k: int) -> dict:
    """``d^k / d s_j^k`` applied to a dict of terms."""
    cur = terms
    for _ in range(k):
        nxt: dict = {}
        for (a, e), c in cur.items():
            aj, ej = a[j], e[j]
            a2 = a[:j] + (aj - 1,) + a[j + 1:]
            if aj:
                key = (a2, e)
                nxt[key] = nxt.get(key, 0) + c * aj
            if ej:
                e2 = e[:j] + (ej - 1,) + e[j + 1:]
                key = (a2, e2)
                nxt[key] = nxt.get(key, 0) + c * ej
        cur = {key: c for key, c in nxt.items() if c}
    return cur


def partial(expr: LogLaurentSum, orders: Sequence[int]) -> LogLaurentSum:
    """Mixed partial derivative ``prod_j d_j^{orders_j}``."""
    terms = expr.terms
    for j, k in enumerate(orders):
        if k:
            terms = _diff(terms, j, k)
    return LogLaurentSum(terms, expr.nvars, check=False)


def kappa(k: Sequence[int]) -> Vec:
    """Relation of ``A`` attached to ``k`` in K: ``(k, -|k|)``."""
    return tuple(k) + (-sum(k),)


def apply_box(expr: LogLaurentSum, k: Sequence[int]) -> LogLaurentSum:
    kap = kappa(k)
    plus = [max(c, 0) for c in kap]
    minus = [max(-c, 0) for c in kap]
    return partial(expr, plus) - partial(expr, minus)


def apply_Zv(expr: LogLaurentSum, v: Sequence) -> LogLaurentSum:
    """Euler operator ``sum_j v_j s_j d/ds_j``; ``v_j`` is ``v`` on the j-th point of A."""
    v = [Fraction(x) for x in v]
    out: dict = {}
    for (a, e), c in expr.terms.items():
        lam = sum(x * y for x, y in zip(v, a))
        if lam:
            out[(a, e)] = out.get((a, e), 0) + lam * c
        for j, ej in enumerate(e):
            if ej and v[j]:
                e2 = e[:j] + (ej - 1,) + e[j + 1:]
                out[(a, e2)] = out.get((a, e2), 0) + v[j] * ej * c
    return LogLaurentSum({k: c for k, c in out.items() if c}, expr.nvars, check=False)


def substitute_r(series: ConeSeries, log_factor: Union[None, int, Mapping[int, int]] = None,
                 prefactor: bool = True) -> LogLaurentSum:
    """Rewrite ``series(r)`` in the ``s`` variables via ``r_p = -s_p / s_0``.

    ``r^u`` becomes ``(-1)^{|u|} s^u s_0^{-|u|}``; with ``prefactor`` the
    result is multiplied by ``s_0^{-1}``. ``log_factor`` multiplies by
    ``log s_j`` (an index) or by ``sum_j c_j log s_j`` (a mapping).
    """
    m = series.nvars
    nv = m + 1
    base = {}
    for u, c in series.terms.items():
        s = sum(u)
        a = tuple(u) + (-s - (1 if prefactor else 0),)
        base[a] = -c if s % 2 else c
    zero_e = tuple([0] * nv)
    if log_factor is None:
        return LogLaurentSum({(a, zero_e): c for a, c in base.items()}, nv, check=False)
    if isinstance(log_factor, int):
        log_factor = {log_factor: 1}
    out = {}
    for j, w in log_factor.items():
        if not w:
            continue
        e = tuple(int(i == j) for i in range(nv))
        for a, c in base.items():
            out[(a, e)] = out.get((a, e), 0) + w * c
    return LogLaurentSum({k: c for k, c in out.items() if c}, nv, check=False)


def log_ru(u: Sequence[int]) -> dict[int, int]:
    """Coefficients of ``log r^u = sum_p u_p log s_p - |u| log s_0`` (constants dropped)."""
    out = {p: c for p, c in enumerate(u) if c}
    out[len(u)] = -sum(u)
    return out


# -- the candidate series ------------------------------------------------------

def tau_tilde(bundle: MirrorMapBundle, p: Optional[int]) -> ConeSeries:
    """``sum comb(u) (-H(u_p)) r^u``, or with ``p=None`` the ``-H(|u|)`` version."""
    terms = {}
    for u in bundle.knonneg:
        h = harmonic(sum(u)) if p is None else harmonic(u[p])
        terms[u] = -comb(u) * h
    return ConeSeries(terms, bundle.grading, bundle.bound, bundle.cone)


def gamma_series(bundle: MirrorMapBundle, p: int, convention: str) -> ConeSeries:
    terms = {}
    for u in bundle.kp[p]:
        if u[p] < 0:
            c = comb_p(u, p)
            if convention == "double" and (u[p] + 1) % 2:
                c = -c
            terms[u] = c
    return ConeSeries(terms, bundle.grading, bundle.bound, bundle.cone)


# -- verification ----------------------------------------------------------------

def _residual_in_range(res: LogLaurentSum, k: Sequence[int], bundle: MirrorMapBundle):
    """Residual terms whose both source exponents lie within the truncation."""
    kap = kappa(k)
    m = len(k)
    plus = [max(c, 0) for c in kap[:m]]
    minus = [max(-c, 0) for c in kap[:m]]
    g = bundle.grading.grade
    N = bundle.bound
    out = []
    for (a, e), c in res:
        u1 = [x + y for x, y in zip(a[:m], plus)]
        u2 = [x + y for x, y in zip(a[:m], minus)]
        if g(u1) <= N and g(u2) <= N:
            out.append(((a, e), c, max(g(u1), g(u2))))
    return out


def box_coverage(expr: LogLaurentSum, k: Sequence[int], bundle: MirrorMapBundle) -> int:
    """Number of residual exponents of ``box_k expr`` that lie within the truncation."""
    kap = kappa(k)
    m = len(k)
    plus = [max(c, 0) for c in kap[:m]]
    minus = [max(-c, 0) for c in kap[:m]]
    g = bundle.grading.grade
    N = bundle.bound
    seen = set()
    for (a, _e) in expr.terms:
        for shift in (plus, minus):
            E = tuple(x - y for x, y in zip(a[:m], shift))
            u1 = [x + y for x, y in zip(E, plus)]
            u2 = [x + y for x, y in zip(E, minus)]
            if g(u1) <= N and g(u2) <= N:
                seen.add(E)
    return len(seen)


def box_check(expr: LogLaurentSum, k: Sequence[int], bundle: MirrorMapBundle) -> Optional[dict]:
    """None if ``box_k expr`` vanishes within the truncation, else the first bad term."""
    bad = _residual_in_range(apply_box(expr, k), k, bundle)
    if not bad:
        return None
    bad.sort(key=lambda t: (t[2], t[0]))
    (a, e), c, grade = bad[0]
    return {"k": list(k), "a": list(a), "log": list(e), "c": str(c), "grade": str(grade)}


def _ff(x: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= x - i
    return out


def tau_recurrence_check(bundle: MirrorMapBundle, k: Sequence[int]) -> Optional[dict]:
    """Box annihilation of ``s_0^{-1} tau`` via falling factorials, term by term.

    For each ``u`` with ``u' = u - k`` both within the bound, the coefficient
    identity ``c_u (-1)^{|u|} prod ff(A(u), kappa_+) = c_{u'} (-1)^{|u'|} prod
    ff(A(u'), kappa_-)`` must hold, with ``A(u) = (u, -|u|-1)`` and
    ``c_u = comb(u)`` on ``K>=0`` (zero elsewhere).
    """
    kap = kappa(k)
    plus = [max(c, 0) for c in kap]
    minus = [max(-c, 0) for c in kap]
    g = bundle.grading.grade
    N = bundle.bound
    coeff = lambda u: comb(u) if min(u) >= 0 else 0  # noqa: E731
    sources = set(bundle.knonneg) | {tuple(x + y for x, y in zip(u, k)) for u in bundle.knonneg}
    for u in sorted(sources, key=lambda u: (g(u), u)):
        v = tuple(x - y for x, y in zip(u, k))
        if g(u) > N or g(v) > N:
            continue
        Au = u + (-sum(u) - 1,)
        Av = v + (-sum(v) - 1,)
        lhs = coeff(u) * (-1) ** (sum(u) % 2)
        for x, p in zip(Au, plus):
            lhs *= _ff(x, p)
        rhs = coeff(v) * (-1) ** (sum(v) % 2)
        for x, p in zip(Av, minus):
            rhs *= _ff(x, p)
        if lhs != rhs:
            return {"k": list(k), "u": list(u), "lhs": str(lhs), "rhs": str(rhs)}
    return None


def euler_vectors(bundle: MirrorMapBundle) -> list[tuple[list[Fraction], Fraction]]:
    """Spanning set of ``(M + Z)^dual`` as ``(values on A, value on beta)``."""
    pts = bundle.K.points
    dim = bundle.K.dim
    out = []
    for i in range(dim):
        out.append(([p[i] for p in pts] + [0], Fraction(0)))
    out.append(([1] * (len(pts) + 1), Fraction(-1)))
    return out


def euler_check(expr: LogLaurentSum, v: Sequence, eigen) -> Optional[dict]:
    res = apply_Zv(expr, v) - expr.scale(eigen)
    if res.is_zero():
        return None
    (a, e), c = next(iter(res))
    return {"v": [str(x) for x in v], "a": list(a), "log": list(e), "c": str(c)}


def verify_solutions(simplex: Optional[ReflexiveSimplex], N, bundle: Optional[MirrorMapBundle] = None,
                     grading=None, strict: bool = False, basis: Optional[Sequence[Sequence[int]]] = None) -> dict:
    """Check the GKZ solutions built from the mirror-map series to grade N.

    The Euler equations are read as eigen-equations ``Z_v f = v(beta) f``.
    Returns a report; with ``strict`` the first failed check raises
    :class:`VerificationFailure`.
    """
    if bundle is None:
        bundle = build_bundle(simplex, N, grading=grading)
    m = bundle.size
    nv = m + 1
    ks = [tuple(k) for k in (basis if basis is not None else bundle.K.basis)]
    tau = bundle.tau
    checks = []

    def record(name, failure, **extra):
        entry = {"name": name, "passed": failure is None, "grade": str(bundle.bound)}
        if failure is not None:
            entry["first_failure"] = failure
        entry.update(extra)
        checks.append(entry)
        if strict and failure is not None:
            raise VerificationFailure(f"{name} failed", failure)
        return failure is None

    coverage = {}

    def first_box_failure(expr, tag=None):
        for k in ks:
            f = box_check(expr, k, bundle)
            if tag is not None:
                coverage[tag] = coverage.get(tag, 0) + box_coverage(expr, k, bundle)
            if f is not None:
                return f
        return None

    S_tau = substitute_r(tau)
    record("tau_constant_term", None if tau.constant_term() == 1 else {"c": str(tau.constant_term())})
    for v, beta in euler_vectors(bundle):
        f = euler_check(S_tau, v, beta)
        if f is not None:
            break
    record("euler_tau", f)
    record("box_tau", first_box_failure(S_tau, "tau"), residuals_checked=coverage.get("tau", 0))
    rec_fail = None
    for k in ks:
        rec_fail = tau_recurrence_check(bundle, k)
        if rec_fail:
            break
    record("box_tau_recurrence", rec_fail)

    tt0 = tau_tilde(bundle, None)
    tt = [tau_tilde(bundle, p) for p in range(m)]

    # sign convention for gamma_p, tried both ways and reported
    conv_ok = {}
    conv_fail = {}
    gammas = {}
    for conv in ("single", "double"):
        gammas[conv] = [gamma_series(bundle, p, conv) for p in range(m)]
        fail = None
        for p in range(m):
            expr = substitute_r(tau, p) + substitute_r(tt[p] + gammas[conv][p])
            fail = first_box_failure(expr, conv)
            if fail is not None:
                fail = dict(fail, p=p)
                break
        conv_ok[conv] = fail is None
        conv_fail[conv] = fail
    any_gamma = any(len(gm) for gm in gammas["single"])
    if conv_ok["single"] and conv_ok["double"]:
        selected = "single" if not any_gamma else "both"
    elif conv_ok["single"]:
        selected = "single"
    elif conv_ok["double"]:
        selected = "double"
    else:
        selected = None
    record("box_log_p", None if selected else conv_fail["single"],
           conventions={c: ok for c, ok in conv_ok.items()},
           residuals_checked=coverage.get("single", 0),
           selected_convention=selected if any_gamma else "indistinguishable (gamma vanishes)")
    gamma = gammas["double" if selected == "double" else "single"]

    const = [(tt[p] + gamma[p]).constant_term() for p in range(m)]
    record("log_p_constant_terms", None if not any(const) else {"p": next(i for i, c in enumerate(const) if c)})

    expr0 = substitute_r(tau, m) + substitute_r(tt0)
    record("box_log_0", first_box_failure(expr0, "log0"), residuals_checked=coverage.get("log0", 0))
    record("tau_tilde_0_constant_term", None if not tt0.constant_term() else {"c": str(tt0.constant_term())})

    ident_fail = None
    for p in range(m):
        diff = bundle.tau_p[p] - (tt[p] - tt0)
        if len(diff):
            u, c = next(iter(diff))
            ident_fail = {"p": p, "u": list(u), "c": str(c)}
            break
    record("tau_p_identity", ident_fail)

    # assembled log solutions and the exponential mirror-map formula
    literal_agrees = True
    literal_box = True
    asm_fail = None
    euler_fail = None
    mm_fail = None
    for u in ks:
        tau_u = tt0.scalar_mul(-sum(u))
        literal = tt0.scalar_mul(-sum(u))
        for p, c in enumerate(u):
            if c:
                tau_u = tau_u + (tt[p] + gamma[p]).scalar_mul(c)
                literal = literal + tt[p].scalar_mul(c)
        expr = substitute_r(tau, log_ru(u)) + substitute_r(tau_u)
        if asm_fail is None:
            f = first_box_failure(expr)
            if f is None and tau_u.constant_term():
                f = {"u": list(u), "constant_term": str(tau_u.constant_term())}
            if f is not None:
                asm_fail = dict(f, u=list(u))
        if euler_fail is None:
            for v, beta in euler_vectors(bundle):
                f = euler_check(expr, v, beta)
                if f is not None:
                    euler_fail = dict(f, u=list(u))
                    break
        if literal != tau_u:
            literal_agrees = False
            lit_expr = substitute_r(tau, log_ru(u)) + substitute_r(literal)
            if first_box_failure(lit_expr) is not None:
                literal_box = False
        if mm_fail is None:
            image = tau_u.div(tau).exp()
            target = phi_power(bundle, u)
            if image != target:
                d = image - target
                w, c = next(iter(d))
                mm_fail = {"u": list(u), "exponent": list(w), "difference": str(c)}
    record("box_log_ru", asm_fail)
    record("euler_log_ru", euler_fail)
    record("exponential_mirror_map", mm_fail,
           literal_tau_u_agrees=literal_agrees, literal_tau_u_solves_box=literal_box)

    return {
        "simplex": bundle.simplex.name if bundle.simplex is not None else None,
        "grade": str(bundle.bound),
        "euler_equation": "eigen-equation Z_v f = v(beta) f",
        "gamma_convention": checks[[c["name"] for c in checks].index("box_log_p")]["selected_convention"],
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


# -- one-variable log derivatives ----------------------------------------------

def _log_derivative_direct(a: int, u: int) -> Fraction:
    """Coefficient of ``x^{a-u}`` in ``d^u(x^a log x) - d^u(x^a) log x``."""
    expr = LogLaurentSum({((a,), (1,)): Fraction(1)}, 1)
    plain = LogLaurentSum({((a,), (0,)): Fraction(1)}, 1)
    res = partial(expr, [u]) - partial(plain, [u]).times_log(0)
    for (e_a, e_l), c in res:
        if e_l != (0,) or e_a != (a - u,):
            raise AssertionError("unexpected term in log derivative")
    return res.terms.get(((a - u,), (0,)), Fraction(0))


def _log_derivative_closed(a: int, u: int) -> tuple[str, Fraction]:
    if a >= u:
        return "a>=u", Fraction(factorial(a), factorial(a - u)) * (harmonic(a) - harmonic(a - u))
    if a >= 0:
        return "0<=a<u", Fraction((-1) ** ((u - a + 1) % 2) * factorial(a) * factorial(u - a - 1))
    return "a<0", ((-1) ** (u % 2) * Fraction(factorial(u - a - 1), factorial(-a - 1))
                   * (harmonic(u - a - 1) - harmonic(-a - 1)))


def lemma_c4_check(a: int, u: int) -> dict:
    """Compare direct differentiation with the three-case closed form.

    The verdict is ``matches``, ``sign_corrected`` (equal up to a global
    sign) or ``mismatch``; the direct value is authoritative.
    """
    if abs(a) > 12 or not 1 <= u <= 12:
        raise ValueError("need |a| <= 12 and 1 <= u <= 12")
    direct = _log_derivative_direct(a, u)
    case, closed = _log_derivative_closed(a, u)
    if direct == closed:
        verdict = "matches"
    elif direct == -closed:
        verdict = "sign_corrected"
    else:
        verdict = "mismatch"
    return {"a": a, "u": u, "case": case, "direct": direct, "closed_form": closed, "verdict": verdict}
