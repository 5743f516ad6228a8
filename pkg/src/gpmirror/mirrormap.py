"""Combinatorial mirror-map series and their integrality.

For a reflexive simplex with boundary point set ``P`` and relation lattice
``K`` the series are

* ``tau   = sum_{u in K>=0} comb(u) r^u``
* ``tau_p = sum_{u in K>=0} comb(u) (H(|u|) - H(u_p)) r^u``
* ``gamma_p = sum_{u in K_p \\ K>=0} comb_p(u) r^u``
* ``phi_p = exp((tau_p + gamma_p) / tau)``

and the integrality tests concern the products ``prod_p phi_p^{u_p}``
for ``u`` in ``K``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb as binomial, factorial
from typing import Optional, Sequence

from .errors import NegativeArgument, NegativeEntry, NotInK, NotInKnonneg, PreconditionViolation
from .monoid import (GradingFunctional, KplusMembership, RelationLattice, default_grading,
                     enumerate_knonneg, enumerate_kp, extremal_elements, grading_from_weights,
                     relation_lattice)
from .polytope import ReflexiveSimplex
from .series import Cone, ConeSeries

Vec = tuple[int, ...]

_H = [Fraction(0)]


def harmonic(k: int) -> Fraction:
    """``H(k) = 1 + 1/2 + ... + 1/k`` with ``H(0) = 0``."""
    if k < 0:
        raise NegativeArgument(f"H({k}) is undefined")
    while len(_H) <= k:
        _H.append(_H[-1] + Fraction(1, len(_H)))
    return _H[k]


def comb(u: Sequence[int]) -> int:
    """Multinomial coefficient ``(sum u)! / prod u_p!``."""
    total = 0
    out = 1
    for c in u:
        if c < 0:
            raise NegativeEntry(f"negative entry in {tuple(u)}")
        if c:
            total += c
            out *= binomial(total, c)
    return out


def comb_p(u: Sequence[int], p: int):
    """Signed extension of ``comb`` to ``K_p`` minus ``K>=0``.

    ``(-1)^(u_p+1) (sum u)! (-u_p-1)! / prod_{q != p} u_q!``
    """
    up = u[p]
    s = sum(u)
    if up >= 0 or s < 0 or any(c < 0 for q, c in enumerate(u) if q != p):
        raise PreconditionViolation(f"{tuple(u)} is not in K_p minus K>=0 for p={p}")
    val = Fraction(factorial(s) * factorial(-up - 1))
    for q, c in enumerate(u):
        if q != p:
            val /= factorial(c)
    if (up + 1) % 2:
        val = -val
    return int(val) if val.denominator == 1 else val


GAMMA_CONVENTIONS = ("single", "double")


@dataclass
class MirrorMapBundle:
    simplex: Optional[ReflexiveSimplex]
    K: RelationLattice
    grading: GradingFunctional
    bound: Fraction
    knonneg: list[Vec]
    kp: dict[int, list[Vec]]
    tau: ConeSeries
    tau_p: list[ConeSeries]
    gamma_p: list[ConeSeries]
    log_phi: list[ConeSeries]
    phi: list[ConeSeries]
    gamma_convention: str = "single"
    cone: Cone = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.K.size

    def kplus_member(self) -> KplusMembership:
        if not hasattr(self, "_kplus"):
            self._kplus = KplusMembership(self.K, self.grading, self.bound, dict(self.kp))
        return self._kplus


def _gamma_coefficient(u: Vec, p: int, convention: str):
    c = comb_p(u, p)
    if convention == "double" and (u[p] + 1) % 2:
        c = -c
    return c


def build_bundle(simplex: ReflexiveSimplex, N, grading: Optional[GradingFunctional] = None,
                 gamma_convention: str = "single", K: Optional[RelationLattice] = None,
                 jobs: int = 1) -> MirrorMapBundle:
    """Compute ``tau``, ``tau_p``, ``gamma_p`` and ``phi_p`` to grade N.

    ``gamma_convention`` selects the sign of ``gamma_p``: ``"single"`` uses
    ``comb_p`` as defined; ``"double"`` multiplies it by a further
    ``(-1)^(u_p+1)``.
    """
    if gamma_convention not in GAMMA_CONVENTIONS:
        raise PreconditionViolation(f"unknown gamma convention {gamma_convention!r}")
    N = Fraction(N)
    K = K or relation_lattice(simplex)
    if grading is None:
        grading = default_grading(K)
    elif not isinstance(grading, GradingFunctional):
        grading = grading_from_weights(K, grading)
    m = K.size
    knonneg = enumerate_knonneg(K, grading, N)

    def kp_of(p):
        return p, enumerate_kp(K, grading, p, N)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as ex:
            kp = dict(ex.map(kp_of, range(m)))
    else:
        kp = dict(map(kp_of, range(m)))

    bundle_cone = Cone("K+")
    mk = lambda terms: ConeSeries(terms, grading, N, bundle_cone)  # noqa: E731

    tau = mk({u: comb(u) for u in knonneg})
    tau_p = []
    gamma_p = []
    for p in range(m):
        tau_p.append(mk({u: comb(u) * (harmonic(sum(u)) - harmonic(u[p])) for u in knonneg}))
        gamma_p.append(mk({u: _gamma_coefficient(u, p, gamma_convention)
                           for u in kp[p] if u[p] < 0}))
    log_phi = [(tp + gp).div(tau) for tp, gp in zip(tau_p, gamma_p)]
    phi = [lp.exp() for lp in log_phi]
    bundle = MirrorMapBundle(simplex, K, grading, N, knonneg, kp, tau, tau_p, gamma_p,
                             log_phi, phi, gamma_convention, bundle_cone)
    bundle_cone.contains = lambda u: bundle.kplus_member()(u)
    return bundle


def phi_power(bundle: MirrorMapBundle, u: Sequence[int], method: str = "exp") -> ConeSeries:
    """``prod_p phi_p^{u_p}`` for ``u`` in K.

    ``method="exp"`` evaluates ``exp(sum_p u_p log phi_p)``; ``"product"``
    multiplies the powers directly, inverting units for negative exponents.
    """
    u = tuple(int(c) for c in u)
    if not bundle.K.contains(u):
        raise NotInK(f"{u} is not a relation")
    if method == "exp":
        acc = ConeSeries.zero(bundle.grading, bundle.bound, bundle.cone)
        for p, c in enumerate(u):
            if c:
                acc = acc + bundle.log_phi[p].scalar_mul(c)
        return acc.exp()
    if method == "product":
        acc = ConeSeries.one(bundle.grading, bundle.bound, bundle.cone)
        for p, c in enumerate(u):
            if c:
                acc = acc * bundle.phi[p].int_pow(c)
        return acc
    raise PreconditionViolation(f"unknown method {method!r}")


def mirror_map_image(bundle: MirrorMapBundle, u: Sequence[int]) -> ConeSeries:
    """Image of ``r^u`` under ``r_p -> r_p phi_p(r)``, truncated to the bound."""
    u = tuple(int(c) for c in u)
    if not bundle.K.in_knonneg(u):
        raise NotInKnonneg(f"{u} is not in K>=0")
    g = bundle.grading.grade(u)
    if g > bundle.bound:
        return ConeSeries.zero(bundle.grading, bundle.bound, bundle.cone)
    inner = phi_power(bundle, u)
    return ConeSeries({tuple(a + b for a, b in zip(w, u)): c for w, c in inner.terms.items()},
                      bundle.grading, bundle.bound, bundle.cone)


def support_outside_kplus(bundle: MirrorMapBundle, series: ConeSeries,
                          shift: Optional[Sequence[int]] = None) -> list[Vec]:
    """Exponents (minus ``shift``) of ``series`` that are not in ``K_+``."""
    member = bundle.kplus_member()
    bad = []
    for w, _ in series:
        v = w if shift is None else tuple(a - b for a, b in zip(w, shift))
        if any(v) and not member(v):
            bad.append(w)
    return bad


@dataclass
class HypersurfaceSeries:
    n: int
    order: int
    F: list[int]
    H: list[Fraction]
    phi: list[Fraction]
    phi_n: list[Fraction]
    q: list[Fraction]  # q[k] is the coefficient of T^k
    power: int = 0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "power": self.power,
            "F": [str(x) for x in self.F],
            "phi": [str(x) for x in self.phi],
            "phi_power": [str(x) for x in self.phi_n],
            "q": [str(x) for x in self.q],
            "integral": all(Fraction(x).denominator == 1 for x in self.phi_n + self.q),
        }


def _ps_mul(a: list, b: list, N: int) -> list:
    out = [Fraction(0)] * (N + 1)
    for i, x in enumerate(a[:N + 1]):
        if x:
            for j, y in enumerate(b[:N + 1 - i]):
                out[i + j] += x * y
    return out


def _ps_div(a: list, b: list, N: int) -> list:
    out = [Fraction(0)] * (N + 1)
    for k in range(N + 1):
        s = a[k] - sum(b[j] * out[k - j] for j in range(1, k + 1))
        out[k] = s / b[0]
    return out


def _ps_exp(a: list, N: int) -> list:
    out = [Fraction(0)] * (N + 1)
    out[0] = Fraction(1)
    for k in range(1, N + 1):
        out[k] = sum(j * a[j] * out[k - j] for j in range(1, k + 1)) / k
    return out


def hypersurface_fast_path(n: int, N: int, power: Optional[int] = None) -> HypersurfaceSeries:
    """One-variable mirror map of the degree-n Fermat family.

    ``F_i = (ni)!/(i!)^n`` and ``H_i = H(ni) - H(i)``; the result holds
    ``phi = exp(sum F_i H_i T^i / sum F_i T^i)``, ``phi^power`` (default n)
    and ``q = T phi^power``, all to order N in T.
    """
    if n < 3:
        raise PreconditionViolation("n must be at least 3")
    if N < 0:
        raise PreconditionViolation("the order must be nonnegative")
    power = n if power is None else power
    if power < 0:
        raise PreconditionViolation("the power must be nonnegative")
    F = [factorial(n * i) // factorial(i) ** n for i in range(N + 1)]
    H = [harmonic(n * i) - harmonic(i) for i in range(N + 1)]
    A = [Fraction(f) * h for f, h in zip(F, H)]
    B = [Fraction(f) for f in F]
    phi = _ps_exp(_ps_div(A, B, N), N)
    phi_n = [Fraction(1)] + [Fraction(0)] * N
    for _ in range(power):
        phi_n = _ps_mul(phi_n, phi, N)
    q = [Fraction(0)] + phi_n[:N]
    return HypersurfaceSeries(n, N, F, H, phi, phi_n, q, power)


@dataclass
class IntegralityResult:
    u: Vec
    integral: bool
    offenders: list[tuple[Vec, Fraction]]
    support_ok: Optional[bool] = None

    def to_json(self, order) -> dict:
        out = {"u": list(self.u), "integral": self.integral,
               "offenders": [{"u": list(w), "c": str(c)} for w, c in self.offenders],
               "order": str(order)}
        if self.support_ok is not None:
            out["support_in_kplus"] = self.support_ok
        return out


def default_test_set(bundle: MirrorMapBundle) -> list[Vec]:
    rays = extremal_elements(bundle.knonneg)
    seen = []
    for u in list(bundle.K.basis) + rays:
        if u not in seen:
            seen.append(tuple(u))
    return seen


def integrality_report(bundle: MirrorMapBundle, test_set: Optional[Sequence[Sequence[int]]] = None,
                       check_support: bool = False) -> dict:
    tests = [tuple(u) for u in (test_set if test_set is not None else default_test_set(bundle))]
    results = []
    for u in tests:
        s = phi_power(bundle, u)
        verdict = s.is_integral()
        offenders = [] if verdict is True else verdict
        support = None
        if check_support:
            support = not support_outside_kplus(bundle, s)
        results.append(IntegralityResult(u, verdict is True, offenders, support))
    return {
        "order": str(bundle.bound),
        "grading": bundle.grading.to_json(),
        "gamma_convention": bundle.gamma_convention,
        "all_integral": all(r.integral for r in results),
        "results": [r.to_json(bundle.bound) for r in results],
    }
