"""Sparse truncated power series with exponents in a strongly convex cone.

A :class:`ConeSeries` maps exponent vectors ``u`` (integer tuples) to nonzero
rationals, keeping only terms with ``lam . u <= N`` for a positive grading
``lam``. Products drop everything beyond the bound, so the series form a
truncated ring; ``exp``, ``log`` and division are computed grade by grade
using the Euler derivation ``D(r^u) = (lam . u) r^u``.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import ConeViolation, GradingMismatch, NonzeroConstantTerm, NotAUnit

Vec = tuple[int, ...]
Number = Union[int, Fraction]


class Grading:
    """A positive linear functional on ``Z^k`` with exact integer rescaling."""

    __slots__ = ("weights", "denominator", "int_weights")

    def __init__(self, weights: Sequence):
        self.weights = tuple(Fraction(w) for w in weights)
        if not self.weights or min(self.weights) <= 0:
            raise ValueError("grading weights must be positive")
        self.denominator = lcm(*(w.denominator for w in self.weights))
        self.int_weights = tuple(int(w * self.denominator) for w in self.weights)

    @classmethod
    def of(cls, g) -> "Grading":
        return g if isinstance(g, cls) else cls(g.weights if hasattr(g, "weights") else g)

    def grade(self, u: Sequence[int]) -> Fraction:
        return Fraction(self.igrade(u), self.denominator)

    def igrade(self, u: Sequence[int]) -> int:
        return sum(w * c for w, c in zip(self.int_weights, u))

    def __eq__(self, other):
        return isinstance(other, Grading) and self.weights == other.weights

    def __hash__(self):
        return hash(self.weights)

    def __len__(self):
        return len(self.weights)


class Cone:
    """Label for the ambient cone of a series, with an optional membership test."""

    __slots__ = ("name", "contains")

    def __init__(self, name: str, contains: Optional[Callable[[Vec], bool]] = None):
        self.name = name
        self.contains = contains

    def __repr__(self):
        return f"Cone({self.name!r})"


class ConeSeries:
    __slots__ = ("terms", "grading", "bound", "cone", "_ibound")

    def __init__(self, terms: Mapping[Vec, Number], grading, bound,
                 cone: Optional[Cone] = None, check: bool = True):
        self.grading = Grading.of(grading)
        self.bound = Fraction(bound)
        self.cone = cone
        self._ibound = _floor(self.bound * self.grading.denominator)
        if check:
            clean = {}
            for u, c in terms.items():
                u = tuple(int(x) for x in u)
                if len(u) != len(self.grading):
                    raise GradingMismatch(f"exponent {u} has wrong length")
                c = Fraction(c)
                if c and self.grading.igrade(u) <= self._ibound:
                    clean[u] = clean.get(u, 0) + c
            self.terms = {u: c for u, c in clean.items() if c}
        else:
            self.terms = dict(terms)

    # -- construction helpers --------------------------------------------
    @classmethod
    def zero(cls, grading, bound, cone=None) -> "ConeSeries":
        return cls({}, grading, bound, cone, check=False)

    @classmethod
    def one(cls, grading, bound, cone=None) -> "ConeSeries":
        g = Grading.of(grading)
        return cls({tuple([0] * len(g)): Fraction(1)}, g, bound, cone)

    @classmethod
    def monomial(cls, u: Sequence[int], c, grading, bound, cone=None) -> "ConeSeries":
        return cls({tuple(u): c}, grading, bound, cone)

    def _like(self, terms: dict) -> "ConeSeries":
        return ConeSeries(terms, self.grading, self.bound, self.cone, check=False)

    def _compatible(self, other: "ConeSeries") -> Optional[Cone]:
        if self.grading != other.grading or self.bound != other.bound:
            raise GradingMismatch("series have different gradings or bounds")
        if self.cone is not None and other.cone is not None and self.cone is not other.cone:
            if self.cone.name != other.cone.name:
                raise ConeViolation(f"incompatible cones {self.cone} and {other.cone}")
        return self.cone or other.cone

    # -- inspection ---------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.grading)

    @property
    def zero_exponent(self) -> Vec:
        return tuple([0] * self.nvars)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Vec, Fraction]]:
        """Terms in canonical (grade, lex) order."""
        g = self.grading.igrade
        for u in sorted(self.terms, key=lambda u: (g(u), u)):
            yield u, self.terms[u]

    def coefficient(self, u: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(u), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient(self.zero_exponent)

    def grade(self, u: Sequence[int]) -> Fraction:
        return self.grading.grade(u)

    def is_integral(self):
        """True, or the list of ``(u, c)`` with non-integer ``c`` in canonical order."""
        bad = [(u, c) for u, c in self if c.denominator != 1]
        return True if not bad else bad

    def check_cone(self) -> list[Vec]:
        """Support elements outside the ambient cone (empty if none or unchecked)."""
        if self.cone is None or self.cone.contains is None:
            return []
        return [u for u, _ in self if any(u) and not self.cone.contains(u)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConeSeries):
            return NotImplemented
        return (self.grading == other.grading and self.bound == other.bound
                and self.terms == other.terms)

    def __repr__(self):
        head = ", ".join(f"{u}: {c}" for u, c in list(self)[:4])
        more = ", ..." if len(self.terms) > 4 else ""
        return f"ConeSeries({{{head}{more}}}, bound={self.bound})"

    # -- ring operations ------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, ConeSeries):
            other = self.const(other)
        cone = self._compatible(other)
        out = dict(self.terms)
        for u, c in other.terms.items():
            v = out.get(u, 0) + c
            if v:
                out[u] = v
            else:
                out.pop(u, None)
        return ConeSeries(out, self.grading, self.bound, cone, check=False)

    __radd__ = __add__

    def __neg__(self):
        return self._like({u: -c for u, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ConeSeries):
            other = self.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def const(self, c) -> "ConeSeries":
        return ConeSeries({self.zero_exponent: c}, self.grading, self.bound, self.cone)

    def scalar_mul(self, c) -> "ConeSeries":
        c = Fraction(c)
        if not c:
            return self._like({})
        return self._like({u: c * a for u, a in self.terms.items()})

    def _by_grade(self) -> list[tuple[int, Vec, Fraction]]:
        g = self.grading.igrade
        return sorted(((g(u), u, c) for u, c in self.terms.items()), key=lambda t: (t[0], t[1]))

    def __mul__(self, other):
        if not isinstance(other, ConeSeries):
            return self.scalar_mul(other)
        cone = self._compatible(other)
        B = other._by_grade()
        N = self._ibound
        g = self.grading.igrade
        out: dict = {}
        for u, a in self.terms.items():
            room = N - g(u)
            for gb, v, b in B:
                if gb > room:
                    break
                w = tuple(x + y for x, y in zip(u, v))
                out[w] = out.get(w, 0) + a * b
        return ConeSeries({w: c for w, c in out.items() if c}, self.grading, self.bound,
                          cone, check=False)

    def __rmul__(self, other):
        return self.scalar_mul(other)

    mul = __mul__
    add = __add__

    def restrict(self, bound) -> "ConeSeries":
        """Drop terms above a smaller bound."""
        bound = Fraction(bound)
        if bound > self.bound:
            raise GradingMismatch("cannot extend a truncated series")
        ib = _floor(bound * self.grading.denominator)
        g = self.grading.igrade
        return ConeSeries({u: c for u, c in self.terms.items() if g(u) <= ib},
                          self.grading, bound, self.cone, check=False)

    def map_terms(self, fn: Callable[[Vec, Fraction], Number]) -> "ConeSeries":
        out = {}
        for u, c in self.terms.items():
            v = Fraction(fn(u, c))
            if v:
                out[u] = v
        return self._like(out)

    # -- transcendental operations -------------------------------------------
    def exp(self) -> "ConeSeries":
        if self.constant_term():
            raise NonzeroConstantTerm("exp needs a series without constant term")
        A = [(gu, u, gu * c) for gu, u, c in self._by_grade()]
        return self._push_solve({self.zero_exponent: Fraction(1)}, A,
                                lambda w, gw, acc: acc / gw,
                                lambda gv, val, gu, coef: coef * val,
                                seed_fixed=True)

    def log(self) -> "ConeSeries":
        if self.constant_term() != 1:
            raise NotAUnit("log needs constant term 1")
        A = [(gu, u, c) for gu, u, c in self._by_grade() if gu]
        init = {u: gu * c for gu, u, c in A}
        return self._push_solve(init, A,
                                lambda w, gw, acc: acc / gw,
                                lambda gv, val, gu, coef: -coef * gv * val)

    def inverse(self) -> "ConeSeries":
        return self.one(self.grading, self.bound, self.cone).div(self)

    def div(self, other: "ConeSeries") -> "ConeSeries":
        cone = self._compatible(other)
        b0 = other.constant_term()
        if not b0:
            raise NotAUnit("denominator has zero constant term")
        B = [(gu, u, c) for gu, u, c in other._by_grade() if gu]
        res = self._push_solve(dict(self.terms), B,
                               lambda w, gw, acc: acc / b0,
                               lambda gv, val, gu, coef: -coef * val)
        res.cone = cone
        return res

    __truediv__ = div

    def int_pow(self, k: int) -> "ConeSeries":
        if k < 0:
            return self.inverse().int_pow(-k)
        result = self.one(self.grading, self.bound, self.cone)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    __pow__ = int_pow

    def _push_solve(self, init: dict, A, finish, contrib, seed_fixed: bool = False):
        """Solve a grade-triangular recurrence by pushing finished terms forward.

        Terms are finalised in increasing grade. ``finish(w, grade, acc)``
        turns the accumulated value into the coefficient; each finished term
        ``(v, val)`` then adds ``contrib(grade_v, val, grade_u, coef_u)`` to
        the accumulator at ``v + u`` for every ``(u, coef_u)`` in ``A``.
        With ``seed_fixed`` the initial entries are already final values.
        """
        N = self._ibound
        g = self.grading.igrade
        acc: dict = {}
        heap: list = []
        fixed = set()
        for u, c in init.items():
            gu = g(u)
            if gu <= N:
                acc[u] = c
                heapq.heappush(heap, (gu, u))
                if seed_fixed:
                    fixed.add(u)
        out = {}
        while heap:
            gv, v = heapq.heappop(heap)
            val = acc.pop(v)
            if v not in fixed:
                val = finish(v, gv, val)
            if not val:
                continue
            out[v] = val
            room = N - gv
            for gu, u, coef in A:
                if gu > room:
                    break
                w = tuple(x + y for x, y in zip(v, u))
                if w in acc:
                    acc[w] += contrib(gv, val, gu, coef)
                else:
                    acc[w] = contrib(gv, val, gu, coef)
                    heapq.heappush(heap, (gv + gu, w))
        return ConeSeries(out, self.grading, self.bound, self.cone, check=False)

    # -- serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "grading": [str(w) for w in self.grading.weights],
            "bound": str(self.bound),
            "terms": [{"u": list(u), "c": str(c)} for u, c in self],
        }

    @classmethod
    def from_json(cls, data: dict, cone: Optional[Cone] = None) -> "ConeSeries":
        return cls({tuple(t["u"]): Fraction(t["c"]) for t in data["terms"]},
                   [Fraction(w) for w in data["grading"]], Fraction(data["bound"]), cone)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def exp(a: ConeSeries) -> ConeSeries:
    return a.exp()


def log(a: ConeSeries) -> ConeSeries:
    return a.log()


def div(a: ConeSeries, b: ConeSeries) -> ConeSeries:
    return a.div(b)


def int_pow(a: ConeSeries, k: int) -> ConeSeries:
    return a.int_pow(k)


def is_integral(a: ConeSeries):
    return a.is_integral()


def coefficient(a: ConeSeries, u: Sequence[int]) -> Fraction:
    return a.coefficient(u)
