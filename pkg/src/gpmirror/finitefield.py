"""Small finite fields ``F_{p^k}`` with table arithmetic.

Elements are encoded as integers ``0 <= x < p^k`` whose base-p digits are
the coefficients of a polynomial in the generator (lowest digit first), so
the prime subfield is ``{0, ..., p-1}`` in every field. Addition and
multiplication are full lookup tables held as numpy arrays, which makes
vectorised evaluation over every point of a small affine space cheap.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import PreconditionViolation

MAX_ORDER = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _polymod_mul(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    """Multiply coefficient lists (lowest first) modulo a monic ``mod``."""
    k = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for i in range(len(out) - 1, k - 1, -1):
        c = out[i]
        if c:
            for j in range(k + 1):
                out[i - k + j] = (out[i - k + j] - c * mod[j]) % p
    return (out + [0] * k)[:k]


def _has_root_factor(poly: list[int], p: int) -> bool:
    """Does the monic ``poly`` have a monic factor of degree <= deg/2?"""
    k = len(poly) - 1
    for deg in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            divisor = list(tail) + [1]
            rem = list(poly)
            for i in range(k, deg - 1, -1):
                c = rem[i]
                if c:
                    for j in range(deg + 1):
                        rem[i - deg + j] = (rem[i - deg + j] - c * divisor[j]) % p
            if not any(rem[:deg]):
                return True
    return False


def irreducible_polynomials(p: int, k: int):
    """Monic irreducible polynomials of degree k over F_p, in lex order.

    Coefficient lists are lowest degree first.
    """
    for tail in itertools.product(range(p), repeat=k):
        poly = list(reversed(tail)) + [1]
        if k == 1 or (poly[0] and not _has_root_factor(poly, p)):
            yield poly


class GF:
    """The field with ``p^k`` elements."""

    def __init__(self, p: int, k: int = 1):
        if not is_prime(p):
            raise PreconditionViolation(f"{p} is not prime")
        if k < 1:
            raise PreconditionViolation("extension degree must be positive")
        q = p ** k
        if q > MAX_ORDER:
            raise PreconditionViolation(f"field of order {q} exceeds the table limit {MAX_ORDER}")
        self.p, self.k, self.q = p, k, q
        self.modulus = next(irreducible_polynomials(p, k)) if k > 1 else [0, 1]
        digits = [self._digits(x) for x in range(q)]
        idx = np.arange(q)
        dig = np.array(digits, dtype=np.int64).reshape(q, k)
        weights = p ** np.arange(k)
        self.add = (((dig[:, None, :] + dig[None, :, :]) % p) @ weights).astype(np.int32)
        exp_table = self._antilog(digits)
        log_table = np.zeros(q, dtype=np.int64)
        log_table[exp_table] = np.arange(q - 1)
        logs = log_table[1:]
        mul = np.zeros((q, q), dtype=np.int32)
        mul[1:, 1:] = exp_table[(logs[:, None] + logs[None, :]) % (q - 1)]
        self.mul = mul
        self.neg = ((-dig % p) @ weights).astype(np.int32)
        self.elements = idx

    def _antilog(self, digits) -> np.ndarray:
        """Powers ``g^0, ..., g^(q-2)`` of the first primitive element g."""
        p, q = self.p, self.q
        for g in range(2 if q > 2 else 1, q):
            seq = [1]
            gd = digits[g]
            cur = [1] + [0] * (self.k - 1)
            for _ in range(q - 2):
                cur = _polymod_mul(cur, gd, self.modulus, p) if self.k > 1 else [(cur[0] * g) % p]
                x = self._encode(cur)
                if x == 1:
                    break
                seq.append(x)
            if len(seq) == q - 1:
                return np.array(seq, dtype=np.int32)
        raise AssertionError("no primitive element found")

    def _digits(self, x: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(x % self.p)
            x //= self.p
        return out

    def _encode(self, digits) -> int:
        out = 0
        for d in reversed(digits):
            out = out * self.p + d
        return out

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    @property
    def name(self) -> str:
        return f"F_{self.p}^{self.k}" if self.k > 1 else f"F_{self.p}"

    def embed(self, n: int) -> int:
        """Image of the integer n in the prime field."""
        return n % self.p

    def power(self, x: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = int(self.mul[out, x])
        return out

    def power_table(self, e: int) -> np.ndarray:
        out = np.ones(self.q, dtype=np.int32)
        for _ in range(e):
            out = self.mul[out, self.elements]
        return out

    def roots(self, poly: list[int]) -> list[int]:
        """Roots in this field of a polynomial over F_p (coefficients lowest first)."""
        vals = np.zeros(self.q, dtype=np.int32)
        for c in reversed(poly):
            vals = self.add[self.mul[vals, self.elements], c % self.p]
        return [int(x) for x in np.nonzero(vals == 0)[0]]


@lru_cache(maxsize=None)
def field(p: int, k: int = 1) -> GF:
    return GF(p, k)
