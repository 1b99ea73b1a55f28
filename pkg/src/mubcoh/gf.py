"""Arithmetic in GF(p^n) for small odd prime powers.

Elements are polynomials over Z_p reduced modulo a fixed monic irreducible
of degree n. Element ``k`` of the field has coefficient ``c_i`` at X^i where
``k = sum c_i p^i``, so the integers 0..q-1 index the field and 0 and 1 are
the additive and multiplicative identities.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

Poly = tuple[int, ...]  # coefficients, lowest degree first


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """``(p, n)`` with ``q == p**n`` and p prime, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            break
    n, r = 0, q
    while r % p == 0:
        r //= p
        n += 1
    return (p, n) if r == 1 else None


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Poly, m: Poly, p: int) -> Poly:
    """Remainder of a modulo the monic polynomial m over Z_p."""
    r = _trim([x % p for x in a])
    dm = len(m) - 1
    while len(r) - 1 >= dm:
        c = r[-1]
        shift = len(r) - 1 - dm
        for i, mi in enumerate(m):
            r[shift + i] = (r[shift + i] - c * mi) % p
        _trim(r)
    return tuple(r)


def is_irreducible(m: Poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(m)//2."""
    n = len(m) - 1
    if n <= 0:
        return False
    for k in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            if not poly_mod(m, low + (1,), p):
                return False
    return True


@functools.lru_cache(maxsize=None)
def smallest_irreducible(p: int, n: int) -> Poly:
    """Lexicographically smallest monic irreducible of degree n over Z_p.

    Candidates are ordered by (c_{n-1}, ..., c_0) read as a base-p number.
    """
    for k in range(p**n):
        low = [(k // p**i) % p for i in range(n)]
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {n} over Z_{p}")


class GaloisField:
    """GF(p^n) with precomputed addition and multiplication tables."""

    def __init__(self, p: int, n: int = 1):
        if not is_prime(p):
            raise ValueError(f"characteristic must be prime, got {p}")
        if n < 1:
            raise ValueError(f"degree must be positive, got {n}")
        self.p, self.n = p, n
        self.q = p**n
        self.modulus = smallest_irreducible(p, n)
        q = self.q
        digits = np.array([[(k // p**i) % p for i in range(n)] for k in range(q)], dtype=np.int64)
        self._digits = digits
        weights = p ** np.arange(n, dtype=np.int64)
        self.add_table = (((digits[:, None, :] + digits[None, :, :]) % p) @ weights).astype(np.int64)
        self.neg = ((-digits) % p) @ weights
        self.mul_table = np.empty((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                self.mul_table[a, b] = self.mul_table[b, a] = self._mul_slow(a, b)
        self.trace_table = np.array([self._trace_slow(x) for x in range(q)], dtype=np.int64)

    def poly(self, k: int) -> Poly:
        return tuple(int(c) for c in self._digits[k])

    def index(self, coeffs) -> int:
        coeffs = list(coeffs) + [0] * (self.n - len(coeffs))
        return sum((c % self.p) * self.p**i for i, c in enumerate(coeffs))

    def _mul_slow(self, a: int, b: int) -> int:
        pa, pb = self.poly(a), self.poly(b)
        prod = [0] * (2 * self.n - 1)
        for i, x in enumerate(pa):
            for j, y in enumerate(pb):
                prod[i + j] += x * y
        return self.index(poly_mod(tuple(prod), self.modulus, self.p))

    def _trace_slow(self, x: int) -> int:
        # Tr(x) = x + x^p + ... + x^(p^(n-1)), a constant polynomial
        total, term = 0, x
        for _ in range(self.n):
            total = self.add(total, term)
            term = self.pow(term, self.p)
        if total >= self.p:
            raise AssertionError(f"trace of {x} left the prime subfield")
        return total

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def trace(self, a: int) -> int:
        return int(self.trace_table[a])

    def element(self, k: int) -> "FieldElement":
        return FieldElement(self, k)

    def __repr__(self) -> str:
        return f"GaloisField(p={self.p}, n={self.n})"


@functools.lru_cache(maxsize=None)
def galois_field(q: int) -> GaloisField:
    pn = prime_power(q)
    if pn is None:
        raise ValueError(f"{q} is not a prime power")
    return GaloisField(*pn)


@dataclass(frozen=True)
class FieldElement:
    """An element of a :class:`GaloisField`, with operator overloads."""

    field: GaloisField
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.field.q:
            raise ValueError(f"element index {self.index} outside [0, {self.field.q})")

    def _other(self, o) -> int:
        if isinstance(o, FieldElement):
            if o.field is not self.field:
                raise ValueError("elements belong to different fields")
            return o.index
        if isinstance(o, int):
            return o % self.field.p
        raise TypeError(f"cannot combine a field element with {type(o).__name__}")

    def __add__(self, o):
        b = self._other(o)
        return FieldElement(self.field, self.field.add(self.index, b))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg[self.index]))

    def __sub__(self, o):
        return self + (-FieldElement(self.field, self._other(o)))

    def __mul__(self, o):
        b = self._other(o)
        return FieldElement(self.field, self.field.mul(self.index, b))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.index, e))

    def trace(self) -> int:
        return self.field.trace(self.index)

    @property
    def coefficients(self) -> Poly:
        return self.field.poly(self.index)
