"""Exact arithmetic with roots of unity and their rational combinations.

Degree-1 representation values are roots of unity stored as (order, exponent)
pairs.  Characters of induced representations are sums of such values, so
they live in cyclotomic fields; :class:`Cyclo` keeps them exact as rational
coefficient vectors reduced modulo the cyclotomic polynomial, which makes
character equality and inner products exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the n-th cyclotomic polynomial."""
    if n == 1:
        return (-1, 1)
    # x^n - 1 divided by the product of Phi_d over proper divisors d of n
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (monic divisor)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for i, dc in enumerate(den):
                num[k + i] -= c * dc
    assert all(c == 0 for c in num), "nonexact polynomial division"
    return out


@dataclass(frozen=True)
class RootOfUnity:
    """exp(2*pi*i*exponent/order), exact."""

    order: int
    exponent: int

    def __post_init__(self) -> None:
        if self.order <= 0:
            raise ValueError("order must be positive")
        object.__setattr__(self, "exponent", self.exponent % self.order)
        g = math.gcd(self.exponent, self.order) or self.order
        # canonical: reduce to the minimal order representing the same value
        if g > 1:
            object.__setattr__(self, "exponent", self.exponent // g)
            object.__setattr__(self, "order", self.order // g)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        m = self.order * other.order // math.gcd(self.order, other.order)
        return RootOfUnity(m, self.exponent * (m // self.order) + other.exponent * (m // other.order))

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.order, self.exponent * k)

    def conjugate(self) -> "RootOfUnity":
        return RootOfUnity(self.order, -self.exponent)

    def inverse(self) -> "RootOfUnity":
        return self.conjugate()

    def to_cyclo(self) -> "Cyclo":
        return Cyclo.root(self.order, self.exponent)

    def to_complex(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.exponent / self.order)


ONE_ROOT = RootOfUnity(1, 0)


class Cyclo:
    """An element of Q(zeta_n), canonically reduced mod the cyclotomic polynomial."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        self.order = order
        vec = [Fraction(c) for c in coeffs]
        if len(vec) < order:
            vec += [Fraction(0)] * (order - len(vec))
        self.coeffs = tuple(self._reduce(order, vec))

    @staticmethod
    def _reduce(order: int, vec: list[Fraction]) -> list[Fraction]:
        # fold exponents mod order, then take the remainder mod Phi_order
        folded = [Fraction(0)] * order
        for k, c in enumerate(vec):
            folded[k % order] += c
        phi = cyclotomic_polynomial(order)
        deg = len(phi) - 1
        for k in range(order - 1, deg - 1, -1):
            c = folded[k]
            if c:
                for i in range(len(phi)):
                    folded[k - deg + i] -= c * phi[i]
        return folded[:deg]

    @staticmethod
    def rational(x) -> "Cyclo":
        return Cyclo(1, [Fraction(x)])

    @staticmethod
    def root(order: int, exponent: int) -> "Cyclo":
        vec = [Fraction(0)] * order
        vec[exponent % order] += 1
        return Cyclo(order, vec)

    def _promote(self, order: int) -> list[Fraction]:
        if order % self.order:
            raise ValueError("promotion target must be a multiple of the order")
        step = order // self.order
        vec = [Fraction(0)] * order
        for k, c in enumerate(self.coeffs):
            vec[(k * step) % order] += c
        return vec

    @staticmethod
    def _common(a: "Cyclo", b: "Cyclo") -> tuple[int, list[Fraction], list[Fraction]]:
        m = a.order * b.order // math.gcd(a.order, b.order)
        return m, a._promote(m), b._promote(m)

    def __add__(self, other: "Cyclo") -> "Cyclo":
        m, va, vb = self._common(self, other)
        return Cyclo(m, [x + y for x, y in zip(va, vb)])

    def __sub__(self, other: "Cyclo") -> "Cyclo":
        m, va, vb = self._common(self, other)
        return Cyclo(m, [x - y for x, y in zip(va, vb)])

    def __mul__(self, other: "Cyclo") -> "Cyclo":
        m, va, vb = self._common(self, other)
        out = [Fraction(0)] * m
        for i, x in enumerate(va):
            if x:
                for j, y in enumerate(vb):
                    if y:
                        out[(i + j) % m] += x * y
        return Cyclo(m, out)

    def scale(self, c) -> "Cyclo":
        return Cyclo(self.order, [Fraction(c) * x for x in self.coeffs])

    def conjugate(self) -> "Cyclo":
        vec = [Fraction(0)] * self.order
        for k, c in enumerate(self.coeffs):
            vec[(-k) % self.order] += c
        return Cyclo(self.order, vec)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyclo.rational(other)
        if not isinstance(other, Cyclo):
            return NotImplemented
        return (self - other).is_zero()

    # equal values may be stored at different orders, so hashing is unsafe
    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        terms = [f"{c}*z{self.order}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Cyclo(" + (" + ".join(terms) or "0") + ")"

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.order)
        return sum(complex(c) * z**k for k, c in enumerate(self.coeffs) if c)


CYCLO_ZERO = Cyclo.rational(0)
CYCLO_ONE = Cyclo.rational(1)
